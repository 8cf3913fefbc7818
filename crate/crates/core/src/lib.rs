//! Derivative-free optimisation with randomised Itoh–Abe discrete-gradient
//! methods.
//!
//! The solver only needs function values. Each iteration restricts the
//! objective to a line through the current iterate, solves the scalar
//! discrete-gradient equation along it and moves there, which yields the
//! dissipation identity
//!
//! ```text
//! V(x_{k+1}) - V(x_k) = -|x_{k+1} - x_k|^2 / tau_k,   tau_k in [tau_min, tau_max]
//! ```
//!
//! so the objective never increases. Search directions come from one of four
//! [`DirectionKind`]s: the standard coordinate cycle, independent uniform
//! draws on the sphere (random pursuit), blocks of random orthonormal bases
//! (rotated Itoh–Abe) and a deterministic dense sequence in the plane.
//!
//! ```
//! use dgopt::{problems, run, DirectionKind, DirectionStrategy, Objective, SolverConfig};
//!
//! let mut objective = Objective::new(2, problems::rosenbrock).unwrap();
//! let cfg = SolverConfig::smooth_benchmark();
//! let mut directions = DirectionStrategy::new(DirectionKind::RandomPursuit, 2, 7).unwrap();
//! let result = run(&mut objective, &[-1.0, 1.0], &mut directions, &cfg).unwrap();
//! assert!(result.final_value < 4.0);
//! ```
//!
//! The [`problems`] module carries the benchmark objectives and a small
//! bilevel denoising suite (Haar shrinkage and TV denoising scored by L² or
//! SSIM); [`discrete_gradient`] holds explicit discrete-gradient constructors
//! used as verification oracles.

// `!(x < y)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod directions;
pub mod discrete_gradient;
pub mod error;
pub mod line_step;
pub mod objective;
pub mod optimizer;
pub mod problems;
pub mod trace;

pub use config::{InnerCaps, SolverConfig};
pub use directions::{DirectionKind, DirectionStrategy};
pub use error::{Error, Result};
pub use line_step::{itoh_abe_step, StepOutcome};
pub use objective::Objective;
pub use optimizer::{run, run_ensemble, EnsembleMember, RunError, RunResult, StopReason};
pub use trace::{StepStatus, TraceRecord};
