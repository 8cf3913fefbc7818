//! Solver parameters.

use std::time::Duration;

use crate::error::{Error, Result};

/// Iteration caps for the loops inside one line step. Hitting a cap never
/// raises an error; the step is reported as best effort instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerCaps {
    pub expansion: u32,
    pub parabolic: u32,
    pub clamp: u32,
}

impl Default for InnerCaps {
    fn default() -> Self {
        InnerCaps {
            expansion: 60,
            parabolic: 100,
            clamp: 200,
        }
    }
}

/// Parameters of the outer loop and the scalar step solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Lower bound on the implied time step.
    pub tau_min: f64,
    /// Upper bound on the implied time step.
    pub tau_max: f64,
    /// Probe length used to decide the descent side of a direction.
    pub probe_eps: f64,
    /// A step that decreases the objective by at most `eta` counts as a stall.
    pub eta: f64,
    /// Consecutive stalls before termination; `None` means the dimension.
    pub max_stall: Option<usize>,
    /// Maximum number of outer iterations.
    pub max_iters: usize,
    /// Expansion / contraction factor in (0, 1).
    pub sigma: f64,
    pub seed: u64,
    pub caps: InnerCaps,
    /// Optional cap on objective evaluations for the whole run.
    pub budget_evals: Option<u64>,
    /// Optional wall-clock cap. Runs using it are not reproducible.
    pub budget_time: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau_min: 1e-4,
            tau_max: 1e2,
            probe_eps: 1e-5,
            eta: 1e-9,
            max_stall: None,
            max_iters: 100_000,
            sigma: 0.5,
            seed: 0,
            caps: InnerCaps::default(),
            budget_evals: None,
            budget_time: None,
        }
    }
}

impl SolverConfig {
    /// Parameters used for the smooth Rosenbrock benchmark.
    pub fn smooth_benchmark() -> Self {
        SolverConfig {
            tau_min: 1e-4,
            tau_max: 1e2,
            probe_eps: 1e-5,
            eta: 1e-9,
            max_stall: Some(30),
            ..SolverConfig::default()
        }
    }

    /// Parameters used for the nonsmooth Chebyshev–Rosenbrock benchmark.
    pub fn nonsmooth_benchmark() -> Self {
        SolverConfig {
            tau_min: 1e-4,
            tau_max: 1e2,
            probe_eps: 1e-10,
            eta: 1e-16,
            max_stall: Some(100),
            ..SolverConfig::default()
        }
    }

    /// Checks every invariant and returns the configuration unchanged.
    pub fn validate(self) -> Result<Self> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive and finite, got {v}")))
            }
        }
        positive("tau_min", self.tau_min)?;
        positive("tau_max", self.tau_max)?;
        if self.tau_min > self.tau_max {
            return Err(Error::config(
                "tau_min",
                format!("tau_min ({}) exceeds tau_max ({})", self.tau_min, self.tau_max),
            ));
        }
        positive("probe_eps", self.probe_eps)?;
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::config("eta", format!("must be nonnegative, got {}", self.eta)));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::config("sigma", format!("must lie in (0, 1), got {}", self.sigma)));
        }
        if self.max_stall == Some(0) {
            return Err(Error::config("max_stall", "must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        if self.caps.expansion == 0 || self.caps.parabolic == 0 || self.caps.clamp == 0 {
            return Err(Error::config("caps", "inner iteration caps must be at least 1"));
        }
        if self.budget_evals == Some(0) {
            return Err(Error::config("budget_evals", "must be at least 1"));
        }
        Ok(self)
    }

    /// Predicted time step, the geometric mean of the bounds.
    pub fn tau_pred(&self) -> f64 {
        (self.tau_min * self.tau_max).sqrt()
    }

    pub(crate) fn stall_limit(&self, dim: usize) -> usize {
        self.max_stall.unwrap_or(dim)
    }
}
