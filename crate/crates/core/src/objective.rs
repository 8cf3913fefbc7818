//! Blackbox objective with evaluation counting.

use std::fmt;

use crate::error::{Error, Result};

type ObjectiveFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real-valued function on `R^n` that counts its evaluations.
///
/// Every call to [`Objective::eval`] increments the counter by one, including
/// calls that fail because the function returned a non-finite value.
pub struct Objective {
    dim: usize,
    func: Box<ObjectiveFn>,
    evals: u64,
}

impl Objective {
    /// Wraps `func` as an objective on `R^dim` with a zeroed counter.
    pub fn new<F>(dim: usize, func: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim < 1 {
            return Err(Error::config("dimension", "must be at least 1"));
        }
        Ok(Objective {
            dim,
            func: Box::new(func),
            evals: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn eval_count(&self) -> u64 {
        self.evals
    }

    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        self.evals += 1;
        let value = (self.func)(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective {
                value,
                point: x.to_vec(),
            });
        }
        Ok(value)
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("dim", &self.dim)
            .field("evals", &self.evals)
            .finish()
    }
}
