//! Explicit Itoh–Abe discrete gradients.
//!
//! These are diagnostics: the optimizer never builds a full discrete
//! gradient, it solves the scalar equation along one direction instead. Both
//! constructors satisfy the consistency identity
//! `<DG(x, y), y - x> = V(y) - V(x)` whenever every increment is nonzero.

use nalgebra::DMatrix;
use rand::Rng;

use crate::directions::random_orthogonal;
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Step of the forward-difference surrogate used for a zero increment.
/// The exact value there is a one-sided limit that needs a derivative.
pub const ZERO_INCREMENT_STEP: f64 = 1e-8;

/// Orthogonal matrix `R` with frame vectors `f_i = R^T e_i` (the rows of `R`).
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedFrame {
    r: DMatrix<f64>,
}

impl RotatedFrame {
    pub fn new(r: DMatrix<f64>) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::config("frame", "matrix must be square"));
        }
        let n = r.nrows();
        let err = (r.transpose() * &r - DMatrix::identity(n, n)).amax();
        if !(err <= 1e-10) {
            return Err(Error::config("frame", format!("matrix is not orthogonal (error {err:e})")));
        }
        Ok(RotatedFrame { r })
    }

    pub fn identity(n: usize) -> Self {
        RotatedFrame { r: DMatrix::identity(n, n) }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        RotatedFrame { r: random_orthogonal(rng, n) }
    }

    pub fn dimension(&self) -> usize {
        self.r.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// The `i`-th frame vector.
    pub fn frame_vector(&self, i: usize) -> Vec<f64> {
        self.r.row(i).iter().copied().collect()
    }
}

fn check_dims(v: &Objective, x: &[f64], y: &[f64]) -> Result<()> {
    for len in [x.len(), y.len()] {
        if len != v.dimension() {
            return Err(Error::DimensionMismatch { expected: v.dimension(), got: len });
        }
    }
    Ok(())
}

/// Coordinate-increment discrete gradient: component `i` is the difference
/// quotient of `V` between the points that have their first `i-1` and first
/// `i` coordinates moved from `x` to `y`. Uses `n + 1` evaluations when no
/// increment vanishes.
pub fn itoh_abe_dg(v: &mut Objective, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_dims(v, x, y)?;
    let n = x.len();
    let mut p = x.to_vec();
    let mut fp = v.eval(&p)?;
    let mut dg = Vec::with_capacity(n);
    for i in 0..n {
        let h = y[i] - x[i];
        if h == 0.0 {
            let mut q = p.clone();
            q[i] += ZERO_INCREMENT_STEP;
            dg.push((v.eval(&q)? - fp) / ZERO_INCREMENT_STEP);
            continue;
        }
        p[i] = y[i];
        let next = v.eval(&p)?;
        dg.push((next - fp) / h);
        fp = next;
    }
    Ok(dg)
}

/// Rotated Itoh–Abe discrete gradient: difference quotients along the frame
/// vectors, mapped back by `R^T`.
pub fn rotated_itoh_abe_dg(v: &mut Objective, x: &[f64], y: &[f64], frame: &RotatedFrame) -> Result<Vec<f64>> {
    check_dims(v, x, y)?;
    let n = x.len();
    if frame.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, got: frame.dimension() });
    }
    let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let mut p = x.to_vec();
    let mut fp = v.eval(&p)?;
    let mut quotients = Vec::with_capacity(n);
    for i in 0..n {
        let f = frame.frame_vector(i);
        let h: f64 = f.iter().zip(&diff).map(|(a, b)| a * b).sum();
        if h == 0.0 {
            let q: Vec<f64> = p.iter().zip(&f).map(|(pi, fi)| pi + ZERO_INCREMENT_STEP * fi).collect();
            quotients.push((v.eval(&q)? - fp) / ZERO_INCREMENT_STEP);
            continue;
        }
        p.iter_mut().zip(&f).for_each(|(pi, fi)| *pi += h * fi);
        let next = v.eval(&p)?;
        quotients.push((next - fp) / h);
        fp = next;
    }
    let hat = nalgebra::DVector::from_vec(quotients);
    Ok((frame.matrix().transpose() * hat).iter().copied().collect())
}
