//! Bilevel regularisation-parameter learning.
//!
//! The upper-level objective is `V(a) = Phi(u_{exp(a)})`, where `u_alpha` is
//! the denoised image for regularisation weight `alpha` and `Phi` scores it
//! against the clean image. Optimising over the log-weight `a` keeps the
//! problem unconstrained.

use std::sync::Arc;

use super::haar::{max_levels, wavelet_denoise};
use super::image::ImageGrid;
use super::ssim::ssim;
use super::tv::{tv_denoise_pdhg, DEFAULT_PDHG_ITERS};
use crate::error::{Error, Result};
use crate::objective::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Haar soft-thresholding with `levels` decomposition levels.
    WaveletShrinkage { levels: usize, threshold_approx: bool },
    /// TV denoising with a fixed number of PDHG iterations.
    TvDenoisePdhg { iters: usize },
}

impl InnerSolver {
    pub fn default_tv() -> Self {
        InnerSolver::TvDenoisePdhg { iters: DEFAULT_PDHG_ITERS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Score {
    /// `1/2 |u - u_clean|^2`
    L2,
    /// `1 - SSIM(u, u_clean)`
    Ssim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilevelProblem {
    clean: ImageGrid,
    noisy: ImageGrid,
    inner: InnerSolver,
    score: Score,
}

impl BilevelProblem {
    pub fn new(clean: ImageGrid, noisy: ImageGrid, inner: InnerSolver, score: Score) -> Result<Self> {
        if !clean.same_shape(&noisy) {
            return Err(Error::Image("clean and noisy images differ in shape".into()));
        }
        match inner {
            InnerSolver::WaveletShrinkage { levels, .. } => {
                if levels > max_levels(clean.width(), clean.height()) {
                    return Err(Error::config("levels", format!(
                        "{}x{} image does not support {levels} Haar levels",
                        clean.width(),
                        clean.height()
                    )));
                }
            }
            InnerSolver::TvDenoisePdhg { iters } => {
                if iters == 0 {
                    return Err(Error::config("pdhg_iters", "must be at least 1"));
                }
            }
        }
        if score == Score::Ssim && clean.pixels().len() < 2 {
            return Err(Error::Image("SSIM scoring needs at least two pixels".into()));
        }
        Ok(BilevelProblem { clean, noisy, inner, score })
    }

    /// The synthetic squares image with seeded Gaussian noise.
    pub fn synthetic(size: usize, noise_sigma: f64, seed: u64, inner: InnerSolver, score: Score) -> Result<Self> {
        let clean = ImageGrid::synthetic_squares(size, size)?;
        let noisy = clean.with_gaussian_noise(noise_sigma, seed)?;
        BilevelProblem::new(clean, noisy, inner, score)
    }

    pub fn clean(&self) -> &ImageGrid {
        &self.clean
    }

    pub fn noisy(&self) -> &ImageGrid {
        &self.noisy
    }

    /// Lower-level solution for weight `alpha >= 0`.
    pub fn reconstruct(&self, alpha: f64) -> Result<ImageGrid> {
        match self.inner {
            InnerSolver::WaveletShrinkage { levels, threshold_approx } => {
                wavelet_denoise(&self.noisy, alpha, levels, threshold_approx)
            }
            InnerSolver::TvDenoisePdhg { iters } => tv_denoise_pdhg(&self.noisy, alpha, iters),
        }
    }

    pub fn score_of(&self, u: &ImageGrid) -> Result<f64> {
        match self.score {
            Score::L2 => Ok(u
                .pixels()
                .iter()
                .zip(self.clean.pixels())
                .map(|(a, b)| 0.5 * (a - b).powi(2))
                .sum()),
            Score::Ssim => Ok(1.0 - ssim(u, &self.clean)?),
        }
    }

    /// `Phi(u_{exp(log_alpha)})`.
    pub fn value(&self, log_alpha: f64) -> Result<f64> {
        let u = self.reconstruct(log_alpha.exp())?;
        self.score_of(&u)
    }

    /// The upper-level problem as a one-dimensional objective. Inner failures
    /// surface as a non-finite value.
    pub fn into_objective(self) -> Objective {
        let problem = Arc::new(self);
        Objective::new(1, move |a: &[f64]| problem.value(a[0]).unwrap_or(f64::NAN))
            .expect("dimension 1 is valid")
    }
}
