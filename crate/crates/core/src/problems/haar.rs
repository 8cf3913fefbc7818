//! Orthonormal multi-level 2-D Haar transform and shrinkage denoising.
//!
//! Coefficients use the usual in-place (Mallat) layout: after `L` levels the
//! top-left `(width >> L) x (height >> L)` block holds the approximation
//! coefficients and everything else holds details.

use std::f64::consts::FRAC_1_SQRT_2;

use super::image::ImageGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    width: usize,
    height: usize,
    levels: usize,
    data: Vec<f64>,
}

impl HaarCoefficients {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Whether the coefficient at flat index `i` belongs to the coarsest
    /// approximation block.
    pub fn is_approximation(&self, i: usize) -> bool {
        let (x, y) = (i % self.width, i / self.width);
        x < self.width >> self.levels && y < self.height >> self.levels
    }

    /// Largest magnitude among detail coefficients.
    pub fn max_detail(&self) -> f64 {
        (0..self.data.len())
            .filter(|&i| !self.is_approximation(i))
            .map(|i| self.data[i].abs())
            .fold(0.0, f64::max)
    }

    /// Soft-thresholds the detail coefficients, and the approximation block
    /// as well when `threshold_approx` is set.
    pub fn shrink(&mut self, alpha: f64, threshold_approx: bool) {
        for i in 0..self.data.len() {
            if threshold_approx || !self.is_approximation(i) {
                self.data[i] = soft_threshold(self.data[i], alpha);
            }
        }
    }
}

/// Number of levels that divide both dimensions.
pub fn max_levels(width: usize, height: usize) -> usize {
    width.trailing_zeros().min(height.trailing_zeros()) as usize
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels > max_levels(width, height) {
        return Err(Error::Image(format!(
            "{width}x{height} image is not divisible by 2^{levels}"
        )));
    }
    Ok(())
}

/// One analysis step on `len` samples spaced `stride` apart.
fn analyse(data: &mut [f64], start: usize, stride: usize, len: usize, tmp: &mut Vec<f64>) {
    let half = len / 2;
    tmp.clear();
    tmp.resize(len, 0.0);
    for i in 0..half {
        let a = data[start + 2 * i * stride];
        let b = data[start + (2 * i + 1) * stride];
        tmp[i] = (a + b) * FRAC_1_SQRT_2;
        tmp[half + i] = (a - b) * FRAC_1_SQRT_2;
    }
    for (i, v) in tmp.iter().enumerate() {
        data[start + i * stride] = *v;
    }
}

fn synthesise(data: &mut [f64], start: usize, stride: usize, len: usize, tmp: &mut Vec<f64>) {
    let half = len / 2;
    tmp.clear();
    tmp.resize(len, 0.0);
    for i in 0..half {
        let s = data[start + i * stride];
        let d = data[start + (half + i) * stride];
        tmp[2 * i] = (s + d) * FRAC_1_SQRT_2;
        tmp[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    for (i, v) in tmp.iter().enumerate() {
        data[start + i * stride] = *v;
    }
}

pub fn haar_dwt(img: &ImageGrid, levels: usize) -> Result<HaarCoefficients> {
    let (w, h) = (img.width(), img.height());
    check_levels(w, h, levels)?;
    let mut data = img.pixels().to_vec();
    let mut tmp = Vec::new();
    for level in 0..levels {
        let (rw, rh) = (w >> level, h >> level);
        for y in 0..rh {
            analyse(&mut data, y * w, 1, rw, &mut tmp);
        }
        for x in 0..rw {
            analyse(&mut data, x, w, rh, &mut tmp);
        }
    }
    Ok(HaarCoefficients { width: w, height: h, levels, data })
}

pub fn haar_idwt(coeffs: &HaarCoefficients) -> Result<ImageGrid> {
    let (w, h) = (coeffs.width, coeffs.height);
    let mut data = coeffs.data.clone();
    let mut tmp = Vec::new();
    for level in (0..coeffs.levels).rev() {
        let (rw, rh) = (w >> level, h >> level);
        for x in 0..rw {
            synthesise(&mut data, x, w, rh, &mut tmp);
        }
        for y in 0..rh {
            synthesise(&mut data, y * w, 1, rw, &mut tmp);
        }
    }
    ImageGrid::new(w, h, data)
}

/// `sgn(v) max(|v| - alpha, 0)`.
pub fn soft_threshold(v: f64, alpha: f64) -> f64 {
    v.signum() * (v.abs() - alpha).max(0.0)
}

pub fn shrink(values: &[f64], alpha: f64) -> Vec<f64> {
    values.iter().map(|&v| soft_threshold(v, alpha)).collect()
}

/// `W^{-1} T_alpha(W f)`.
pub fn wavelet_denoise(noisy: &ImageGrid, alpha: f64, levels: usize, threshold_approx: bool) -> Result<ImageGrid> {
    if !(alpha >= 0.0) {
        return Err(Error::config("alpha", "must be nonnegative"));
    }
    let mut c = haar_dwt(noisy, levels)?;
    c.shrink(alpha, threshold_approx);
    haar_idwt(&c)
}
