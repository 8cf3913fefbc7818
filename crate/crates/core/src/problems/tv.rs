//! Isotropic total-variation denoising by primal–dual hybrid gradient.
//!
//! Solves `min_u 1/2 |u - f|^2 + alpha * sum |grad u|` with forward
//! differences and Neumann boundaries. Step sizes are `1/sqrt(8)` for both
//! the primal and dual updates (so `sigma * tau * |grad|^2 <= 1`), the
//! over-relaxation parameter is 1 and the iteration count is fixed, which
//! makes the output a deterministic function of its inputs.

use super::image::ImageGrid;
use crate::error::{Error, Result};

pub const DEFAULT_PDHG_ITERS: usize = 300;

const STEP: f64 = 0.353_553_390_593_273_8; // 1 / sqrt(8)

fn gradient(u: &[f64], w: usize, h: usize, gx: &mut [f64], gy: &mut [f64]) {
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            gx[i] = if x + 1 < w { u[i + 1] - u[i] } else { 0.0 };
            gy[i] = if y + 1 < h { u[i + w] - u[i] } else { 0.0 };
        }
    }
}

/// Negative adjoint of [`gradient`].
fn divergence(px: &[f64], py: &[f64], w: usize, h: usize, out: &mut [f64]) {
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut d = 0.0;
            if x + 1 < w {
                d += px[i];
            }
            if x > 0 {
                d -= px[i - 1];
            }
            if y + 1 < h {
                d += py[i];
            }
            if y > 0 {
                d -= py[i - w];
            }
            out[i] = d;
        }
    }
}

pub fn tv_denoise_pdhg(noisy: &ImageGrid, alpha: f64, iters: usize) -> Result<ImageGrid> {
    if !(alpha >= 0.0) {
        return Err(Error::config("alpha", "must be nonnegative"));
    }
    if iters == 0 {
        return Err(Error::config("pdhg_iters", "must be at least 1"));
    }
    let (w, h) = (noisy.width(), noisy.height());
    let f = noisy.pixels();
    let len = f.len();
    let mut u = f.to_vec();
    let mut u_bar = u.clone();
    let mut u_prev = vec![0.0; len];
    let (mut px, mut py) = (vec![0.0; len], vec![0.0; len]);
    let (mut gx, mut gy) = (vec![0.0; len], vec![0.0; len]);
    let mut div = vec![0.0; len];

    for _ in 0..iters {
        gradient(&u_bar, w, h, &mut gx, &mut gy);
        for i in 0..len {
            let (qx, qy) = (px[i] + STEP * gx[i], py[i] + STEP * gy[i]);
            let norm = qx.hypot(qy);
            let scale = if norm > alpha { alpha / norm } else { 1.0 };
            px[i] = qx * scale;
            py[i] = qy * scale;
        }
        divergence(&px, &py, w, h, &mut div);
        u_prev.copy_from_slice(&u);
        for i in 0..len {
            u[i] = (u[i] + STEP * div[i] + STEP * f[i]) / (1.0 + STEP);
            u_bar[i] = 2.0 * u[i] - u_prev[i];
        }
    }
    ImageGrid::new(w, h, u)
}

/// `1/2 |u - f|^2 + alpha * TV(u)`.
pub fn tv_energy(u: &ImageGrid, f: &ImageGrid, alpha: f64) -> f64 {
    let (w, h) = (u.width(), u.height());
    let len = w * h;
    let (mut gx, mut gy) = (vec![0.0; len], vec![0.0; len]);
    gradient(u.pixels(), w, h, &mut gx, &mut gy);
    let tv: f64 = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).sum();
    let fid: f64 = u.pixels().iter().zip(f.pixels()).map(|(a, b)| 0.5 * (a - b).powi(2)).sum();
    fid + alpha * tv
}
