//! Self-check suites run by `dgopt check`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SolverConfig;
use crate::directions::{DirectionKind, DirectionStrategy};
use crate::discrete_gradient::{itoh_abe_dg, rotated_itoh_abe_dg, RotatedFrame};
use crate::error::{Error, Result};
use crate::line_step::itoh_abe_step;
use crate::objective::Objective;
use crate::optimizer::run;
use crate::problems::{self, haar, ImageGrid};
use crate::trace::StepStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Dg,
    Step,
    Bilevel,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dg" => Ok(Suite::Dg),
            "step" => Ok(Suite::Step),
            "bilevel" => Ok(Suite::Bilevel),
            _ => Err(Error::config("suite", format!("unknown suite `{s}` (expected dg, step or bilevel)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Dg => vec![
            check("dg-consistency", dg_consistency(100)),
            check("dg-identity-frame", dg_identity_frame()),
        ],
        Suite::Step => vec![
            check("step-quadratic-oracle", step_quadratic()),
            check("step-max-stall", step_max_stall()),
            check("step-dissipation", step_dissipation()),
        ],
        Suite::Bilevel => vec![
            check("tv-two-pixel-kkt", tv_two_pixel()),
            check("haar-reconstruction", haar_round_trip()),
            check("ssim-self", ssim_self()),
        ],
    }
}

/// Random cubic polynomial on `R^n`:
/// `sum a_i x_i^2 + sum_{i<j} b_ij x_i x_j + sum c_i x_i^3 + d`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Objective {
    let quad: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let cross: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cubic: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let shift = rng.random_range(-1.0..1.0);
    Objective::new(n, move |x: &[f64]| {
        let mut v = shift;
        for i in 0..n {
            v += quad[i] * x[i] * x[i] + cubic[i] * x[i].powi(3);
            for j in i + 1..n {
                v += cross[i * n + j] * x[i] * x[j];
            }
        }
        v
    })
    .expect("n >= 1")
}

/// Largest relative consistency defect over `count` random instances, for
/// both the coordinate and the rotated discrete gradient.
pub fn max_consistency_defect(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let n = rng.random_range(1..=5);
        let mut v = random_polynomial(&mut rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let frame = RotatedFrame::random(&mut rng, n);
        let (fx, fy) = (v.eval(&x)?, v.eval(&y)?);
        let scale = fx.abs().max(fy.abs()).max((fy - fx).abs()).max(f64::MIN_POSITIVE);
        let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        for dg in [itoh_abe_dg(&mut v, &x, &y)?, rotated_itoh_abe_dg(&mut v, &x, &y, &frame)?] {
            let inner: f64 = dg.iter().zip(&diff).map(|(a, b)| a * b).sum();
            worst = worst.max((inner - (fy - fx)).abs() / scale);
        }
    }
    Ok(worst)
}

fn dg_consistency(count: usize) -> Result<(bool, String)> {
    let worst = max_consistency_defect(count, 2024)?;
    Ok((worst <= 1e-9, format!("{count} random instances, max relative defect {worst:.3e}")))
}

fn dg_identity_frame() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut v = random_polynomial(&mut rng, 3);
    let (x, y) = ([0.3, -1.2, 0.8], [1.1, 0.4, -0.5]);
    let a = itoh_abe_dg(&mut v, &x, &y)?;
    let b = rotated_itoh_abe_dg(&mut v, &x, &y, &RotatedFrame::identity(3))?;
    let err = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-12, format!("max difference {err:.3e}")))
}

fn step_quadratic() -> Result<(bool, String)> {
    let cfg = SolverConfig { tau_min: 1.0, tau_max: 1.0, ..SolverConfig::smooth_benchmark() };
    let mut v = Objective::new(1, |x: &[f64]| 0.5 * x[0] * x[0])?;
    let out = itoh_abe_step(&mut v, &[1.0], 0.5, &[-1.0], &cfg)?;
    let err = (out.point[0] - 1.0 / 3.0).abs();
    Ok((
        out.status == StepStatus::Accepted && err <= 1e-6,
        format!("status {}, y = {:.12} (|y - 1/3| = {err:.3e})", out.status, out.point[0]),
    ))
}

fn step_max_stall() -> Result<(bool, String)> {
    let cfg = SolverConfig::smooth_benchmark();
    let mut v = Objective::new(2, problems::max_coords)?;
    let mut ok = true;
    for d in [[1.0, 0.0], [0.0, 1.0]] {
        ok &= itoh_abe_step(&mut v, &[1.0, 1.0], 1.0, &d, &cfg)?.status == StepStatus::StationaryAlongDirection;
    }
    Ok((ok, "max(x, y) at (1, 1) is stationary along both coordinates".into()))
}

fn step_dissipation() -> Result<(bool, String)> {
    let cfg = SolverConfig { max_iters: 2000, ..SolverConfig::smooth_benchmark() };
    let mut v = Objective::new(2, problems::rosenbrock)?;
    let mut s = DirectionStrategy::new(DirectionKind::RandomPursuit, 2, 1)?;
    let r = run(&mut v, &[-1.0, 1.0], &mut s, &cfg).map_err(|e| e.source)?;
    let mut prev = r.initial_value;
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut monotone = true;
    for rec in &r.trace {
        monotone &= rec.f_value <= prev;
        if rec.status == StepStatus::Accepted {
            let tau = rec.tau_implied.unwrap_or(f64::NAN);
            let rhs = rec.step_norm * rec.step_norm;
            worst = worst.max(((prev - rec.f_value) * tau - rhs).abs() / rhs);
            accepted += 1;
        }
        prev = rec.f_value;
    }
    Ok((
        monotone && worst <= 1e-9,
        format!("{accepted} accepted steps, max relative dissipation defect {worst:.3e}"),
    ))
}

fn tv_two_pixel() -> Result<(bool, String)> {
    let f = ImageGrid::new(2, 1, vec![0.0, 2.0])?;
    let u = problems::tv_denoise_pdhg(&f, 0.5, problems::tv::DEFAULT_PDHG_ITERS)?;
    let p = u.pixels();
    let err = (p[0] - 0.5).abs().max((p[1] - 1.5).abs());
    Ok((err <= 1e-4, format!("u = ({:.6}, {:.6})", p[0], p[1])))
}

fn haar_round_trip() -> Result<(bool, String)> {
    let img = ImageGrid::synthetic_squares(32, 32)?.with_gaussian_noise(0.1, 1)?;
    let back = haar::haar_idwt(&haar::haar_dwt(&img, 5)?)?;
    let err = back.pixels().iter().zip(img.pixels()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-10, format!("max reconstruction error {err:.3e}")))
}

fn ssim_self() -> Result<(bool, String)> {
    let img = ImageGrid::synthetic_squares(32, 32)?.with_gaussian_noise(0.1, 2)?;
    let s = problems::ssim(&img, &img)?;
    Ok(((s - 1.0).abs() <= 1e-12, format!("SSIM(u, u) = {s}")))
}
