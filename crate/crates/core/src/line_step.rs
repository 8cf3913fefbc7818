//! Scalar solver for a single Itoh–Abe step.
//!
//! Along a unit direction `d` the step solves
//!
//! ```text
//! beta = -(V(x - tau*beta*d) - V(x)) / (tau*beta),   tau in [tau_min, tau_max]
//! ```
//!
//! for the displacement. Writing `phi(t) = V(x + t*d)`, a displacement `t` is
//! admissible when the ratio `(phi(0) - phi(t)) / t^2` lies in
//! `[1/tau_max, 1/tau_min]`; the implied time step is its reciprocal.
//!
//! The solve runs in five stages, each exposed on its own for testing:
//! [`probe`] picks the descent side, [`initial_beta`] extrapolates a first
//! displacement from the probe slope, [`expand_while_concave`] grows the
//! bracket until the three samples are convex, [`parabolic_refine`] performs
//! successive parabolic interpolation until the objective decreases, and
//! [`clamp_ratio`] rescales the displacement into the time-step band.

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::StepStatus;

/// Relative slack on the time-step band. Without it a degenerate band
/// (`tau_min == tau_max`) could only be met by exact floating-point equality.
pub const BAND_RTOL: f64 = 1e-10;

const GOLDEN_SECTION: f64 = 0.381_966_011_250_105_1;

/// Result of one line step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub point: Vec<f64>,
    pub f_new: f64,
    pub f_old: f64,
    pub displacement_norm: f64,
    /// Discrete-gradient scalar relative to the direction passed in, so that
    /// `point = x - tau_implied * beta * d`.
    pub beta: f64,
    /// `|dx|^2 / (f_old - f_new)`; `None` when the objective did not decrease.
    pub tau_implied: Option<f64>,
    pub status: StepStatus,
    pub evals_used: u64,
}

impl StepOutcome {
    pub fn decrease(&self) -> f64 {
        self.f_old - self.f_new
    }
}

/// Which side of the direction descends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// `sign` is `+1` to keep `d` and `-1` to flip it; `phi_eps` is the
    /// objective at `x + sign*eps*d`.
    Descent { sign: f64, phi_eps: f64 },
    StationaryAlongDirection,
}

/// Three abscissae `t[0] < t[1] < t[2]` with cached values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub t: [f64; 3],
    pub f: [f64; 3],
}

impl Bracket {
    fn slopes(&self) -> (f64, f64) {
        let [t0, t1, t2] = self.t;
        let [f0, f1, f2] = self.f;
        ((f1 - f0) / (t1 - t0), (f2 - f1) / (t2 - t1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub bracket: Bracket,
    /// The cap was reached with the samples still concave.
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    /// Best decreasing abscissa seen, if any.
    pub best: Option<(f64, f64)>,
    /// Whether a parabolic (or fallback) step itself decreased the objective.
    pub decreased: bool,
    pub steps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub t: f64,
    pub f: f64,
    /// The ratio landed inside the time-step band.
    pub in_band: bool,
}

/// Decides the descent side with at most two evaluations.
pub fn probe<F>(phi: &mut F, phi0: f64, eps: f64) -> Result<Probe>
where
    F: FnMut(f64) -> Result<f64>,
{
    let forward = phi(eps)?;
    if forward < phi0 {
        return Ok(Probe::Descent { sign: 1.0, phi_eps: forward });
    }
    let backward = phi(-eps)?;
    if backward < phi0 {
        return Ok(Probe::Descent { sign: -1.0, phi_eps: backward });
    }
    Ok(Probe::StationaryAlongDirection)
}

/// First displacement guess from the secant slope `s` at probe scale:
/// `-tau_pred * s`, which gives the linear model the ratio `1/tau_pred`.
pub fn initial_beta(phi0: f64, phi_eps: f64, eps: f64, tau_pred: f64) -> Result<f64> {
    let slope = (phi_eps - phi0) / eps;
    if !(slope < 0.0) {
        return Err(Error::Contract("initial_beta needs a descending probe"));
    }
    Ok(-tau_pred * slope)
}

/// Moves `t[2]` outwards by `1/sigma` while the right secant slope does not
/// exceed the left one.
pub fn expand_while_concave<F>(phi: &mut F, mut bracket: Bracket, sigma: f64, cap: u32) -> Result<Expansion>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..cap {
        let (left, right) = bracket.slopes();
        if right > left {
            return Ok(Expansion { bracket, capped: false });
        }
        bracket.t[2] /= sigma;
        bracket.f[2] = phi(bracket.t[2])?;
    }
    let (left, right) = bracket.slopes();
    Ok(Expansion {
        bracket,
        capped: right <= left,
    })
}

/// Vertex of the parabola through the bracket, or `None` when the three
/// samples are (numerically) collinear.
pub fn parabolic_vertex(bracket: &Bracket) -> Option<f64> {
    let [x0, x1, x2] = bracket.t;
    let [v0, v1, v2] = bracket.f;
    let num = (x1 - x0).powi(2) * (v1 - v2) - (x1 - x2).powi(2) * (v1 - v0);
    let den = (x1 - x0) * (v1 - v2) - (x1 - x2) * (v1 - v0);
    let scale = (x2 - x0).abs() * ((v1 - v2).abs() + (v1 - v0).abs());
    if !(den.abs() > 1e-14 * scale) || den == 0.0 {
        return None;
    }
    let y = x1 - 0.5 * num / den;
    y.is_finite().then_some(y)
}

/// Successive parabolic interpolation on `bracket` until a sample falls
/// below `phi0`. Degenerate or non-convex samples fall back to a golden-section
/// step inside the larger interval next to the best sample.
pub fn parabolic_refine<F>(phi: &mut F, bracket: Bracket, phi0: f64, cap: u32) -> Result<Refinement>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut pts: Vec<(f64, f64)> = bracket.t.into_iter().zip(bracket.f).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = pts
        .iter()
        .filter(|p| p.1 < phi0)
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1));

    for step in 1..=cap {
        let current = Bracket {
            t: [pts[0].0, pts[1].0, pts[2].0],
            f: [pts[0].1, pts[1].1, pts[2].1],
        };
        let span = current.t[2] - current.t[0];
        if !(span > 1e-15 * current.t[2].abs()) {
            return Ok(Refinement { best, decreased: false, steps: step - 1 });
        }
        let y = parabolic_vertex(&current)
            .filter(|_| convex(&current))
            .filter(|&y| y > current.t[0] && y < current.t[2])
            .filter(|&y| current.t.iter().all(|&t| (y - t).abs() > 1e-12 * span))
            .unwrap_or_else(|| golden_point(&pts));
        let fy = phi(y)?;
        if fy < phi0 && best.is_none_or(|b| fy < b.1) {
            best = Some((y, fy));
        }
        if fy < phi0 {
            return Ok(Refinement { best, decreased: true, steps: step });
        }
        pts.push((y, fy));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let lowest = (0..pts.len())
            .min_by(|&i, &j| pts[i].1.total_cmp(&pts[j].1))
            .expect("four samples");
        let start = lowest.saturating_sub(1).min(pts.len() - 3);
        pts = pts[start..start + 3].to_vec();
    }
    Ok(Refinement { best, decreased: false, steps: cap })
}

fn convex(b: &Bracket) -> bool {
    let (left, right) = b.slopes();
    right > left
}

fn golden_point(pts: &[(f64, f64)]) -> f64 {
    let b = (0..3).min_by(|&i, &j| pts[i].1.total_cmp(&pts[j].1)).expect("three samples");
    let left = (b > 0).then(|| pts[b - 1].0);
    let right = (b < 2).then(|| pts[b + 1].0);
    let tb = pts[b].0;
    let other = match (left, right) {
        (Some(l), Some(r)) => {
            if r - tb > tb - l {
                r
            } else {
                l
            }
        }
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => unreachable!(),
    };
    tb + GOLDEN_SECTION * (other - tb)
}

/// Rescales `t` until `(phi0 - phi(t)) / t^2` lies in `[1/tau_max, 1/tau_min]`.
///
/// A ratio above the band lengthens the step by `1/sigma`, a ratio below it
/// shortens by `sigma`. Once both kinds of violation have been seen the
/// admissible set is bracketed and the rescaling switches to geometric
/// bisection. When the band is not reached, the returned sample is the best
/// decreasing one evaluated here (or the input).
pub fn clamp_ratio<F>(phi: &mut F, phi0: f64, t: f64, f_t: f64, cfg: &SolverConfig) -> Result<Clamped>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lo = 1.0 / cfg.tau_max;
    let hi = 1.0 / cfg.tau_min;
    let floor = cfg.probe_eps * 1e-6;
    let mut best = (t, f_t);
    let (mut t, mut f) = (t, f_t);
    let mut short: Option<f64> = None;
    let mut long: Option<f64> = None;

    for _ in 0..cfg.caps.clamp {
        let decrease = phi0 - f;
        let ratio = decrease / (t * t);
        if decrease > 0.0 && in_band(ratio, lo, hi) {
            return Ok(Clamped { t, f, in_band: true });
        }
        if ratio > hi {
            short = Some(t);
        } else {
            long = Some(t);
        }
        t = match (short, long) {
            (Some(a), Some(b)) => {
                if (a / b).ln().abs() < 1e-14 {
                    break;
                }
                (a * b).sqrt()
            }
            _ if ratio > hi => t / cfg.sigma,
            _ => t * cfg.sigma,
        };
        if t < floor {
            break;
        }
        f = phi(t)?;
        if f < best.1 {
            best = (t, f);
        }
    }
    Ok(Clamped { t: best.0, f: best.1, in_band: false })
}

fn in_band(ratio: f64, lo: f64, hi: f64) -> bool {
    ratio >= lo * (1.0 - BAND_RTOL) && ratio <= hi * (1.0 + BAND_RTOL)
}

/// Evaluates the objective along `x + sign*t*d`, counting calls and keeping
/// the best decreasing sample.
struct Line<'a> {
    objective: &'a mut Objective,
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    sign: f64,
    buf: Vec<f64>,
    evals: u64,
    best: Option<(f64, f64)>,
}

impl Line<'_> {
    fn at(&mut self, t: f64) -> Result<f64> {
        let s = self.sign * t;
        for ((b, xi), di) in self.buf.iter_mut().zip(self.x).zip(self.d) {
            *b = xi + s * di;
        }
        self.evals += 1;
        let f = self.objective.eval(&self.buf)?;
        if t > 0.0 && f < self.f0 && self.best.is_none_or(|b| f < b.1) {
            self.best = Some((t, f));
        }
        Ok(f)
    }

    fn point(&self, t: f64) -> Vec<f64> {
        let s = self.sign * t;
        self.x.iter().zip(self.d).map(|(xi, di)| xi + s * di).collect()
    }
}

/// One Itoh–Abe step from `x` (where the objective equals `fx`) along the
/// unit direction `d`. `fx` is not re-evaluated.
pub fn itoh_abe_step(
    objective: &mut Objective,
    x: &[f64],
    fx: f64,
    d: &[f64],
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    let n = objective.dimension();
    for len in [x.len(), d.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::Contract("direction must have unit norm"));
    }

    let mut line = Line {
        objective,
        x,
        d,
        f0: fx,
        sign: 1.0,
        buf: vec![0.0; n],
        evals: 0,
        best: None,
    };
    let eps = cfg.probe_eps;

    let phi_eps = match probe(&mut |t| line.at(t), fx, eps)? {
        Probe::StationaryAlongDirection => {
            return Ok(StepOutcome {
                point: x.to_vec(),
                f_new: fx,
                f_old: fx,
                displacement_norm: 0.0,
                beta: 0.0,
                tau_implied: None,
                status: StepStatus::StationaryAlongDirection,
                evals_used: line.evals,
            });
        }
        Probe::Descent { sign, phi_eps } => {
            line.sign = sign;
            // the probe recorded its sample at t = sign*eps
            line.best = Some((eps, phi_eps));
            phi_eps
        }
    };

    let delta0 = initial_beta(fx, phi_eps, eps, cfg.tau_pred())?;
    let bracket = if delta0 > eps {
        Bracket {
            t: [0.0, eps, delta0],
            f: [fx, phi_eps, line.at(delta0)?],
        }
    } else {
        let mid = line.at(0.5 * delta0)?;
        Bracket {
            t: [0.0, 0.5 * delta0, delta0],
            f: [fx, mid, line.at(delta0)?],
        }
    };

    let expansion = expand_while_concave(&mut |t| line.at(t), bracket, cfg.sigma, cfg.caps.expansion)?;
    let candidate = if expansion.capped {
        line.best
    } else {
        parabolic_refine(&mut |t| line.at(t), expansion.bracket, fx, cfg.caps.parabolic)?
            .best
            .or(line.best)
    };
    let (t, f) = candidate.ok_or(Error::Contract("no decreasing sample after a descending probe"))?;

    let clamped = clamp_ratio(&mut |t| line.at(t), fx, t, f, cfg)?;
    if clamped.in_band {
        let point = line.point(clamped.t);
        if let Some(outcome) = accepted(x, fx, point, clamped.f, line.sign, cfg, line.evals) {
            return Ok(outcome);
        }
    }
    let (t, f) = line.best.expect("a decreasing sample exists");
    let point = line.point(t);
    let displacement_norm = distance(x, &point);
    let decrease = fx - f;
    Ok(StepOutcome {
        point,
        f_new: f,
        f_old: fx,
        displacement_norm,
        beta: -line.sign * decrease / displacement_norm,
        tau_implied: Some(displacement_norm * displacement_norm / decrease),
        status: StepStatus::BestEffort,
        evals_used: line.evals,
    })
}

/// Builds an accepted outcome, re-checking the band on the displacement
/// actually realised in floating point.
fn accepted(
    x: &[f64],
    fx: f64,
    point: Vec<f64>,
    f: f64,
    sign: f64,
    cfg: &SolverConfig,
    evals: u64,
) -> Option<StepOutcome> {
    let displacement_norm = distance(x, &point);
    let decrease = fx - f;
    if !(decrease > 0.0 && displacement_norm > 0.0) {
        return None;
    }
    let ratio = decrease / (displacement_norm * displacement_norm);
    if !in_band(ratio, 1.0 / cfg.tau_max, 1.0 / cfg.tau_min) {
        return None;
    }
    let tau = (1.0 / ratio).clamp(cfg.tau_min, cfg.tau_max);
    Some(StepOutcome {
        point,
        f_new: f,
        f_old: fx,
        displacement_norm,
        beta: -sign * decrease / displacement_norm,
        tau_implied: Some(tau),
        status: StepStatus::Accepted,
        evals_used: evals,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}
