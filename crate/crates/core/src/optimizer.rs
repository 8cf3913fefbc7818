//! Outer loop: line steps over a direction sequence with the
//! consecutive-stall stopping rule.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::SolverConfig;
use crate::directions::{DirectionKind, DirectionStrategy};
use crate::error::{Error, Result};
use crate::line_step::itoh_abe_step;
use crate::objective::Objective;
use crate::trace::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxIters,
    StallLimit,
    UserBudget,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIters => "MaxIters",
            StopReason::StallLimit => "StallLimit",
            StopReason::UserBudget => "UserBudget",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_point: Vec<f64>,
    pub final_value: f64,
    /// Objective at the starting point.
    pub initial_value: f64,
    pub iterations: usize,
    /// All evaluations, including the one at the starting point.
    pub total_evals: u64,
    pub stop_reason: StopReason,
    pub trace: Vec<TraceRecord>,
}

/// A run aborted by an objective or contract error. The trace up to the
/// failing iteration is kept.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("run aborted after {} iterations: {source}", .trace.len())]
pub struct RunError {
    pub source: Error,
    pub last_point: Vec<f64>,
    pub trace: Vec<TraceRecord>,
}

/// Counts consecutive iterations whose decrease is at most `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallCounter {
    eta: f64,
    limit: usize,
    count: usize,
}

impl StallCounter {
    pub fn new(eta: f64, limit: usize) -> Self {
        StallCounter { eta, limit, count: 0 }
    }

    /// Records one decrease and reports whether the limit is reached.
    pub fn record(&mut self, decrease: f64) -> bool {
        if decrease <= self.eta {
            self.count += 1;
        } else {
            self.count = 0;
        }
        self.count >= self.limit
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Runs the randomised Itoh–Abe method from `x0`.
///
/// Every iteration, including those where the iterate does not move, emits
/// one trace record and counts towards both the iteration cap and the stall
/// counter.
pub fn run(
    objective: &mut Objective,
    x0: &[f64],
    strategy: &mut DirectionStrategy,
    cfg: &SolverConfig,
) -> std::result::Result<RunResult, RunError> {
    let abort = |source: Error, x: &[f64], trace: Vec<TraceRecord>| RunError {
        source,
        last_point: x.to_vec(),
        trace,
    };
    let cfg = cfg.clone().validate().map_err(|e| abort(e, x0, Vec::new()))?;
    let n = objective.dimension();
    if x0.len() != n || strategy.dimension() != n {
        let got = if x0.len() != n { x0.len() } else { strategy.dimension() };
        return Err(abort(Error::DimensionMismatch { expected: n, got }, x0, Vec::new()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(abort(Error::Contract("starting point must be finite"), x0, Vec::new()));
    }

    let started = Instant::now();
    let evals_at_start = objective.eval_count();
    let mut x = x0.to_vec();
    let mut fx = objective.eval(&x).map_err(|e| abort(e, x0, Vec::new()))?;
    let initial_value = fx;
    let mut stall = StallCounter::new(cfg.eta, cfg.stall_limit(n));
    let mut trace = Vec::with_capacity(cfg.max_iters.min(1 << 16));
    let mut stop_reason = StopReason::MaxIters;

    for k in 0..cfg.max_iters {
        let over_evals = cfg
            .budget_evals
            .is_some_and(|b| objective.eval_count() - evals_at_start >= b);
        let over_time = cfg.budget_time.is_some_and(|b| started.elapsed() >= b);
        if over_evals || over_time {
            stop_reason = StopReason::UserBudget;
            break;
        }

        let direction = strategy.next_direction(k);
        let outcome = match itoh_abe_step(objective, &x, fx, &direction.vector, &cfg) {
            Ok(o) => o,
            Err(e) => return Err(abort(e, &x, trace)),
        };
        trace.push(TraceRecord {
            iter: k,
            cumulative_evals: objective.eval_count() - evals_at_start,
            f_value: outcome.f_new,
            step_norm: outcome.displacement_norm,
            tau_implied: outcome.tau_implied,
            status: outcome.status,
            direction_index: direction.index,
        });
        let decrease = outcome.decrease();
        x = outcome.point;
        fx = outcome.f_new;
        if stall.record(decrease) {
            stop_reason = StopReason::StallLimit;
            break;
        }
    }

    Ok(RunResult {
        final_point: x,
        final_value: fx,
        initial_value,
        iterations: trace.len(),
        total_evals: objective.eval_count() - evals_at_start,
        stop_reason,
        trace,
    })
}

/// One run of an ensemble.
#[derive(Debug)]
pub struct EnsembleMember {
    pub kind: DirectionKind,
    pub seed: u64,
    pub result: std::result::Result<RunResult, RunError>,
}

/// Independent runs for every `(strategy, seed)` pair, ordered by strategy
/// and then seed. Runs execute in parallel; each builds its own objective
/// from `factory` and its own direction stream. A failing run does not affect
/// its siblings.
pub fn run_ensemble<F>(
    factory: F,
    x0: &[f64],
    strategies: &[DirectionKind],
    cfg: &SolverConfig,
    seeds: &[u64],
) -> Result<Vec<EnsembleMember>>
where
    F: Fn() -> Objective + Sync,
{
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed is required"));
    }
    if strategies.is_empty() {
        return Err(Error::config("directions", "at least one strategy is required"));
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::config("seeds", "seeds must be distinct"));
    }
    let cfg = cfg.clone().validate()?;
    let dim = factory().dimension();
    // construct every strategy up front so unsupported dimensions fail early
    let jobs: Vec<(DirectionKind, u64, DirectionStrategy)> = strategies
        .iter()
        .flat_map(|&kind| seeds.iter().map(move |&seed| (kind, seed)))
        .map(|(kind, seed)| Ok((kind, seed, DirectionStrategy::new(kind, dim, seed)?)))
        .collect::<Result<_>>()?;

    Ok(jobs
        .into_par_iter()
        .map(|(kind, seed, mut strategy)| {
            let mut objective = factory();
            let cfg = SolverConfig { seed, ..cfg.clone() };
            let result = run(&mut objective, x0, &mut strategy, &cfg);
            EnsembleMember { kind, seed, result }
        })
        .collect())
}
