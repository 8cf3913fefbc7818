//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dgopt::discrete_gradient::{itoh_abe_dg, rotated_itoh_abe_dg, RotatedFrame};
use dgopt::problems::{
    max_coords, nesterov_nonsmooth, rosenbrock, tv_denoise_pdhg, BilevelProblem, ImageGrid,
    InnerSolver, Score,
};
use dgopt::trace::write_csv;
use dgopt::{
    itoh_abe_step, run, run_ensemble, DirectionKind, DirectionStrategy, Objective, RunResult,
    SolverConfig, StepStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

/// Evaluations spent when the trace first drops below `threshold`.
fn evals_to_reach(result: &RunResult, threshold: f64) -> Option<u64> {
    result.trace.iter().find(|r| r.f_value < threshold).map(|r| r.cumulative_evals)
}

/// Runs shared by several criteria.
struct Runs {
    rosenbrock: Vec<(DirectionKind, u64, RunResult)>,
    nesterov_random: Vec<(u64, RunResult)>,
    nesterov_cyclic: RunResult,
    rosenbrock_cfg: SolverConfig,
    nesterov_cfg: SolverConfig,
    elapsed_rosenbrock: Duration,
    elapsed_nesterov: Duration,
}

fn shared_runs() -> Runs {
    let rosenbrock_cfg = SolverConfig { budget_evals: Some(100_000), ..SolverConfig::smooth_benchmark() };
    let start = Instant::now();
    let rosenbrock = run_ensemble(
        || Objective::new(2, rosenbrock).unwrap(),
        &[-1.0, 1.0],
        &[DirectionKind::RandomPursuit, DirectionKind::RotatedBlocks],
        &rosenbrock_cfg,
        &SEEDS,
    )
    .expect("rosenbrock ensemble")
    .into_iter()
    .map(|m| (m.kind, m.seed, m.result.expect("rosenbrock run")))
    .collect();
    let elapsed_rosenbrock = start.elapsed();

    let nesterov_cfg = SolverConfig { budget_evals: Some(200_000), ..SolverConfig::nonsmooth_benchmark() };
    let start = Instant::now();
    let nesterov_random = run_ensemble(
        || Objective::new(2, nesterov_nonsmooth).unwrap(),
        &[-1.0, -1.0],
        &[DirectionKind::RandomPursuit],
        &nesterov_cfg,
        &SEEDS,
    )
    .expect("nesterov ensemble")
    .into_iter()
    .map(|m| (m.seed, m.result.expect("nesterov run")))
    .collect();
    let mut objective = Objective::new(2, nesterov_nonsmooth).unwrap();
    let mut cyclic = DirectionStrategy::new(DirectionKind::CyclicCoordinates, 2, 0).unwrap();
    let nesterov_cyclic = run(&mut objective, &[-1.0, -1.0], &mut cyclic, &nesterov_cfg).expect("cyclic run");
    let elapsed_nesterov = start.elapsed();

    Runs {
        rosenbrock,
        nesterov_random,
        nesterov_cyclic,
        rosenbrock_cfg,
        nesterov_cfg,
        elapsed_rosenbrock,
        elapsed_nesterov,
    }
}

impl Runs {
    fn all(&self) -> impl Iterator<Item = (&RunResult, &SolverConfig)> {
        let r = self.rosenbrock.iter().map(move |(_, _, r)| (r, &self.rosenbrock_cfg));
        let n = self.nesterov_random.iter().map(move |(_, r)| (r, &self.nesterov_cfg));
        r.chain(n).chain(std::iter::once((&self.nesterov_cyclic, &self.nesterov_cfg)))
    }
}

fn dissipation(runs: &Runs) -> Verdict {
    let mut steps = 0usize;
    let mut worst: f64 = 0.0;
    let mut out_of_band = 0usize;
    for (result, cfg) in runs.all() {
        let mut prev = result.initial_value;
        for rec in &result.trace {
            if rec.status == StepStatus::Accepted {
                let tau = rec.tau_implied.expect("accepted step reports tau");
                let sq = rec.step_norm * rec.step_norm;
                worst = worst.max(((prev - rec.f_value) * tau - sq).abs() / sq);
                if !(cfg.tau_min..=cfg.tau_max).contains(&tau) {
                    out_of_band += 1;
                }
                steps += 1;
            }
            prev = rec.f_value;
        }
    }
    verdict(
        steps >= 10_000 && worst <= 1e-9 && out_of_band == 0,
        format!("{steps} accepted steps, max relative defect {worst:.2e}, {out_of_band} tau outside band"),
    )
}

fn monotone(runs: &Runs) -> Verdict {
    let mut traces = 0;
    let mut violations = 0;
    for (result, _) in runs.all() {
        let mut prev = result.initial_value;
        for rec in &result.trace {
            if rec.f_value > prev {
                violations += 1;
            }
            prev = rec.f_value;
        }
        traces += 1;
    }
    verdict(violations == 0, format!("{traces} traces, {violations} increases"))
}

/// Random objective mixing smooth and kinked terms.
fn random_objective(rng: &mut ChaCha8Rng, n: usize) -> Objective {
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Objective::new(n, move |x: &[f64]| {
        let mut v = 0.0;
        for i in 0..n {
            v += a[i] * x[i] * x[i] + b[i] * (x[i] * c[i]).sin() + (x[i] - c[i]).abs();
            if i + 1 < n {
                v += b[i] * x[i] * x[i + 1];
            }
        }
        v
    })
    .unwrap()
}

fn dg_consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let mut v = random_objective(&mut rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let frame = RotatedFrame::random(&mut rng, n);
        let fx = v.eval(&x).unwrap();
        let fy = v.eval(&y).unwrap();
        let scale = fx.abs().max(fy.abs());
        for g in [itoh_abe_dg(&mut v, &x, &y).unwrap(), rotated_itoh_abe_dg(&mut v, &x, &y, &frame).unwrap()] {
            let inner: f64 = g.iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
            worst = worst.max((inner - (fy - fx)).abs() / scale);
        }
    }
    verdict(worst <= 1e-9, format!("100 instances, max relative defect {worst:.2e}"))
}

fn scalar_oracle() -> Verdict {
    let cfg = SolverConfig { tau_min: 1.0, tau_max: 1.0, ..SolverConfig::smooth_benchmark() };
    let mut v = Objective::new(1, |x: &[f64]| 0.5 * x[0] * x[0]).unwrap();
    // Root of (V(x) - V(y)) = (x - y)^2 for x = 1: y = 1/3.
    let oracle = 1.0 / 3.0;
    let mut ok = true;
    let mut ys = Vec::new();
    for d in [[1.0], [-1.0]] {
        let out = itoh_abe_step(&mut v, &[1.0], 0.5, &d, &cfg).unwrap();
        ok &= out.status == StepStatus::Accepted && (out.point[0] - oracle).abs() <= 1e-6;
        ys.push(out.point[0]);
    }
    verdict(ok, format!("y = {:.10} / {:.10} for d = +1 / -1", ys[0], ys[1]))
}

fn rosenbrock_convergence(runs: &Runs) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [DirectionKind::RandomPursuit, DirectionKind::RotatedBlocks] {
        let hits = runs
            .rosenbrock
            .iter()
            .filter(|(k, _, r)| *k == kind && evals_to_reach(r, 1e-6).is_some_and(|e| e <= 100_000))
            .count();
        ok &= hits >= 9;
        parts.push(format!("{}: {hits}/10", kind.name()));
    }
    let secs = runs.elapsed_rosenbrock.as_secs_f64();
    ok &= secs < 30.0;
    verdict(ok, format!("{} ({secs:.2}s)", parts.join(", ")))
}

fn nesterov_contrast(runs: &Runs) -> Verdict {
    let cyclic = runs.nesterov_cyclic.final_value;
    let worst_random = runs.nesterov_random.iter().map(|(_, r)| r.final_value).fold(0.0, f64::max);
    let beaten = runs.nesterov_random.iter().filter(|(_, r)| cyclic >= 10.0 * r.final_value).count();
    verdict(
        beaten == SEEDS.len(),
        format!("cyclic final {cyclic:.3e}, worst random final {worst_random:.3e}, {beaten}/10 seeds at factor >= 10"),
    )
}

fn nesterov_accuracy(runs: &Runs) -> Verdict {
    let hits = runs
        .nesterov_random
        .iter()
        .filter(|(_, r)| evals_to_reach(r, 1e-6).is_some_and(|e| e <= 200_000))
        .count();
    let secs = runs.elapsed_nesterov.as_secs_f64();
    verdict(hits >= 7 && secs < 120.0, format!("{hits}/10 seeds below 1e-6 ({secs:.2}s)"))
}

fn max_coords_stall() -> Verdict {
    let cfg = SolverConfig::smooth_benchmark();
    let mut v = Objective::new(2, max_coords).unwrap();
    let x = [1.0, 1.0];
    let fx = max_coords(&x);
    let stalled = [[1.0, 0.0], [0.0, 1.0]]
        .iter()
        .all(|d| itoh_abe_step(&mut v, &x, fx, d, &cfg).unwrap().status == StepStatus::StationaryAlongDirection);
    let mut counts = Vec::new();
    for kind in [DirectionKind::RandomPursuit, DirectionKind::DeterministicDense] {
        let mut s = DirectionStrategy::new(kind, 2, 3).unwrap();
        let accepted = (0..100)
            .filter(|&k| {
                let d = s.next_direction(k).vector;
                itoh_abe_step(&mut v, &x, fx, &d, &cfg).unwrap().status == StepStatus::Accepted
            })
            .count();
        counts.push((kind, accepted));
    }
    let detail = counts.iter().map(|(k, c)| format!("{}: {c}/100 accepted", k.name())).collect::<Vec<_>>();
    verdict(
        stalled && counts.iter().all(|&(_, c)| c >= 1),
        format!("coordinates stationary: {stalled}; {}", detail.join(", ")),
    )
}

fn bilevel_wavelet() -> Verdict {
    let inner = InnerSolver::WaveletShrinkage { levels: 3, threshold_approx: false };
    let problem = BilevelProblem::synthetic(32, 0.1, 7, inner, Score::L2).unwrap();
    let grid_min = (0..=2000)
        .map(|i| problem.value(-10.0 + 15.0 * i as f64 / 2000.0).unwrap())
        .fold(f64::INFINITY, f64::min);
    let cfg = SolverConfig {
        probe_eps: 1e-4,
        tau_min: 1e-1,
        tau_max: 1e1,
        eta: 1e-12,
        max_stall: Some(5),
        max_iters: 500,
        ..SolverConfig::smooth_benchmark()
    };
    let mut objective = problem.into_objective();
    let mut s = DirectionStrategy::new(DirectionKind::RandomPursuit, 1, 0).unwrap();
    let r = run(&mut objective, &[0.0], &mut s, &cfg).unwrap();
    verdict(
        r.final_value <= grid_min + 1e-3,
        format!("final V {:.6} at log-alpha {:.4}, grid minimum {grid_min:.6}", r.final_value, r.final_point[0]),
    )
}

fn two_pixel_tv() -> Verdict {
    let f = ImageGrid::new(2, 1, vec![0.0, 2.0]).unwrap();
    let u = tv_denoise_pdhg(&f, 0.5, dgopt::problems::tv::DEFAULT_PDHG_ITERS).unwrap();
    let p = u.pixels();
    verdict(
        (p[0] - 0.5).abs() <= 1e-4 && (p[1] - 1.5).abs() <= 1e-4,
        format!("u = ({:.8}, {:.8})", p[0], p[1]),
    )
}

fn trace_bytes(kind: DirectionKind, seed: u64) -> Vec<u8> {
    let cfg = SolverConfig { seed, max_iters: 3000, ..SolverConfig::smooth_benchmark() };
    let mut v = Objective::new(2, rosenbrock).unwrap();
    let mut s = DirectionStrategy::new(kind, 2, seed).unwrap();
    let r = run(&mut v, &[-1.0, 1.0], &mut s, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    write_csv(&r.trace, std::fs::File::create(&path).unwrap()).unwrap();
    std::fs::read(&path).unwrap()
}

fn reproducibility() -> Verdict {
    let mut identical = 0;
    let mut total = 0;
    for kind in DirectionKind::ALL {
        for seed in [1, 42] {
            total += 1;
            let a = trace_bytes(kind, seed);
            if !a.is_empty() && a == trace_bytes(kind, seed) {
                identical += 1;
            }
        }
    }
    verdict(identical == total, format!("{identical}/{total} repeated runs byte-identical"))
}

/// Name, runtime limit in seconds, check.
type Criterion<'a> = (&'static str, f64, Box<dyn Fn() -> Verdict + 'a>);

fn main() -> ExitCode {
    let runs = shared_runs();
    let criteria: Vec<Criterion> = vec![
        ("dissipation identity", 60.0, Box::new(|| dissipation(&runs))),
        ("monotone descent", f64::INFINITY, Box::new(|| monotone(&runs))),
        ("discrete-gradient consistency", 5.0, Box::new(dg_consistency)),
        ("scalar-step oracle", 1.0, Box::new(scalar_oracle)),
        ("rosenbrock convergence", f64::INFINITY, Box::new(|| rosenbrock_convergence(&runs))),
        ("nonsmooth stagnation contrast", 60.0, Box::new(|| nesterov_contrast(&runs))),
        ("nesterov accuracy", f64::INFINITY, Box::new(|| nesterov_accuracy(&runs))),
        ("single-step stall", 1.0, Box::new(max_coords_stall)),
        ("bilevel wavelet oracle", 60.0, Box::new(bilevel_wavelet)),
        ("two-pixel tv oracle", 1.0, Box::new(two_pixel_tv)),
        ("reproducibility", 10.0, Box::new(reproducibility)),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut v = check();
        let secs = start.elapsed().as_secs_f64();
        if secs >= *limit {
            v.passed = false;
            v.detail.push_str(&format!("; exceeded {limit}s"));
        }
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {} [{secs:.3}s]", i + 1, v.detail);
        failures += usize::from(!v.passed);
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}

