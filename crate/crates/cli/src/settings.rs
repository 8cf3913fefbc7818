//! Run settings: an optional TOML file overlaid by command-line flags.
//!
//! ```toml
//! [problem]
//! name = "bilevel-wavelet"   # rosenbrock | nesterov | narrow | bilevel-wavelet | bilevel-tv
//! x0 = [0.0]
//! levels = 3
//!
//! [solver]
//! preset = "smooth"          # smooth | nonsmooth
//! tau_min = 1e-4
//! stall_m = 30
//!
//! [directions]
//! strategy = "random"
//! seed = 7
//!
//! [output]
//! trace = "trace.csv"
//! summary = "summary.csv"
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use dgopt::problems::{BilevelProblem, ImageGrid, InnerSolver, Score};
use dgopt::{DirectionKind, SolverConfig};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub directions: DirectionsSection,
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    pub name: Option<String>,
    pub x0: Option<Vec<f64>>,
    /// Steepness of the `narrow` problem.
    pub n: Option<f64>,
    pub score: Option<String>,
    pub pdhg_iters: Option<usize>,
    pub levels: Option<usize>,
    pub threshold_approx: Option<bool>,
    pub noise_sigma: Option<f64>,
    pub noise_seed: Option<u64>,
    /// `synthetic` or a path to a binary PGM.
    pub image: Option<String>,
    /// Side length of the synthetic image.
    pub size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub preset: Option<String>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub stall_m: Option<usize>,
    pub max_iters: Option<usize>,
    pub sigma: Option<f64>,
    pub budget_evals: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub expansion_cap: Option<u32>,
    pub parabolic_cap: Option<u32>,
    pub clamp_cap: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectionsSection {
    pub strategy: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow!("{}: {}", path.display(), e.message()))
    }
}

/// Flags shared by `run` and `compare`. Flags win over the config file.
#[derive(Debug, Default, Args)]
pub struct RunFlags {
    /// TOML config file with [problem], [solver], [directions] and [output] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// rosenbrock, nesterov, narrow, bilevel-wavelet or bilevel-tv.
    #[arg(long)]
    pub problem: Option<String>,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Parameter preset: smooth or nonsmooth.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub tau_min: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Probe length.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Stall threshold on the per-step decrease.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Consecutive stalls before stopping.
    #[arg(long)]
    pub stall_m: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Expansion factor of the bracket search.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub budget_evals: Option<u64>,
    /// Wall-clock budget. Runs using it are not reproducible.
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Steepness of the narrow problem.
    #[arg(long)]
    pub narrow_n: Option<f64>,
    /// Bilevel score: l2 or ssim.
    #[arg(long)]
    pub score: Option<String>,
    #[arg(long)]
    pub pdhg_iters: Option<usize>,
    /// Haar levels for bilevel-wavelet.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub noise_seed: Option<u64>,
    /// `synthetic` or a binary PGM path.
    #[arg(long)]
    pub image: Option<String>,
}

#[derive(Debug, Clone)]
pub enum Problem {
    Rosenbrock,
    Nesterov,
    Narrow { n: f64 },
    Bilevel(BilevelProblem),
}

impl Problem {
    pub fn dimension(&self) -> usize {
        match self {
            Problem::Bilevel(_) => 1,
            _ => 2,
        }
    }

    pub fn default_x0(&self) -> Vec<f64> {
        match self {
            Problem::Rosenbrock => vec![-1.0, 1.0],
            Problem::Nesterov => vec![-1.0, -1.0],
            Problem::Narrow { .. } => vec![1.0, 0.5],
            Problem::Bilevel(_) => vec![0.0],
        }
    }

    pub fn objective(&self) -> dgopt::Objective {
        use dgopt::problems::{narrow_descent, nesterov_nonsmooth, rosenbrock};
        let built = match self {
            Problem::Rosenbrock => dgopt::Objective::new(2, rosenbrock),
            Problem::Nesterov => dgopt::Objective::new(2, nesterov_nonsmooth),
            Problem::Narrow { n } => {
                let n = *n;
                dgopt::Objective::new(2, move |p: &[f64]| narrow_descent(p, n))
            }
            Problem::Bilevel(p) => return p.clone().into_objective(),
        };
        built.expect("benchmark dimension is fixed")
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub problem: Problem,
    pub x0: Vec<f64>,
    pub solver: SolverConfig,
    pub strategy: DirectionKind,
    pub seed: u64,
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn parse_strategy(name: &str) -> Result<DirectionKind> {
    name.parse().map_err(|e: dgopt::Error| anyhow!("{e}"))
}

pub fn parse_strategies(list: &str) -> Result<Vec<DirectionKind>> {
    let kinds = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_strategy)
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        bail!("strategy list is empty");
    }
    Ok(kinds)
}

pub fn parse_seeds(list: &str) -> Result<Vec<u64>> {
    let seeds = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| anyhow!("invalid seed `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    if seeds.is_empty() {
        bail!("seed list is empty");
    }
    Ok(seeds)
}

fn build_problem(flags: &RunFlags, file: &ProblemSection) -> Result<Problem> {
    let name = pick(flags.problem.clone(), file.name.clone()).unwrap_or_else(|| "rosenbrock".into());
    let inner = match name.as_str() {
        "rosenbrock" => return Ok(Problem::Rosenbrock),
        "nesterov" => return Ok(Problem::Nesterov),
        "narrow" => {
            let n = pick(flags.narrow_n, file.n).unwrap_or(10.0);
            if !(n.is_finite() && n > 0.0) {
                bail!("narrow_n must be positive, got {n}");
            }
            return Ok(Problem::Narrow { n });
        }
        "bilevel-wavelet" => InnerSolver::WaveletShrinkage {
            levels: pick(flags.levels, file.levels).unwrap_or(3),
            threshold_approx: file.threshold_approx.unwrap_or(false),
        },
        "bilevel-tv" => InnerSolver::TvDenoisePdhg {
            iters: pick(flags.pdhg_iters, file.pdhg_iters).unwrap_or(dgopt::problems::tv::DEFAULT_PDHG_ITERS),
        },
        other => bail!("unknown problem `{other}` (expected rosenbrock, nesterov, narrow, bilevel-wavelet or bilevel-tv)"),
    };
    let default_score = if name == "bilevel-tv" { "ssim" } else { "l2" };
    let score = match pick(flags.score.as_deref(), file.score.as_deref()).unwrap_or(default_score) {
        "l2" => Score::L2,
        "ssim" => Score::Ssim,
        other => bail!("unknown score `{other}` (expected l2 or ssim)"),
    };
    let sigma = pick(flags.noise_sigma, file.noise_sigma).unwrap_or(0.1);
    let noise_seed = pick(flags.noise_seed, file.noise_seed).unwrap_or(7);
    let clean = match pick(flags.image.as_deref(), file.image.as_deref()).unwrap_or("synthetic") {
        "synthetic" => {
            let size = file.size.unwrap_or(32);
            ImageGrid::synthetic_squares(size, size)?
        }
        path => {
            let f = std::fs::File::open(path).with_context(|| format!("opening image {path}"))?;
            ImageGrid::read_pgm(std::io::BufReader::new(f)).with_context(|| format!("reading image {path}"))?
        }
    };
    let noisy = clean.with_gaussian_noise(sigma, noise_seed)?;
    Ok(Problem::Bilevel(BilevelProblem::new(clean, noisy, inner, score)?))
}

fn build_solver(flags: &RunFlags, file: &SolverSection, seed: u64) -> Result<SolverConfig> {
    let mut cfg = match pick(flags.preset.as_deref(), file.preset.as_deref()).unwrap_or("smooth") {
        "smooth" => SolverConfig::smooth_benchmark(),
        "nonsmooth" => SolverConfig::nonsmooth_benchmark(),
        other => bail!("unknown preset `{other}` (expected smooth or nonsmooth)"),
    };
    if let Some(v) = pick(flags.tau_min, file.tau_min) {
        cfg.tau_min = v;
    }
    if let Some(v) = pick(flags.tau_max, file.tau_max) {
        cfg.tau_max = v;
    }
    if let Some(v) = pick(flags.eps, file.eps) {
        cfg.probe_eps = v;
    }
    if let Some(v) = pick(flags.eta, file.eta) {
        cfg.eta = v;
    }
    if let Some(v) = pick(flags.stall_m, file.stall_m) {
        cfg.max_stall = Some(v);
    }
    if let Some(v) = pick(flags.max_iters, file.max_iters) {
        cfg.max_iters = v;
    }
    if let Some(v) = pick(flags.sigma, file.sigma) {
        cfg.sigma = v;
    }
    cfg.budget_evals = pick(flags.budget_evals, file.budget_evals);
    if let Some(secs) = pick(flags.budget_seconds, file.budget_seconds) {
        cfg.budget_time = Some(Duration::try_from_secs_f64(secs).map_err(|_| anyhow!("budget_seconds must be non-negative, got {secs}"))?);
    }
    if let Some(v) = file.expansion_cap {
        cfg.caps.expansion = v;
    }
    if let Some(v) = file.parabolic_cap {
        cfg.caps.parabolic = v;
    }
    if let Some(v) = file.clamp_cap {
        cfg.caps.clamp = v;
    }
    cfg.seed = seed;
    Ok(cfg.validate()?)
}

impl Settings {
    /// Resolves flags against the optional config file. Every failure here
    /// is a configuration error.
    pub fn resolve(flags: &RunFlags, directions: Option<&str>, seed: Option<u64>, out: (Option<PathBuf>, Option<PathBuf>)) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let problem = build_problem(flags, &file.problem)?;
        let seed = pick(seed, file.directions.seed).unwrap_or(0);
        let strategy = parse_strategy(pick(directions, file.directions.strategy.as_deref()).unwrap_or("random"))?;
        let solver = build_solver(flags, &file.solver, seed)?;
        let x0 = pick(flags.x0.clone(), file.problem.x0.clone()).unwrap_or_else(|| problem.default_x0());
        if x0.len() != problem.dimension() {
            bail!("x0 has {} entries but the problem has dimension {}", x0.len(), problem.dimension());
        }
        if x0.iter().any(|v| !v.is_finite()) {
            bail!("x0 must be finite");
        }
        dgopt::DirectionStrategy::new(strategy, problem.dimension(), seed)?;
        Ok(Settings {
            problem,
            x0,
            solver,
            strategy,
            seed,
            trace: pick(out.0, file.output.trace),
            summary: pick(out.1, file.output.summary),
        })
    }
}
