mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use dgopt::checks::{run_suite, Suite};
use dgopt::{run, run_ensemble, DirectionStrategy, Error};

use output::Series;
use settings::{parse_seeds, parse_strategies, RunFlags, Settings};

#[derive(Debug, Parser)]
#[command(name = "dgopt", version, about = "Derivative-free discrete-gradient optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one optimisation and export its trace.
    Run(RunArgs),
    /// Run every strategy/seed pair and export relative-objective curves.
    Compare(CompareArgs),
    /// Run a self-check suite: dg, step or bilevel.
    Check { suite: String },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    flags: RunFlags,
    /// cyclic, random, rotated or dense2d.
    #[arg(long)]
    directions: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_trace: Option<PathBuf>,
    #[arg(long)]
    out_summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    flags: RunFlags,
    /// Comma-separated strategies.
    #[arg(long, default_value = "cyclic,random,rotated")]
    strategies: String,
    /// Comma-separated seeds.
    #[arg(long, default_value = "0,1,2,3,4,5,6,7,8,9")]
    seeds: String,
    /// Known optimal value; enables the relative objective.
    #[arg(long, allow_hyphen_values = true)]
    v_star: Option<f64>,
    /// Long-format CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn output(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }

    fn solver(error: Error) -> Self {
        let code = match error {
            Error::NonFiniteObjective { .. } | Error::Contract(_) => 3,
            _ => 2,
        };
        Failure { code, error: error.into() }
    }
}

type Outcome = Result<(), Failure>;

fn cmd_run(args: RunArgs) -> Outcome {
    let s = Settings::resolve(&args.flags, args.directions.as_deref(), args.seed, (args.out_trace, args.out_summary))
        .map_err(Failure::config)?;
    let mut objective = s.problem.objective();
    let mut strategy = DirectionStrategy::new(s.strategy, s.x0.len(), s.seed).map_err(Failure::config)?;
    let result = match run(&mut objective, &s.x0, &mut strategy, &s.solver) {
        Ok(r) => r,
        Err(e) => {
            if let Some(path) = &s.trace {
                output::write_trace(path, &e.trace).map_err(Failure::output)?;
            }
            let mut f = Failure::solver(e.source);
            f.error = f.error.context(format!("run aborted after {} steps", e.trace.len()));
            return Err(f);
        }
    };
    if let Some(path) = &s.trace {
        output::write_trace(path, &result.trace).map_err(Failure::output)?;
    }
    if let Some(path) = &s.summary {
        output::write_summary(path, &result).map_err(Failure::output)?;
    }
    println!("{}\n{}", output::SUMMARY_HEADER, output::summary_line(&result));
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Outcome {
    let s = Settings::resolve(&args.flags, None, None, (None, None)).map_err(Failure::config)?;
    let kinds = parse_strategies(&args.strategies).map_err(Failure::config)?;
    let seeds = parse_seeds(&args.seeds).map_err(Failure::config)?;
    if let Some(v) = args.v_star {
        if !v.is_finite() {
            return Err(Failure::config(anyhow!("v_star must be finite")));
        }
    }
    let problem = &s.problem;
    let members = run_ensemble(|| problem.objective(), &s.x0, &kinds, &s.solver, &seeds).map_err(Failure::solver)?;
    let mut series = Vec::with_capacity(members.len());
    for m in members {
        let r = m.result.map_err(|e| {
            let mut f = Failure::solver(e.source);
            f.error = f.error.context(format!("{} seed {}", m.kind.name(), m.seed));
            f
        })?;
        series.push(Series::new(m.kind, m.seed, &r, args.v_star));
    }
    let csv = output::compare_csv(&series);
    match &args.out {
        Some(path) => output::write_atomic(path, |w| w.write_all(csv.as_bytes())).map_err(Failure::output)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        let svg = output::compare_svg(&series);
        output::write_atomic(path, |w| w.write_all(svg.as_bytes())).map_err(Failure::output)?;
    }
    Ok(())
}

fn cmd_check(suite: &str) -> Outcome {
    let suite: Suite = suite.parse().map_err(|e: Error| Failure::config(e))?;
    let results = run_suite(suite);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure { code: 1, error: anyhow!("{failed} of {} checks failed", results.len()) });
    }
    println!("all {} checks passed", results.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Check { suite } => cmd_check(&suite),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
