use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ldpgof::harness::check::check;
use ldpgof::harness::pilot::{Pilot, PilotRun};
use ldpgof::harness::{emit, resolve_workers, run, Executor, ExperimentConfig, ExperimentKind, Format, PinnedConstants};
use ldpgof::rates::{
    adaptive_kernel, continuous_rate_bounds, discrete_rate_bounds, indistinguishable_epsilon, z_alpha, RateQuery,
};
use ldpgof::{gof, Error};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ldpgof", version, about = "Private goodness-of-fit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-I error under the null.
    Level(RunArgs),
    /// Power over alternative amplitudes.
    Power(RunArgs),
    /// Critical amplitude versus n and the fitted log-log slope.
    Rate(RunArgs),
    /// Multinomial experiments.
    Discrete(RunArgs),
    /// Level and power of the aggregated multi-resolution test.
    Adaptive(RunArgs),
    /// Rate kernels and amplitude calculators.
    Calc(CalcArgs),
    /// Refit the pinned separation constants on their pilot settings.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config: a path or an inline JSON object.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 3 when an acceptance threshold fails.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct CalcArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Resolution for the indistinguishability amplitude.
    #[arg(long = "L")]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
}

fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    match kind {
        ExperimentKind::Level => {
            cfg.n = vec![200];
            cfg.alpha = vec![1.0];
            cfg.resolution = vec![8];
            cfg.trials = 2000;
        }
        ExperimentKind::PowerCurve => {
            cfg.n = vec![1000];
            cfg.alpha = vec![1.0];
            cfg.resolution = vec![8];
            cfg.epsilon = vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25];
            cfg.at_separation = true;
        }
        ExperimentKind::RateRegression => {
            cfg.n = vec![500, 1000, 2000, 4000];
            cfg.alpha = vec![0.5];
            cfg.beta = vec![0.5];
            cfg.trials = 400;
        }
        ExperimentKind::Discrete => {
            cfg.n = vec![1000];
            cfg.alpha = vec![1.0];
            cfg.d = vec![4, 16, 64];
            cfg.epsilon = vec![0.0, 0.1, 0.2];
            cfg.at_separation = true;
        }
        ExperimentKind::Adaptive => {
            cfg.n = vec![200];
            cfg.alpha = vec![1.0];
            cfg.max_level = Some(7);
        }
    }
    cfg
}

fn load_config(kind: ExperimentKind, args: &RunArgs) -> ldpgof::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        None => default_config(kind),
        Some(text) => {
            let body = if text.trim_start().starts_with('{') {
                text.clone()
            } else {
                std::fs::read_to_string(text).map_err(|e| Error::Config(format!("cannot read {text}: {e}")))?
            };
            ExperimentConfig::from_json(&body)?
        }
    };
    if cfg.kind != kind {
        return Err(Error::Config(format!("config is for {}, not {}", cfg.kind.name(), kind.name())));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

enum Failure {
    Error(Error),
    Check(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<(), Failure> {
    let cfg = load_config(kind, args)?;
    let exec = Executor::new(resolve_workers(args.workers)?)?;
    let pinned = PinnedConstants::pinned()?;
    let result = run(&cfg, &exec, &pinned)?;
    let format = match args.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let path = emit(&result, &args.out, format)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    for (k, v) in &result.summary {
        println!("{k} = {v}");
    }
    println!("wrote {}", path.display());
    if args.check {
        let failures = check(&result);
        if !failures.is_empty() {
            return Err(Failure::Check(failures));
        }
    }
    Ok(())
}

fn calc(args: &CalcArgs) -> Result<(), Failure> {
    let query = RateQuery {
        n: args.n,
        alpha: args.alpha,
        gamma: args.gamma,
        beta: args.beta,
        s: args.s,
        radius: args.radius,
        d: args.d,
    };
    query.validate()?;
    let mut out = json!({ "query": query, "z_alpha": z_alpha(args.alpha)? });
    let bounds = match (args.s, args.d) {
        (_, Some(_)) => discrete_rate_bounds(&query)?,
        (Some(s), None) => {
            let (j, l) = gof::select_resolution(args.n, args.alpha, s, args.radius);
            out["J_star"] = json!(j);
            out["L_star"] = json!(l);
            out["adaptive_kernel"] = json!(adaptive_kernel(args.n, args.alpha, s));
            continuous_rate_bounds(&query)?
        }
        (None, None) => return Err(Error::Config("give --s for densities or --d for multinomials".into()).into()),
    };
    out["lower_kernel"] = json!(bounds.lower);
    out["upper_kernel"] = json!(bounds.upper);
    if let Some(l) = args.resolution {
        let ball = args.s.zip(args.radius);
        out["indistinguishable_epsilon"] = json!(indistinguishable_epsilon(args.n, args.alpha, l, args.gamma, args.beta, ball)?);
    }
    println!("{}", serde_json::to_string_pretty(&out).map_err(Error::from)?);
    Ok(())
}

fn calibrate(args: &CalibrateArgs) -> Result<(), Failure> {
    let exec = Executor::new(resolve_workers(args.workers)?)?;
    let fit = |pilot: Pilot| -> ldpgof::Result<_> {
        eprintln!("fitting {:?} pilot", pilot.kind);
        let pinned = PilotRun::new(&pilot, &exec)?.fit()?;
        eprintln!("  constant {} (power {})", pinned.constant, pinned.power);
        Ok(pinned)
    };
    let constants = PinnedConstants {
        version: 1,
        continuous: fit(Pilot::continuous())?,
        discrete: fit(Pilot::discrete())?,
        adaptive: fit(Pilot::adaptive())?,
    };
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    let path = Path::new(&args.out).join("constants.json");
    let body = serde_json::to_string_pretty(&constants).map_err(Error::from)?;
    std::fs::write(&path, body + "\n").map_err(Error::from)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Level(a) => run_experiment(ExperimentKind::Level, a),
        Command::Power(a) => run_experiment(ExperimentKind::PowerCurve, a),
        Command::Rate(a) => run_experiment(ExperimentKind::RateRegression, a),
        Command::Discrete(a) => run_experiment(ExperimentKind::Discrete, a),
        Command::Adaptive(a) => run_experiment(ExperimentKind::Adaptive, a),
        Command::Calc(a) => calc(a),
        Command::Calibrate(a) => calibrate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(failures)) => {
            for f in failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Hypothesis(_) | Error::Serialization(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
