//! `dgpfit`: fit discrete generalised Pareto and negative binomial models to
//! claim-count tables.
//!
//! Exit status: 0 when everything succeeded, 1 when at least one model fit
//! failed, 2 on input, output or configuration errors.

mod report;
mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dgpfit::data::{describe, parse_input, Dataset};
use dgpfit::fit::CoolingSchedule;
use dgpfit::{CountSample, DgpParams, FailurePolicy, FitConfig, MuMode, NbParams};
use sha2::{Digest, Sha256};

use report::{ConfigEcho, DescribeReport, FitEcho, GroupStats, RunReport, SCHEMA_VERSION};
use run::{ModelChoice, Settings, AGGREGATE_TASK};

#[derive(Parser)]
#[command(name = "dgpfit", version, about = "Fit heavy-tailed count models to claim-frequency data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics per group.
    Describe(DescribeArgs),
    /// Maximum-likelihood fits with optional bootstrap standard errors.
    Fit(FitArgs),
    /// Fit both models and report only AIC/BIC.
    Compare(CompareArgs),
    /// Draw a raw sample from a model.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct Output {
    /// Print the JSON report instead of text tables.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DescribeArgs {
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum MuModeArg {
    Fixed,
    Free,
}

#[derive(Args)]
struct FitOptions {
    input: PathBuf,
    /// Also fit the pooled sample of all groups.
    #[arg(long)]
    aggregate: bool,
    /// Bootstrap replicates for standard errors.
    #[arg(long, value_name = "B")]
    bootstrap: Option<usize>,
    /// Run seed; every random stream is derived from it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "fixed")]
    mu_mode: MuModeArg,
    #[arg(long, default_value_t = 10_000)]
    anneal_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum, default_value = "both")]
    model: ModelChoice,
    #[command(flatten)]
    options: FitOptions,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    options: FitOptions,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimModel {
    Dgp,
    Nb,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: SimModel,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    mu: u64,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: &Path) -> anyhow::Result<(Vec<u8>, Dataset)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let data = parse_input(bytes.as_slice()).with_context(|| format!("invalid input {}", path.display()))?;
    Ok((bytes, data))
}

fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn groups(data: Dataset) -> anyhow::Result<Vec<(String, Option<CountSample>)>> {
    Ok(match data {
        Dataset::Raw(s) => vec![("sample".to_string(), Some(s))],
        Dataset::Table(t) => t
            .group_labels()
            .iter()
            .map(|g| (g.clone(), t.expand(g).ok()))
            .collect(),
    })
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("warning: no --seed given, using 0; pass an explicit seed for reproducible publication runs");
        0
    })
}

fn emit(json: &str, text: &str, output: &Output) -> anyhow::Result<()> {
    if let Some(path) = &output.out {
        fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut stdout = std::io::stdout().lock();
    if output.json {
        stdout.write_all(json.as_bytes())?;
    } else {
        stdout.write_all(text.as_bytes())?;
    }
    Ok(())
}

fn cmd_describe(args: DescribeArgs) -> anyhow::Result<ExitCode> {
    let (bytes, data) = read_input(&args.input)?;
    let groups = groups(data)?
        .into_iter()
        .map(|(label, sample)| {
            let stats = sample
                .ok_or(dgpfit::Error::EmptySample)
                .and_then(|s| describe(&s));
            match stats {
                Ok(s) => GroupStats { label, stats: Some(s), error: None },
                Err(e) => GroupStats { label, stats: None, error: Some(e.to_string()) },
            }
        })
        .collect::<Vec<_>>();
    let failed = groups.iter().any(|g| g.error.is_some());
    let report = DescribeReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "describe",
        input_digest: digest(&bytes),
        groups,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    emit(&json, &report::describe_text(&report), &args.output)?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_fit(model: ModelChoice, opts: FitOptions, scores_only: bool) -> anyhow::Result<ExitCode> {
    let fit = FitConfig {
        annealing_iterations: opts.anneal_iters,
        mu_mode: match opts.mu_mode {
            MuModeArg::Fixed => MuMode::FixedAtMin,
            MuModeArg::Free => MuMode::FreeContinuous,
        },
        tolerance: opts.tolerance,
        ..FitConfig::default()
    };
    fit.validate()?;
    if opts.bootstrap.is_some_and(|b| b < 2) {
        bail!("--bootstrap needs at least 2 replicates");
    }
    let (bytes, data) = read_input(&opts.input)?;
    let seed = resolve_seed(opts.seed);
    let settings = Settings {
        models: model.models(),
        bootstrap: opts.bootstrap,
        seed,
        fit: fit.clone(),
        parallel: opts.jobs != 1,
        scores_only,
    };

    let groups = groups(data)?;
    let pooled: Vec<u64> = groups
        .iter()
        .filter_map(|(_, s)| s.as_ref())
        .flat_map(|s| s.values().iter().copied())
        .collect();
    let mut tasks = Vec::new();
    let mut empty = Vec::new();
    for (i, (label, sample)) in groups.into_iter().enumerate() {
        match sample {
            Some(s) => tasks.push((label, i as u64, s)),
            None => empty.push((i, label)),
        }
    }
    let aggregate_sample = if opts.aggregate {
        match CountSample::new(pooled) {
            Ok(s) => Some(s),
            Err(e) => bail!("cannot aggregate: {e}"),
        }
    } else {
        None
    };
    if let Some(s) = &aggregate_sample {
        tasks.push(("aggregate".to_string(), AGGREGATE_TASK, s.clone()));
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build()?;
    let mut results = pool.install(|| run::fit_all(&tasks, &settings));
    let aggregate = aggregate_sample.is_some().then(|| results.pop()).flatten();
    for (i, label) in empty {
        results.insert(
            i,
            report::GroupReport {
                label,
                n: 0,
                fits: (!scores_only).then(Vec::new),
                failures: settings
                    .models
                    .iter()
                    .map(|&m| report::ModelFailure {
                        model: m,
                        error: dgpfit::Error::EmptySample.to_string(),
                    })
                    .collect(),
                comparison: None,
            },
        );
    }

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: if scores_only { "compare" } else { "fit" },
        input_digest: digest(&bytes),
        config_echo: ConfigEcho {
            model: model.name(),
            aggregate: opts.aggregate,
            bootstrap_replicates: opts.bootstrap,
            bootstrap_failure_policy: FailurePolicy::SkipAndCount,
            seed,
            fit: FitEcho {
                annealing_iterations: fit.annealing_iterations,
                annealing_initial_temperature: fit.annealing_initial_temperature,
                cooling_schedule: CoolingSchedule::Logarithmic,
                refine_locally: fit.refine_locally,
                mu_mode: fit.mu_mode,
                tolerance: fit.tolerance,
            },
        },
        groups: results,
        aggregate,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    let text = report::fit_text(&report, &settings.models, scores_only);
    emit(&json, &text, &opts.output)?;
    Ok(if report.has_failures() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn require(value: Option<f64>, flag: &str) -> anyhow::Result<f64> {
    value.with_context(|| format!("--{flag} is required for this model"))
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    let (header, sample) = match args.model {
        SimModel::Dgp => {
            let p = DgpParams::new(require(args.alpha, "alpha")?, require(args.lambda, "lambda")?, args.mu)?;
            (
                format!(
                    "# model=dgp alpha={} lambda={} mu={} n={} seed={seed}",
                    p.alpha(),
                    p.lambda(),
                    args.mu,
                    args.n
                ),
                p.sample(seed, args.n)?,
            )
        }
        SimModel::Nb => {
            let p = NbParams::new(require(args.r, "r")?, require(args.m, "m")?)?;
            (
                format!("# model=nb r={} m={} n={} seed={seed}", p.r(), p.m(), args.n),
                p.sample(seed, args.n)?,
            )
        }
    };
    let mut text = header + "\ncount\n";
    for v in sample.values() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Describe(args) => cmd_describe(args),
        Command::Fit(args) => cmd_fit(args.model, args.options, false),
        Command::Compare(args) => cmd_fit(ModelChoice::Both, args.options, true),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
