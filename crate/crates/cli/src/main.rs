//! Command-line front end: classification, subordinator audits, spectral
//! sums, and the replicated rate experiments.
//!
//! Every subcommand prints a JSON report to stdout (tables additionally go
//! to CSV files under `--out-dir`). The process exits nonzero exactly when a
//! verdict-producing check fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sublab::bernstein::{self, BernsteinFunction};
use sublab::harness::{
    self, brackets, BernsteinConfig, ExperimentConfig, SandwichVerdict,
};
use sublab::spectral::{self, LimitSum, SpectralData, SpectralSource};
use sublab::subordinator;

#[derive(Parser)]
#[command(
    name = "sublab",
    about = "Empirical measures of subordinated diffusions: simulation and rate checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a Laplace exponent: growth classes, comparison constants and
    /// the heat-trace integrability condition.
    Classify(ClassifyArgs),
    /// Monte Carlo conformance audits.
    Validate {
        #[command(subcommand)]
        target: ValidateCmd,
    },
    /// Spectral limit sum with certified truncation.
    Spectral(SpectralArgs),
    /// Run a replicated experiment and write its rate table.
    Simulate(RunArgs),
    /// Simulate, then fit the log-log convergence slope.
    Rates(RunArgs),
    /// Bracket t·E[W2²] between the spectral limit sums.
    Sandwich(RunArgs),
    /// Lower-bound floor, quantizer scaling and dual certificates.
    LowerBounds(RunArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Family tag: linear | stable | b1 | b2 | gamma
    #[arg(long)]
    family: String,
    /// Class exponent to test membership at.
    #[arg(long)]
    alpha: f64,
    /// Family parameter for stable/b1 (defaults to --alpha).
    #[arg(long)]
    family_alpha: Option<f64>,
    /// Dimension for the integrability condition.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Time for the integrability condition.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// Check E[e^{-λ S_t}] against e^{-t B(λ)}.
    Subordinator {
        #[arg(long)]
        family: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: f64,
        #[arg(short = 'n', long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SpectralArgs {
    /// Spectrum source: circle | torus | interval | ou
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    circumference: f64,
    #[arg(long, default_value_t = 1.0)]
    side: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Laplace exponent family.
    #[arg(long)]
    family: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// Coefficient of the sum (2 or 8 in the sandwich).
    #[arg(long, default_value_t = 2.0)]
    coef: f64,
    /// Certified truncation tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Spectral table size.
    #[arg(long, default_value_t = 8192)]
    modes: usize,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Shrink replica budgets and drop the largest horizon (smoke mode).
    #[arg(long)]
    fast: bool,
    /// Directory for CSV/JSON outputs.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Fit window lower edge (rates only; defaults to the full grid).
    #[arg(long)]
    window_lo: Option<f64>,
    /// Fit window upper edge.
    #[arg(long)]
    window_hi: Option<f64>,
}

fn main() -> ExitCode {
    match run() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Classify(args) => classify(args),
        Cmd::Validate { target } => validate(target),
        Cmd::Spectral(args) => spectral_sum(args),
        Cmd::Simulate(args) => simulate(args, false),
        Cmd::Rates(args) => simulate(args, true),
        Cmd::Sandwich(args) => sandwich(args),
        Cmd::LowerBounds(args) => lower_bounds(args),
    }
}

fn build_family(family: &str, alpha: Option<f64>) -> Result<BernsteinFunction> {
    Ok(BernsteinConfig::new(family, alpha).build()?)
}

fn classify(args: ClassifyArgs) -> Result<bool> {
    let family_alpha = args.family_alpha.or(Some(args.alpha));
    let b = build_family(&args.family, family_alpha)?;
    let grid = bernstein::default_probe_grid();
    let mut report = bernstein::classify(&b, args.alpha, &grid)?;
    report.condition_1_2 = Some(bernstein::check_condition_1_2(&b, args.d, args.t)?);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}

fn validate(cmd: ValidateCmd) -> Result<bool> {
    match cmd {
        ValidateCmd::Subordinator { family, alpha, lambda, t, n, seed } => {
            let b = build_family(&family, alpha)?;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let check = subordinator::validate_laplace(&b, lambda, t, n, &mut rng)?;
            println!("{}", serde_json::to_string_pretty(&check)?);
            Ok(check.z.abs() <= brackets::Z_LIMIT)
        }
    }
}

fn spectral_sum(args: SpectralArgs) -> Result<bool> {
    let source = match args.model.as_str() {
        "circle" => SpectralSource::Circle { circumference: args.circumference },
        "torus" => SpectralSource::Torus { dim: args.d, side: args.side },
        "interval" => SpectralSource::IntervalNeumann { length: args.length },
        "ou" => SpectralSource::OuHermite { kappa: args.kappa },
        other => bail!("unknown spectrum source '{other}'"),
    };
    let spec = SpectralData::new(source, args.modes)?;
    let b = build_family(&args.family, args.alpha)?;
    let sum = spectral::limit_sum(&spec, &b, args.coef, args.tol)?;
    match sum {
        LimitSum::Convergent { sum, truncation_index, tail_bound } => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "sum": sum,
                    "truncation_index": truncation_index,
                    "tail_bound": tail_bound,
                }))?
            );
        }
        LimitSum::Divergent { reason } => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "divergent": true, "reason": reason }))?
            );
        }
    }
    Ok(true)
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config: ExperimentConfig =
        serde_json::from_str(&text).context("parsing experiment config")?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.fast {
        config = config.fast();
    }
    Ok(config)
}

fn write_outputs(
    args: &RunArgs,
    stem: &str,
    table: Option<&harness::RateTable>,
    summary: &serde_json::Value,
) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    if let Some(table) = table {
        let csv_path = args.out_dir.join(format!("{stem}.csv"));
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        fs::write(&csv_path, buf)?;
    }
    let json_path = args.out_dir.join(format!("{stem}.json"));
    fs::write(&json_path, serde_json::to_vec_pretty(summary)?)?;
    Ok(())
}

fn simulate(args: RunArgs, with_fit: bool) -> Result<bool> {
    let config = load_config(&args)?;
    if with_fit {
        config.validate_for_fits()?;
    }
    let mut table = harness::run_experiment(&config)?;
    if with_fit {
        let lo = args.window_lo.unwrap_or(0.0);
        let hi = args.window_hi.unwrap_or(f64::INFINITY);
        table.fit = Some(harness::fit_exponent(&table, (lo, hi))?);
    }
    let summary = json!({
        "fingerprint": table.fingerprint,
        "seed": table.seed,
        "rows": table.rows,
        "failures": table.failures,
        "fit": table.fit,
    });
    write_outputs(&args, if with_fit { "rates" } else { "simulate" }, Some(&table), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(table.failures.is_empty())
}

fn sandwich(args: RunArgs) -> Result<bool> {
    let config = load_config(&args)?;
    let report = harness::sandwich_check(&config)?;
    let ok = !matches!(report.verdict, SandwichVerdict::Outside);
    let summary = json!({
        "fingerprint": report.table.fingerprint,
        "lower_sum": report.lower_sum,
        "upper_sum": report.upper_sum,
        "slack": brackets::SANDWICH_SLACK,
        "se_multiplier": brackets::SANDWICH_SE_MULT,
        "t_used": report.t_used,
        "estimate": report.estimate,
        "two_se": report.two_se,
        "verdict": report.verdict,
        "rows": report.table.rows,
    });
    write_outputs(&args, "sandwich", Some(&report.table), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ok)
}

fn lower_bounds(args: RunArgs) -> Result<bool> {
    let config = load_config(&args)?;
    config.validate_for_fits()?;
    let report = harness::lower_bound_suite(&config)?;
    let slope_ok = report.w1_slope.slope >= brackets::W1_SLOPE.0
        && report.w1_slope.slope <= brackets::W1_SLOPE.1;
    let floor_ok = report.floor_slope.abs() <= brackets::FLOOR_SLOPE_ABS;
    let quant_ok = report.quantizer_slope >= brackets::QUANTIZER_SLOPE.0
        && report.quantizer_slope <= brackets::QUANTIZER_SLOPE.1;
    let cert_ok = report.max_certificate_ratio <= 1.0 + 1e-9;
    let summary = json!({
        "w1_rows": report.w1_rows,
        "w1_slope": report.w1_slope,
        "w1_slope_bracket": brackets::W1_SLOPE,
        "floor_slope": report.floor_slope,
        "floor_slope_limit": brackets::FLOOR_SLOPE_ABS,
        "quantizer": report.quantizer,
        "quantizer_slope": report.quantizer_slope,
        "quantizer_bracket": brackets::QUANTIZER_SLOPE,
        "max_certificate_ratio": report.max_certificate_ratio,
        "verdicts": {
            "w1_slope": slope_ok,
            "floor": floor_ok,
            "quantizer": quant_ok,
            "certificates": cert_ok,
        },
    });
    write_outputs(&args, "lower_bounds", None, &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(slope_ok && floor_ok && quant_ok && cert_ok)
}
