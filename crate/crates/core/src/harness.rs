//! Replicated experiments, convergence-rate fits and theorem-level checks.
//!
//! The harness ties the other modules together: it simulates replicas of the
//! time-averaged empirical measure at each horizon in a grid, measures the
//! squared transport distance to the invariant measure, aggregates rows into
//! a rate table, fits log-log slopes, and runs the bracket checks that
//! confront the asymptotic theory — the sandwich between the spectral limit
//! sums, and the lower-bound floor for the truncated distance.
//!
//! Everything is deterministic given the configured seed: replicas draw from
//! independent counter-based streams keyed by `(seed, row, replica)`, so
//! results are bit-identical across thread schedules.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bernstein::BernsteinFunction;
use crate::diffusion::{ModelSpace, Point};
use crate::numerics::{self, substream_seed};
use crate::pathlab::{self, InitialLaw};
use crate::spectral::{self, LimitSum, SpectralData};
use crate::transport::{self, CostSpec, TestFunction};
use crate::{Error, Result};

/// Fixed slack factors, SE multipliers and slope brackets used by the
/// verdict-producing checks. Pinned here so every report and test uses the
/// same values and outputs can cite them.
pub mod brackets {
    /// Sandwich slack: accept `t·mean` in `[0.8·lower, 1.2·upper]`. The
    /// asymmetry reflects that both limit sums are asymptotic statements.
    pub const SANDWICH_SLACK: (f64, f64) = (0.8, 1.2);
    /// SE multiplier for the sandwich margin.
    pub const SANDWICH_SE_MULT: f64 = 2.0;
    /// Acceptable fitted slope of `log E[W̃_1]` against `log t`.
    pub const W1_SLOPE: (f64, f64) = (-0.65, -0.35);
    /// `t · mean(W̃_1^2)` trend over the last decade must stay this flat.
    pub const FLOOR_SLOPE_ABS: f64 = 0.25;
    /// Uniform-quantizer scaling `W̃_1(grid_N, μ) ~ N^{-1}` slope window.
    pub const QUANTIZER_SLOPE: (f64, f64) = (-1.15, -0.85);
    /// Conformance limit for Monte Carlo z-scores.
    pub const Z_LIMIT: f64 = 4.0;
}

/// Model declaration for config files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Circle { circumference: f64 },
    Torus { d: usize, side: f64 },
    Interval { length: f64 },
    Euclidean { d: usize, kappa: f64, q: f64 },
    Ou { d: usize, kappa: f64 },
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelSpace> {
        match *self {
            ModelConfig::Circle { circumference } => ModelSpace::circle(circumference),
            ModelConfig::Torus { d, side } => ModelSpace::torus(d, side),
            ModelConfig::Interval { length } => ModelSpace::interval(length),
            ModelConfig::Euclidean { d, kappa, q } => ModelSpace::euclidean_power(d, kappa, q),
            ModelConfig::Ou { d, kappa } => ModelSpace::ou(d, kappa),
        }
    }
}

/// Laplace-exponent declaration for config files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BernsteinConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl BernsteinConfig {
    pub fn new(family: &str, alpha: Option<f64>) -> Self {
        Self { family: family.into(), alpha }
    }

    pub fn build(&self) -> Result<BernsteinFunction> {
        let need_alpha = || {
            self.alpha.ok_or_else(|| {
                Error::Config(format!("family {} needs an alpha parameter", self.family))
            })
        };
        match self.family.as_str() {
            "linear" => Ok(BernsteinFunction::linear()),
            "stable" => BernsteinFunction::stable(need_alpha()?),
            "b1" => BernsteinFunction::b_one(need_alpha()?),
            "b2" => Ok(BernsteinFunction::b_two()),
            "gamma" => Ok(BernsteinFunction::gamma()),
            other => Err(Error::Config(format!("unknown Laplace exponent family '{other}'"))),
        }
    }
}

/// Initial-law declaration for config files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialConfig {
    Invariant,
    Point { x: Vec<f64> },
    /// Uniform on the leading arc fraction of a circle.
    RestrictedUniform { fraction: f64 },
    /// Tilted circle density `1 + a cos`.
    Tilted { amplitude: f64 },
}

impl InitialConfig {
    pub fn build(&self, model: &ModelSpace) -> Result<InitialLaw> {
        match self {
            InitialConfig::Invariant => Ok(InitialLaw::Invariant),
            InitialConfig::Point { x } => Ok(InitialLaw::Point(Point::new(x)?)),
            InitialConfig::RestrictedUniform { fraction } => {
                match model.kind() {
                    crate::diffusion::Kind::Circle { circumference } => {
                        InitialLaw::restricted_uniform_circle(*circumference, *fraction)
                    }
                    _ => Err(Error::Config(
                        "restricted-uniform initial law needs a circle model".into(),
                    )),
                }
            }
            InitialConfig::Tilted { amplitude } => match model.kind() {
                crate::diffusion::Kind::Circle { circumference } => {
                    InitialLaw::tilted_circle(*circumference, *amplitude)
                }
                _ => Err(Error::Config("tilted initial law needs a circle model".into())),
            },
        }
    }
}

/// Observation-grid policy: a fixed step, a fraction of the horizon, or a
/// fixed atom count per path.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ObsSpec {
    Fixed { obs_dt: f64 },
    FractionOfT { fraction: f64 },
    PointsPerPath { points: usize },
}

impl ObsSpec {
    pub fn obs_dt(&self, t: f64) -> f64 {
        match *self {
            ObsSpec::Fixed { obs_dt } => obs_dt,
            ObsSpec::FractionOfT { fraction } => fraction * t,
            ObsSpec::PointsPerPath { points } => t / points.max(1) as f64,
        }
    }
}

/// Distance policy of an experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct DistanceConfig {
    pub cost: CostSpec,
    /// Reference size when the invariant measure needs a finite proxy.
    pub reference_n: usize,
}

/// A full experiment: model, exponent, initial law, horizons, replication
/// and distance policy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub bernstein: BernsteinConfig,
    pub initial: InitialConfig,
    pub t_grid: Vec<f64>,
    pub replicas: usize,
    pub obs: ObsSpec,
    pub fine_dt: f64,
    pub distance: DistanceConfig,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| t <= 0.0) {
            return Err(Error::Config("horizon grid must be nonempty and positive".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("horizon grid must be strictly increasing".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("need at least one replica".into()));
        }
        if self.fine_dt <= 0.0 {
            return Err(Error::Config("fine step must be positive".into()));
        }
        Ok(())
    }

    /// Extra requirements before a fitted exponent is meaningful.
    pub fn validate_for_fits(&self) -> Result<()> {
        self.validate()?;
        if self.replicas < 30 {
            return Err(Error::Config("fits need at least 30 replicas per horizon".into()));
        }
        let span = self.t_grid.last().unwrap() / self.t_grid.first().unwrap();
        if span.log10() < 1.5 {
            return Err(Error::Config("fits need a horizon grid spanning 1.5 decades".into()));
        }
        Ok(())
    }

    /// Stable hash of the serialized config.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).unwrap_or_default();
        format!("{:016x}", numerics::fnv1a(json.as_bytes()))
    }

    /// Halve replica budgets and drop the largest horizons; used by the
    /// command-line `--fast` flag for smoke runs.
    pub fn fast(mut self) -> Self {
        self.replicas = (self.replicas / 4).max(8);
        if self.t_grid.len() > 3 {
            self.t_grid.truncate(self.t_grid.len() - 1);
        }
        self
    }
}

/// One aggregated row of a rate table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RateRow {
    pub t: f64,
    /// Mean of the squared distance across replicas.
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

/// Aggregated experiment output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub fingerprint: String,
    pub seed: u64,
    /// Rows that failed, with the error they failed on.
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
}

impl RateTable {
    /// Plot-ready CSV: `t,mean,se,n` with a header line.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "t,mean,se,n")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.t, r.mean, r.se, r.n)?;
        }
        Ok(())
    }
}

/// Replicated estimate of `E[W(μ_t, μ)^2]` across the horizon grid.
///
/// Each replica simulates one subordinated path, forms the time-averaged
/// empirical measure and computes its squared distance to the invariant
/// measure. A failing row is recorded and skipped; it does not abort the
/// table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RateTable> {
    config.validate()?;
    let model = config.model.build()?;
    let b = config.bernstein.build()?;
    let initial = config.initial.build(&model)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (row_idx, &t) in config.t_grid.iter().enumerate() {
        match run_row(config, &model, &b, &initial, row_idx, t) {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(format!("t = {t}: {e}")),
        }
    }
    Ok(RateTable {
        rows,
        fingerprint: config.fingerprint(),
        seed: config.seed,
        failures,
        fit: None,
    })
}

fn run_row(
    config: &ExperimentConfig,
    model: &ModelSpace,
    b: &BernsteinFunction,
    initial: &InitialLaw,
    row_idx: usize,
    t: f64,
) -> Result<RateRow> {
    let obs_dt = config.obs.obs_dt(t).min(t);
    let fine_dt = config.fine_dt.min(obs_dt);
    let values: Vec<f64> = (0..config.replicas)
        .into_par_iter()
        .map(|replica| -> Result<f64> {
            let seed = substream_seed(config.seed, &[row_idx as u64, replica as u64]);
            let path =
                pathlab::subordinated_path(model, b, t, obs_dt, fine_dt, initial, seed)?;
            let mu = pathlab::empirical_measure(&path, t)?;
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[4]));
            let d = transport::distance_to_invariant(
                &mu,
                model,
                &config.distance.cost,
                config.distance.reference_n,
                &mut rng,
            )?;
            Ok(d.value * d.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = numerics::mean_and_se(&values);
    Ok(RateRow { t, mean, se, n: values.len() })
}

/// Rate regime from the confining exponent `q > 1`, dimension `d` and
/// subordination index `α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Predicted decay of `E[W_2(μ_t, μ)^2]` for the power-potential model.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TheoreticalRate {
    pub exponent: f64,
    pub regime: Regime,
    pub log_factor: bool,
}

/// Case split on `2(1+α)(q-1)` against `d q`.
pub fn theoretical_exponent(d: u32, q: f64, alpha: f64) -> Result<TheoreticalRate> {
    if q <= 1.0 {
        return Err(Error::Domain("potential exponent must satisfy q > 1".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain("subordination index must lie in [0, 1]".into()));
    }
    let d = d as f64;
    let disc = 2.0 * (1.0 + alpha) * (q - 1.0) - d * q;
    if disc.abs() < 1e-12 {
        Ok(TheoreticalRate { exponent: -1.0, regime: Regime::Critical, log_factor: true })
    } else if disc < 0.0 {
        Ok(TheoreticalRate {
            exponent: -2.0 * (q - 1.0) / ((d - 2.0 * alpha) * q + 2.0 * alpha),
            regime: Regime::Subcritical,
            log_factor: false,
        })
    } else {
        Ok(TheoreticalRate { exponent: -1.0, regime: Regime::Supercritical, log_factor: false })
    }
}

/// Weighted log-log slope fit of a rate table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub rss: f64,
    /// Fit of the same data with a multiplicative `log(1+t)` correction
    /// (slope of the corrected model, and the residual comparison).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_model: Option<LogModelComparison>,
}

/// Plain power law against power law times `log(1+t)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogModelComparison {
    pub slope_with_log: f64,
    pub rss_plain: f64,
    pub rss_with_log: f64,
    /// Positive when the log-corrected model fits better (AIC-style, equal
    /// parameter counts so this is a residual comparison).
    pub delta_aic: f64,
}

/// Weighted least squares of `log(mean)` on `log(t)` over a window.
///
/// Weights come from the delta method, `var(log mean) ≈ (se/mean)^2`; exact
/// rows get a large finite weight. Needs at least four rows in the window.
pub fn fit_exponent(table: &RateTable, window: (f64, f64)) -> Result<FitResult> {
    let rows: Vec<&RateRow> = table
        .rows
        .iter()
        .filter(|r| r.t >= window.0 && r.t <= window.1 && r.mean > 0.0)
        .collect();
    if rows.len() < 4 {
        return Err(Error::Domain(format!(
            "fit window [{}, {}] holds {} rows; need at least 4",
            window.0,
            window.1,
            rows.len()
        )));
    }
    let x: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    let w: Vec<f64> = rows
        .iter()
        .map(|r| {
            let rel = r.se / r.mean;
            if rel > 1e-9 {
                1.0 / (rel * rel)
            } else {
                1e18
            }
        })
        .collect();
    let (a, bcoef, _, se_b, rss) = numerics::weighted_line_fit(&x, &y, &w)?;
    // alternative with a fixed log(1+t) correction factor
    let y_log: Vec<f64> = rows.iter().map(|r| r.mean.ln() - (1.0 + r.t).ln().ln()).collect();
    let log_model = numerics::weighted_line_fit(&x, &y_log, &w).ok().map(
        |(_, b_log, _, _, rss_log)| {
            let n = rows.len() as f64;
            LogModelComparison {
                slope_with_log: b_log,
                rss_plain: rss,
                rss_with_log: rss_log,
                delta_aic: n * (rss / n).ln() - n * (rss_log / n).ln(),
            }
        },
    );
    Ok(FitResult {
        slope: bcoef,
        stderr: se_b,
        intercept: a,
        n_points: rows.len(),
        rss,
        log_model,
    })
}

/// Verdict of the limit-sum sandwich.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum SandwichVerdict {
    Inside,
    Outside,
    Divergent { reason: String },
}

/// Bracket check of `t · E[W_2^2]` against the spectral limit sums.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lower_sum: f64,
    pub upper_sum: f64,
    pub t_used: f64,
    /// `t · mean` at the largest horizon.
    pub estimate: f64,
    pub two_se: f64,
    pub verdict: SandwichVerdict,
    pub table: RateTable,
}

/// Run the experiment and compare `t · mean(W_2^2)` at the largest horizon
/// against `[0.8 · Σ 2/(λ B(λ)), 1.2 · Σ 8/(λ B(λ))]`, with a 2-SE margin.
/// The asymmetric slack reflects that both limit sums are asymptotic.
pub fn sandwich_check(config: &ExperimentConfig) -> Result<SandwichReport> {
    let model = config.model.build()?;
    let b = config.bernstein.build()?;
    let spec = SpectralData::for_model(&model, 8192)?;
    let lower = spectral::limit_sum(&spec, &b, 2.0, 1e-4)?;
    let upper = spectral::limit_sum(&spec, &b, 8.0, 1e-4)?;
    let (lower_sum, upper_sum) = match (lower.value(), upper.value()) {
        (Some(l), Some(u)) => (l, u),
        _ => {
            let reason = match lower {
                LimitSum::Divergent { reason } => reason,
                _ => "limit sum diverges".into(),
            };
            return Ok(SandwichReport {
                lower_sum: f64::INFINITY,
                upper_sum: f64::INFINITY,
                t_used: f64::NAN,
                estimate: f64::NAN,
                two_se: f64::NAN,
                verdict: SandwichVerdict::Divergent { reason },
                table: RateTable {
                    rows: vec![],
                    fingerprint: config.fingerprint(),
                    seed: config.seed,
                    failures: vec![],
                    fit: None,
                },
            });
        }
    };
    let table = run_experiment(config)?;
    let last = table
        .rows
        .last()
        .ok_or_else(|| Error::Config("sandwich needs at least one successful row".into()))?;
    let estimate = last.t * last.mean;
    let two_se = 2.0 * last.t * last.se;
    let inside =
        estimate - two_se >= 0.8 * lower_sum && estimate + two_se <= 1.2 * upper_sum;
    Ok(SandwichReport {
        lower_sum,
        upper_sum,
        t_used: last.t,
        estimate,
        two_se,
        verdict: if inside { SandwichVerdict::Inside } else { SandwichVerdict::Outside },
        table,
    })
}

/// Lower-bound suite output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundReport {
    /// Rows of `E[W̃_1]` (not squared) per horizon.
    pub w1_rows: Vec<RateRow>,
    /// Fitted slope of `log E[W̃_1]` against `log t`.
    pub w1_slope: FitResult,
    /// Slope of `log(t · mean(W̃_1^2))` over the last decade of horizons.
    pub floor_slope: f64,
    /// Quantizer scaling study: `(N, W̃_1(grid_N, μ))` rows and slope.
    pub quantizer: Vec<(usize, f64)>,
    pub quantizer_slope: f64,
    /// Largest ratio of a dual certificate to its measured distance
    /// (must stay at or below one).
    pub max_certificate_ratio: f64,
}

/// Floor and scaling checks for the truncated distance.
///
/// For each horizon the suite measures `W̃_1(μ_t, μ)` across replicas,
/// verifies pathwise that the dual certificate from a mean-zero
/// 1-bounded 1-Lipschitz test function never exceeds the measured distance,
/// fits the decay slope of the mean, checks that `t · mean(W̃_1^2)` has no
/// trend over the last decade, and adds the deterministic uniform-quantizer
/// scaling study.
pub fn lower_bound_suite(config: &ExperimentConfig) -> Result<LowerBoundReport> {
    config.validate()?;
    let model = config.model.build()?;
    let b = config.bernstein.build()?;
    let initial = config.initial.build(&model)?;
    let cost = CostSpec::truncated(1.0)?;
    let circumference = match model.kind() {
        crate::diffusion::Kind::Circle { circumference } => *circumference,
        _ => {
            return Err(Error::Config(
                "the lower-bound suite runs on circle models".into(),
            ))
        }
    };
    // test function sin(x)/2: sup and gradient norms 1/2, so differences are
    // dominated by both 1 and the geodesic distance
    let certificate = TestFunction::circle_sine(circumference, 1, 2.0);

    let mut w1_rows = Vec::new();
    let mut product_rows = Vec::new();
    let mut max_ratio = 0.0f64;
    for (row_idx, &t) in config.t_grid.iter().enumerate() {
        let obs_dt = config.obs.obs_dt(t).min(t);
        let fine_dt = config.fine_dt.min(obs_dt);
        let per_replica: Vec<(f64, f64)> = (0..config.replicas)
            .into_par_iter()
            .map(|replica| -> Result<(f64, f64)> {
                let seed =
                    substream_seed(config.seed, &[0x17, row_idx as u64, replica as u64]);
                let path =
                    pathlab::subordinated_path(&model, &b, t, obs_dt, fine_dt, &initial, seed)?;
                let mu = pathlab::empirical_measure(&path, t)?;
                let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[4]));
                let d = transport::distance_to_invariant(
                    &mu,
                    &model,
                    &cost,
                    config.distance.reference_n,
                    &mut rng,
                )?;
                let cert = transport::dual_lower(&certificate, &mu, &model, &mut rng)?;
                Ok((d.value, cert))
            })
            .collect::<Result<Vec<_>>>()?;
        let dists: Vec<f64> = per_replica.iter().map(|p| p.0).collect();
        let sq: Vec<f64> = per_replica.iter().map(|p| p.0 * p.0).collect();
        for (d, c) in &per_replica {
            if *d > 0.0 {
                max_ratio = max_ratio.max(c / d);
            }
        }
        let (mean, se) = numerics::mean_and_se(&dists);
        let (mean_sq, _) = numerics::mean_and_se(&sq);
        w1_rows.push(RateRow { t, mean, se, n: dists.len() });
        product_rows.push((t, t * mean_sq));
    }
    let table = RateTable {
        rows: w1_rows.clone(),
        fingerprint: config.fingerprint(),
        seed: config.seed,
        failures: vec![],
        fit: None,
    };
    let w1_slope = fit_exponent(&table, (0.0, f64::INFINITY))?;

    // trend of the product over the last decade of horizons
    let t_max = *config.t_grid.last().unwrap();
    let last_decade: Vec<(f64, f64)> =
        product_rows.iter().copied().filter(|&(t, _)| t >= t_max / 10.0).collect();
    let floor_slope = if last_decade.len() >= 2 {
        let x: Vec<f64> = last_decade.iter().map(|p| p.0.ln()).collect();
        let y: Vec<f64> = last_decade.iter().map(|p| p.1.ln()).collect();
        let w = vec![1.0; x.len()];
        numerics::weighted_line_fit(&x, &y, &w)?.1
    } else {
        f64::NAN
    };

    // deterministic uniform quantizer: W̃_1(grid_N, μ) against N
    let mut quantizer = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(config.seed, &[0xbeef]));
    for &n in &[8usize, 32, 128, 512] {
        let points: Vec<Point> = (0..n)
            .map(|j| Point::d1((j as f64 + 0.5) * circumference / n as f64))
            .collect();
        let grid = crate::pathlab::DiscreteMeasure::equal_weights(points)?;
        let d = transport::distance_to_invariant(&grid, &model, &cost, 2048, &mut rng)?;
        quantizer.push((n, d.value));
    }
    let qx: Vec<f64> = quantizer.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let qy: Vec<f64> = quantizer.iter().map(|&(_, v)| v.ln()).collect();
    let qw = vec![1.0; qx.len()];
    let quantizer_slope = numerics::weighted_line_fit(&qx, &qy, &qw)?.1;

    Ok(LowerBoundReport {
        w1_rows,
        w1_slope,
        floor_slope,
        quantizer,
        quantizer_slope,
        max_certificate_ratio: max_ratio,
    })
}
