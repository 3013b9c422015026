//! Time-changed paths and their empirical measures.
//!
//! A subordinated path reads the base diffusion at the times of an
//! independent subordinator: positions `X_{S_{t_j}}` on an observation grid
//! `t_j`. From one path three measure-valued objects are built:
//!
//! * the time-averaged empirical measure, a left-endpoint Riemann
//!   discretization of `(1/t) ∫_0^t δ_{X_s} ds`;
//! * the `N`-point discretized measure with equal weights at the times
//!   `(i-1) t / N`;
//! * eigenfunction averages `ξ_i(t) = (1/t) ∫_0^t φ_i(X_s) ds` computed with
//!   the same Riemann weights.
//!
//! Positions between subordinator values are never interpolated: the
//! diffusion is advanced exactly to every subordinator value, either in one
//! exact transition (driftless wrapped/reflected spaces) or by Euler steps
//! no longer than the requested fine step.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bernstein::BernsteinFunction;
use crate::diffusion::{ModelSpace, Point};
use crate::numerics::substream_seed;
use crate::spectral::SpectralData;
use crate::subordinator::{self, SubordinatorPath};
use crate::{Error, Result};

/// Stream tags for the independent randomness of one path.
const TAG_SUBORDINATOR: u64 = 1;
const TAG_DIFFUSION: u64 = 2;
const TAG_INITIAL: u64 = 3;

/// Weighted point cloud with unit total mass.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Build from points and nonnegative weights summing to one (within
    /// `1e-9`, then renormalized exactly).
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::Domain("measure needs matched nonempty points/weights".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("measure contains a non-finite point".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Domain("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("weights sum to {sum}, expected 1")));
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self { points, weights })
    }

    pub fn dirac(p: Point) -> Self {
        Self { points: vec![p], weights: vec![1.0] }
    }

    pub fn equal_weights(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Domain("measure needs at least one point".into()));
        }
        let w = vec![1.0 / n as f64; n];
        Self::new(points, w)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of a function against the measure.
    pub fn integrate(&self, f: &dyn Fn(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// True when all weights are equal (within `1e-12`).
    pub fn is_equal_weight(&self) -> bool {
        let w0 = 1.0 / self.len() as f64;
        self.weights.iter().all(|&w| (w - w0).abs() <= 1e-12)
    }

    /// Merge atoms into position bins on a circle; weight preserving.
    /// Returns the binned measure and the snap radius (half mesh).
    pub fn binned_on_circle(&self, circumference: f64, bins: usize) -> Result<(Self, f64)> {
        if bins < 2 {
            return Err(Error::Domain("binning needs at least 2 cells".into()));
        }
        let mesh = circumference / bins as f64;
        let mut acc = vec![0.0f64; bins];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let idx =
                ((crate::diffusion::wrap(p.x(), circumference) / mesh) as usize).min(bins - 1);
            acc[idx] += w;
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (idx, &w) in acc.iter().enumerate() {
            if w > 0.0 {
                points.push(Point::d1((idx as f64 + 0.5) * mesh));
                weights.push(w);
            }
        }
        Ok((Self::new(points, weights)?, 0.5 * mesh))
    }
}

/// Initial law of the diffusion: a point, the invariant measure, or a
/// density `h · μ` with `h` bounded (sampled by rejection).
#[derive(Clone)]
pub enum InitialLaw {
    Point(Point),
    Invariant,
    BoundedDensity {
        h: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
        bound: f64,
        name: String,
    },
}

impl std::fmt::Debug for InitialLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialLaw::Point(p) => write!(f, "point({:?})", p.coords()),
            InitialLaw::Invariant => write!(f, "invariant"),
            InitialLaw::BoundedDensity { bound, name, .. } => {
                write!(f, "density({name}, bound {bound})")
            }
        }
    }
}

impl InitialLaw {
    /// Uniform on the first `fraction` of a circle's arc: density bounded by
    /// `1/fraction`.
    pub fn restricted_uniform_circle(circumference: f64, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Domain("arc fraction must lie in (0, 1]".into()));
        }
        let cutoff = circumference * fraction;
        Ok(InitialLaw::BoundedDensity {
            h: Arc::new(move |p: &Point| if p.x() < cutoff { 1.0 / fraction } else { 0.0 }),
            bound: 1.0 / fraction,
            name: format!("restricted-uniform({fraction})"),
        })
    }

    /// Tilted density `1 + a cos(2π x / c)` on a circle, bounded by `1 + a`.
    pub fn tilted_circle(circumference: f64, amplitude: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(Error::Domain("tilt amplitude must lie in [0, 1)".into()));
        }
        let w = 2.0 * std::f64::consts::PI / circumference;
        Ok(InitialLaw::BoundedDensity {
            h: Arc::new(move |p: &Point| 1.0 + amplitude * (w * p.x()).cos()),
            bound: 1.0 + amplitude,
            name: format!("tilted({amplitude})"),
        })
    }

    /// Essential bound of `dν/dμ` for this law.
    pub fn density_bound(&self) -> f64 {
        match self {
            InitialLaw::Point(_) => f64::INFINITY,
            InitialLaw::Invariant => 1.0,
            InitialLaw::BoundedDensity { bound, .. } => *bound,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, model: &ModelSpace, rng: &mut R) -> Result<Point> {
        match self {
            InitialLaw::Point(p) => {
                if p.dim() != model.dim() {
                    return Err(Error::Domain("initial point dimension mismatch".into()));
                }
                Ok(*p)
            }
            InitialLaw::Invariant => model.sample_invariant_one(rng),
            InitialLaw::BoundedDensity { h, bound, name } => {
                for _ in 0..100_000 {
                    let x = model.sample_invariant_one(rng)?;
                    if rng.random::<f64>() * bound <= h(&x) {
                        return Ok(x);
                    }
                }
                Err(Error::Domain(format!(
                    "rejection sampler for initial law {name} stalled; check the bound"
                )))
            }
        }
    }
}

/// A diffusion read along a subordinator: the time-changed process on its
/// observation grid.
#[derive(Clone, Debug)]
pub struct SubordinatedPath {
    /// Observation times in process-time units (equal to the subordinator grid).
    pub obs_times: Vec<f64>,
    /// Positions `X_{S_{t_j}}`.
    pub positions: Vec<Point>,
    /// The subordinator trajectory used for the time change.
    pub sub_path: SubordinatorPath,
    /// Base seed of the independent substreams.
    pub seed: u64,
}

impl SubordinatedPath {
    pub fn horizon(&self) -> f64 {
        *self.obs_times.last().unwrap()
    }
}

/// Observation grid `0, dt, 2dt, …` covering `[0, horizon]`.
fn obs_grid(horizon: f64, obs_dt: f64) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && obs_dt > 0.0) {
        return Err(Error::Domain("horizon and observation step must be positive".into()));
    }
    let n = (horizon / obs_dt).round().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..=n).map(|j| j as f64 * obs_dt).collect();
    let last = *grid.last().unwrap();
    if (last - horizon).abs() > 1e-9 * horizon.max(1.0) {
        if last < horizon {
            grid.push(horizon);
        } else {
            *grid.last_mut().unwrap() = horizon;
        }
    }
    Ok(grid)
}

/// Sample a subordinated path.
///
/// The subordinator, the diffusion noise and the initial draw use three
/// independent substreams of `seed`, so changing the model leaves the
/// subordinator trajectory unchanged, and conversely.
pub fn subordinated_path(
    model: &ModelSpace,
    b: &BernsteinFunction,
    horizon: f64,
    obs_dt: f64,
    fine_dt: f64,
    initial: &InitialLaw,
    seed: u64,
) -> Result<SubordinatedPath> {
    if !(fine_dt > 0.0 && obs_dt >= fine_dt) {
        return Err(Error::Domain("need obs_dt >= fine_dt > 0".into()));
    }
    let grid = obs_grid(horizon, obs_dt)?;
    let mut rng_sub = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[TAG_SUBORDINATOR]));
    let sub_path = subordinator::sample_increments(b, &grid, &mut rng_sub)?;
    subordinated_path_from(model, sub_path, fine_dt, initial, seed)
}

/// Read the diffusion along an externally supplied subordinator trajectory.
pub fn subordinated_path_from(
    model: &ModelSpace,
    sub_path: SubordinatorPath,
    fine_dt: f64,
    initial: &InitialLaw,
    seed: u64,
) -> Result<SubordinatedPath> {
    if !sub_path.is_nondecreasing() {
        return Err(Error::Domain("subordinator values must be nondecreasing".into()));
    }
    let mut rng_init = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[TAG_INITIAL]));
    let mut rng_diff = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[TAG_DIFFUSION]));
    let mut pos = initial.sample(model, &mut rng_init)?;
    let exact = model.exact_transitions();
    let mut positions = Vec::with_capacity(sub_path.values.len());
    let mut clock = 0.0f64;
    for &s in &sub_path.values {
        let gap = s - clock;
        if gap > 0.0 {
            if exact {
                model.advance(&mut pos, gap, &mut rng_diff)?;
            } else {
                let steps = (gap / fine_dt).ceil().max(1.0) as usize;
                let h = gap / steps as f64;
                for _ in 0..steps {
                    model.advance(&mut pos, h, &mut rng_diff)?;
                }
            }
            clock = s;
        }
        positions.push(pos);
    }
    Ok(SubordinatedPath { obs_times: sub_path.grid.clone(), positions, sub_path, seed })
}

/// Left-endpoint Riemann weights of the time average over `[0, t]`.
fn riemann_weights(path: &SubordinatedPath, t: f64) -> Result<Vec<(usize, f64)>> {
    let horizon = path.horizon();
    if !(t > 0.0 && t <= horizon * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("time {t} outside the path horizon {horizon}")));
    }
    let mut out = Vec::new();
    for j in 0..path.obs_times.len() - 1 {
        let lo = path.obs_times[j];
        if lo >= t {
            break;
        }
        let hi = path.obs_times[j + 1].min(t);
        out.push((j, (hi - lo) / t));
    }
    Ok(out)
}

/// Time-averaged empirical measure of the path over `[0, t]`.
pub fn empirical_measure(path: &SubordinatedPath, t: f64) -> Result<DiscreteMeasure> {
    let w = riemann_weights(path, t)?;
    let points: Vec<Point> = w.iter().map(|&(j, _)| path.positions[j]).collect();
    let weights: Vec<f64> = w.iter().map(|&(_, w)| w).collect();
    DiscreteMeasure::new(points, weights)
}

/// Equal-weight measure at the `N` times `(i-1) t / N`, `1 ≤ i ≤ N`.
///
/// Errors unless every required time lies on the observation grid.
pub fn discretized_empirical(
    path: &SubordinatedPath,
    t: f64,
    n: usize,
) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::Domain("need at least one sampling time".into()));
    }
    if t <= 0.0 || t > path.horizon() * (1.0 + 1e-12) {
        return Err(Error::Domain("time outside the path horizon".into()));
    }
    let tol = 1e-9 * t.max(1.0);
    let mut points = Vec::with_capacity(n);
    let mut cursor = 0usize;
    for i in 1..=n {
        let target = (i - 1) as f64 * t / n as f64;
        while cursor < path.obs_times.len() && path.obs_times[cursor] < target - tol {
            cursor += 1;
        }
        if cursor >= path.obs_times.len() || (path.obs_times[cursor] - target).abs() > tol {
            return Err(Error::GridMisaligned(format!(
                "sampling time {target} not on the observation grid"
            )));
        }
        points.push(path.positions[cursor]);
    }
    DiscreteMeasure::equal_weights(points)
}

/// Eigenfunction averages `ξ_i = (1/t) ∫_0^t φ_i(X_s) ds` for `i = 1..=count`,
/// with the same Riemann weights as [`empirical_measure`].
pub fn eigen_coefficients(
    path: &SubordinatedPath,
    spec: &SpectralData,
    t: f64,
    count: usize,
) -> Result<Vec<f64>> {
    if count > spec.len() {
        return Err(Error::MissingSpectrum);
    }
    let w = riemann_weights(path, t)?;
    let mut xi = vec![0.0f64; count];
    for &(j, weight) in &w {
        let x = &path.positions[j];
        for (i, out) in xi.iter_mut().enumerate() {
            *out += weight * spec.phi(i + 1, x);
        }
    }
    Ok(xi)
}

/// Push every atom of a measure through one heat transition of width `eps`
/// on a wrapped/reflected space (where the folded Gaussian is the exact
/// kernel). Realizes a sample of the heat-regularized measure with the same
/// weights.
pub fn heat_resample<R: Rng + ?Sized>(
    mu: &DiscreteMeasure,
    model: &ModelSpace,
    eps: f64,
    rng: &mut R,
) -> Result<DiscreteMeasure> {
    if !model.exact_transitions() {
        return Err(Error::Unsupported(
            "heat resampling needs a space with exact transitions".into(),
        ));
    }
    let mut points = Vec::with_capacity(mu.len());
    for p in mu.points() {
        let mut q = *p;
        model.advance(&mut q, eps, rng)?;
        points.push(q);
    }
    DiscreteMeasure::new(points, mu.weights().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics;
    use crate::spectral::SpectralSource;
    use approx::assert_relative_eq;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn circle() -> ModelSpace {
        ModelSpace::circle(TAU).unwrap()
    }

    #[test]
    fn linear_time_change_is_the_plain_diffusion() {
        // with the identity subordinator the path equals a diffusion driven
        // by the same substream on the same grid
        let model = circle();
        let b = BernsteinFunction::linear();
        let seed = 42;
        let path = subordinated_path(
            &model,
            &b,
            2.0,
            0.25,
            0.25,
            &InitialLaw::Point(Point::d1(1.0)),
            seed,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, &[TAG_DIFFUSION]));
        let mut pos = Point::d1(1.0);
        let mut reference = vec![pos];
        for _ in 0..8 {
            model.advance(&mut pos, 0.25, &mut rng).unwrap();
            reference.push(pos);
        }
        assert_eq!(path.positions.len(), reference.len());
        for (a, b) in path.positions.iter().zip(&reference) {
            assert_relative_eq!(a.x(), b.x(), epsilon = 1e-14);
        }
    }

    #[test]
    fn frozen_subordinator_freezes_the_path() {
        // a subordinator that never moves pins the process at its start
        let model = circle();
        let sub = SubordinatorPath {
            grid: vec![0.0, 0.5, 1.0, 1.5],
            values: vec![0.0; 4],
            family: "frozen".into(),
            seed: None,
        };
        let path =
            subordinated_path_from(&model, sub, 1e-3, &InitialLaw::Point(Point::d1(2.0)), 7)
                .unwrap();
        for p in &path.positions {
            assert_eq!(p.x(), 2.0);
        }
        // its empirical measure is a Dirac regardless of t
        let mu = empirical_measure(&path, 1.5).unwrap();
        assert!(mu.points().iter().all(|p| p.x() == 2.0));
        assert_relative_eq!(mu.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_interval_is_a_dirac_at_the_start() {
        let model = circle();
        let b = BernsteinFunction::stable(0.5).unwrap();
        let path =
            subordinated_path(&model, &b, 0.5, 0.5, 0.1, &InitialLaw::Point(Point::d1(0.3)), 3)
                .unwrap();
        let mu = empirical_measure(&path, 0.5).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.points()[0].x(), 0.3);
        assert_eq!(mu.weights()[0], 1.0);
    }

    #[test]
    fn weights_sum_to_one_for_interior_times() {
        let model = circle();
        let b = BernsteinFunction::b_two();
        let path =
            subordinated_path(&model, &b, 4.0, 0.05, 0.05, &InitialLaw::Invariant, 11).unwrap();
        for t in [0.31, 1.0, 2.77, 4.0] {
            let mu = empirical_measure(&path, t).unwrap();
            assert_relative_eq!(mu.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        assert!(empirical_measure(&path, 4.5).is_err());
    }

    #[test]
    fn discretized_measure_alignment() {
        let model = circle();
        let b = BernsteinFunction::b_two();
        let path =
            subordinated_path(&model, &b, 1.0, 0.01, 0.01, &InitialLaw::Invariant, 13).unwrap();
        // N = 1: dirac at the start
        let m1 = discretized_empirical(&path, 1.0, 1).unwrap();
        assert_eq!(m1.len(), 1);
        assert_eq!(m1.points()[0].x(), path.positions[0].x());
        // N = 100 aligns with the grid
        let m100 = discretized_empirical(&path, 1.0, 100).unwrap();
        assert_eq!(m100.len(), 100);
        assert!(m100.is_equal_weight());
        // N = 64 does not divide the grid: misalignment is an error
        assert!(matches!(
            discretized_empirical(&path, 1.0, 64),
            Err(Error::GridMisaligned(_))
        ));
    }

    #[test]
    fn eigen_coefficients_of_a_frozen_path() {
        let model = circle();
        let spec = SpectralData::new(SpectralSource::Circle { circumference: TAU }, 8).unwrap();
        let sub = SubordinatorPath {
            grid: vec![0.0, 0.5, 1.0],
            values: vec![0.0; 3],
            family: "frozen".into(),
            seed: None,
        };
        let x0 = Point::d1(1.1);
        let path = subordinated_path_from(&model, sub, 1e-3, &InitialLaw::Point(x0), 5).unwrap();
        let xi = eigen_coefficients(&path, &spec, 1.0, 6).unwrap();
        for (i, &v) in xi.iter().enumerate() {
            assert_relative_eq!(v, spec.phi(i + 1, &x0), epsilon = 1e-12);
        }
    }

    #[test]
    fn stationary_marginal_stays_uniform() {
        // stationary start: the time-changed marginal at t = 1 passes a KS
        // test against the invariant measure
        let model = circle();
        let b = BernsteinFunction::stable(0.5).unwrap();
        let n = 10_000;
        let mut xs = Vec::with_capacity(n);
        for r in 0..n {
            let path = subordinated_path(
                &model,
                &b,
                1.0,
                1.0,
                1.0,
                &InitialLaw::Invariant,
                substream_seed(99, &[r as u64]),
            )
            .unwrap();
            xs.push(path.positions.last().unwrap().x());
        }
        let d = numerics::ks_statistic_cdf(&mut xs, &|x| (x / TAU).clamp(0.0, 1.0));
        assert!(d < numerics::ks_critical_1pct(n), "KS = {d}");
    }

    #[test]
    fn eigenfunction_correlation_decays_at_subordinated_rate() {
        // E[phi_i(X_0) phi_i(X_s)] = e^{-B(lambda_i) s} under the invariant law
        let model = circle();
        let spec = SpectralData::new(SpectralSource::Circle { circumference: TAU }, 8).unwrap();
        let b = BernsteinFunction::stable(0.5).unwrap();
        let n = 40_000;
        for (i, s) in [(1usize, 0.5f64), (2, 0.5), (1, 1.0)] {
            let mut vals = Vec::with_capacity(n);
            for r in 0..n {
                let path = subordinated_path(
                    &model,
                    &b,
                    s,
                    s,
                    s,
                    &InitialLaw::Invariant,
                    substream_seed(1234 + i as u64, &[r as u64]),
                )
                .unwrap();
                let first = path.positions.first().unwrap();
                let last = path.positions.last().unwrap();
                vals.push(spec.phi(i, first) * spec.phi(i, last));
            }
            let (mean, se) = numerics::mean_and_se(&vals);
            let target = (-b.eval(spec.lambda(i)).unwrap() * s).exp();
            assert!(
                (mean - target).abs() <= 4.0 * se,
                "mode {i} lag {s}: {mean} vs {target} (se {se})"
            );
        }
    }

    #[test]
    fn xi_variance_matches_closed_form() {
        // stationary second moment of the first eigen-average: with
        // B(lambda_1) = 1 and t = 1 the double integral evaluates to 2/e
        let model = circle();
        let spec = SpectralData::new(SpectralSource::Circle { circumference: TAU }, 4).unwrap();
        let b = BernsteinFunction::stable(0.5).unwrap();
        let t = 1.0;
        let n = 4000;
        let mut vals = Vec::with_capacity(n);
        for r in 0..n {
            let path = subordinated_path(
                &model,
                &b,
                t,
                0.01,
                0.01,
                &InitialLaw::Invariant,
                substream_seed(777, &[r as u64]),
            )
            .unwrap();
            let xi = eigen_coefficients(&path, &spec, t, 1).unwrap();
            vals.push(t * xi[0] * xi[0]);
        }
        let (mean, se) = numerics::mean_and_se(&vals);
        let target = 2.0 * (-1.0f64).exp();
        assert!((mean - target).abs() <= 4.0 * se, "{mean} vs {target} (se {se})");
        // and stays below the coarse bound 2/B(lambda_1)
        assert!(mean <= 2.0 / b.eval(spec.gap()).unwrap() + 4.0 * se);
    }

    #[test]
    fn bounded_density_initial_law_respects_its_density() {
        let model = circle();
        let law = InitialLaw::restricted_uniform_circle(TAU, 0.25).unwrap();
        assert_relative_eq!(law.density_bound(), 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20_000;
        let mut xs = Vec::with_capacity(n);
        for _ in 0..n {
            let p = law.sample(&model, &mut rng).unwrap();
            assert!(p.x() < TAU * 0.25 + 1e-12);
            xs.push(p.x());
        }
        let d = numerics::ks_statistic_cdf(&mut xs, &|x| (x / (0.25 * TAU)).clamp(0.0, 1.0));
        assert!(d < numerics::ks_critical_1pct(n), "KS = {d}");
    }

    #[test]
    fn binning_preserves_mass_and_snaps_to_half_mesh() {
        let model = circle();
        let b = BernsteinFunction::stable(0.5).unwrap();
        let path =
            subordinated_path(&model, &b, 8.0, 0.05, 0.05, &InitialLaw::Invariant, 21).unwrap();
        let mu = empirical_measure(&path, 8.0).unwrap();
        let (binned, snap) = mu.binned_on_circle(TAU, 256).unwrap();
        assert_relative_eq!(binned.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(snap, TAU / 512.0);
        assert!(binned.len() <= 256);
    }
}
