//! Wasserstein-type distances between discrete measures, with brute-force
//! oracles on small instances.
//!
//! Three ground-cost shapes are supported on top of a model-space distance
//! `ρ`:
//!
//! * power: `ρ^p`, outer exponent `1/p`;
//! * truncated power: `(1 ∧ ρ)^p`, outer exponent `1/(p ∨ 1)`;
//! * capped square: `n ∧ ρ^2`, outer exponent `1/2`.
//!
//! Backends: an exact network simplex on the transport polytope, a
//! log-domain entropic solver, the monotone quantile coupling (only valid
//! for convex power costs in one dimension), and exhaustive permutation
//! enumeration for equal-weight instances of at most eight points.
//! Truncated and capped costs are concave-ish on the line, so quantile
//! couplings are never used for them.

mod quantile;
mod simplex;
mod sinkhorn;

pub use simplex::min_cost_flow;
pub use sinkhorn::sinkhorn_cost;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diffusion::{Kind, ModelSpace, Point};
use crate::pathlab::DiscreteMeasure;
use crate::{Error, Result};

/// Ground-cost shape over the model distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostShape {
    Power { p: f64 },
    TruncatedPower { p: f64 },
    CappedSquare { cap: f64 },
}

/// A transport cost: shape plus the outer exponent applied to the optimal
/// value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub shape: CostShape,
}

impl CostSpec {
    /// `W_p` cost: `ρ^p` with outer exponent `1/p`.
    pub fn power(p: f64) -> Result<Self> {
        if p <= 0.0 {
            return Err(Error::Domain("power cost needs p > 0".into()));
        }
        Ok(Self { shape: CostShape::Power { p } })
    }

    /// Truncated cost `(1 ∧ ρ)^p` with outer exponent `1/(p ∨ 1)`.
    pub fn truncated(p: f64) -> Result<Self> {
        if p <= 0.0 {
            return Err(Error::Domain("truncated cost needs p > 0".into()));
        }
        Ok(Self { shape: CostShape::TruncatedPower { p } })
    }

    /// Capped square `n ∧ ρ^2` with outer exponent `1/2`.
    pub fn capped_square(cap: f64) -> Result<Self> {
        if cap <= 0.0 {
            return Err(Error::Domain("cap must be positive".into()));
        }
        Ok(Self { shape: CostShape::CappedSquare { cap } })
    }

    /// Ground cost of moving across distance `rho ≥ 0`.
    #[inline]
    pub fn ground(&self, rho: f64) -> f64 {
        match self.shape {
            CostShape::Power { p } => rho.powf(p),
            CostShape::TruncatedPower { p } => rho.min(1.0).powf(p),
            CostShape::CappedSquare { cap } => (rho * rho).min(cap),
        }
    }

    /// Outer exponent applied to the optimal transport cost.
    pub fn outer_exponent(&self) -> f64 {
        match self.shape {
            CostShape::Power { p } => 1.0 / p,
            CostShape::TruncatedPower { p } => 1.0 / p.max(1.0),
            CostShape::CappedSquare { .. } => 0.5,
        }
    }

    fn power_exponent(&self) -> Option<f64> {
        match self.shape {
            CostShape::Power { p } => Some(p),
            _ => None,
        }
    }
}

/// Solver backend selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactLp,
    Quantile1d,
    Entropic { eps_reg: f64 },
    BruteForce,
}

/// Transport distance between two discrete measures on a model space.
///
/// Preconditions per backend: the quantile coupling needs a one-dimensional
/// or circular base with a power cost of exponent `p ≥ 1`; brute force needs
/// equal weights and at most eight points per side.
pub fn distance(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    model: &ModelSpace,
    cost: &CostSpec,
    method: Method,
) -> Result<f64> {
    let value = match method {
        Method::ExactLp => {
            let c = |i: usize, j: usize| {
                cost.ground(model.distance(&mu1.points()[i], &mu2.points()[j]))
            };
            min_cost_flow(mu1.weights(), mu2.weights(), &c)?
        }
        Method::Entropic { eps_reg } => {
            let c = |i: usize, j: usize| {
                cost.ground(model.distance(&mu1.points()[i], &mu2.points()[j]))
            };
            sinkhorn_cost(mu1.weights(), mu2.weights(), &c, eps_reg, 50_000, 1e-9)?
        }
        Method::BruteForce => brute_force_cost(mu1, mu2, model, cost)?,
        Method::Quantile1d => {
            let Some(p) = cost.power_exponent() else {
                return Err(Error::Unsupported(
                    "quantile coupling requires a power cost".into(),
                ));
            };
            if p < 1.0 {
                return Err(Error::Unsupported(
                    "quantile coupling requires a convex cost (p >= 1)".into(),
                ));
            }
            match model.kind() {
                Kind::Circle { circumference } => {
                    // cut both measures at the antipode of the first
                    // measure's circular mean
                    let c = *circumference;
                    let cut = crate::diffusion::wrap(
                        quantile::circular_mean(mu1, c) + 0.5 * c,
                        c,
                    );
                    quantile::discrete_discrete_line(
                        mu1,
                        mu2,
                        p,
                        |i| crate::diffusion::wrap(mu1.points()[i].x() - cut, c),
                        |j| crate::diffusion::wrap(mu2.points()[j].x() - cut, c),
                    )
                }
                Kind::Interval { .. } | Kind::Euclidean { dim: 1, .. } | Kind::Ou { dim: 1, .. } => {
                    quantile::discrete_discrete_line(
                        mu1,
                        mu2,
                        p,
                        |i| mu1.points()[i].x(),
                        |j| mu2.points()[j].x(),
                    )
                }
                _ => {
                    return Err(Error::Unsupported(
                        "quantile coupling requires a one-dimensional base".into(),
                    ))
                }
            }
        }
    };
    Ok(value.max(0.0).powf(cost.outer_exponent()))
}

/// Exhaustive assignment minimum for equal-weight instances (≤ 8 points).
fn brute_force_cost(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    model: &ModelSpace,
    cost: &CostSpec,
) -> Result<f64> {
    if mu1.len() != mu2.len() || mu1.len() > 8 {
        return Err(Error::Unsupported(
            "brute force needs equal sizes of at most 8 points".into(),
        ));
    }
    if !mu1.is_equal_weight() || !mu2.is_equal_weight() {
        return Err(Error::Unsupported("brute force needs equal weights".into()));
    }
    let n = mu1.len();
    let mut cmat = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            cmat[i * n + j] = cost.ground(model.distance(&mu1.points()[i], &mu2.points()[j]));
        }
    }
    // Heap's algorithm over assignments
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let total = |perm: &[usize]| -> f64 {
        perm.iter().enumerate().map(|(i, &j)| cmat[i * n + j]).sum()
    };
    let mut best = total(&perm);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            let v = total(&perm);
            if v < best {
                best = v;
            }
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(best / n as f64)
}

/// How the continuous invariant measure was represented in
/// [`distance_to_invariant`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantDistance {
    pub value: f64,
    /// Direction and size of the proxy bias, when a proxy was used.
    pub bias_note: String,
}

/// Transport distance from a discrete measure to the invariant measure.
///
/// One-dimensional bases with power costs go through the quantile function
/// of μ (quadrature-exact, no sampling). Other combinations use a proxy for
/// μ — a deterministic equal-mass quantizer in one dimension, an i.i.d.
/// sample otherwise — and report the bias direction: by the triangle
/// inequality the proxy value differs from the truth by at most the proxy's
/// own distance to μ.
pub fn distance_to_invariant<R: Rng + ?Sized>(
    mu: &DiscreteMeasure,
    model: &ModelSpace,
    cost: &CostSpec,
    reference_n: usize,
    rng: &mut R,
) -> Result<InvariantDistance> {
    if let Some(p) = cost.power_exponent() {
        if p >= 1.0 {
            match model.kind() {
                Kind::Circle { circumference } => {
                    let raw = quantile::discrete_to_uniform_circle(mu, *circumference, p);
                    return Ok(InvariantDistance {
                        value: raw.max(0.0).powf(cost.outer_exponent()),
                        bias_note: "quantile route after cutting at the antipode of the \
                                    circular mean; overestimates by at most the atom mesh"
                            .into(),
                    });
                }
                Kind::Interval { length, potential: None } => {
                    let raw = quantile::discrete_to_uniform_interval(mu, *length, p);
                    return Ok(InvariantDistance {
                        value: raw.max(0.0).powf(cost.outer_exponent()),
                        bias_note: "closed-form quantile route against the uniform measure"
                            .into(),
                    });
                }
                Kind::Interval { .. } | Kind::Euclidean { dim: 1, .. } | Kind::Ou { dim: 1, .. } => {
                    let raw = quantile::discrete_to_invariant_line(mu, model, p)?;
                    return Ok(InvariantDistance {
                        value: raw.max(0.0).powf(cost.outer_exponent()),
                        bias_note: "quantile route against the tabulated quantile function; \
                                    quadrature-exact, no sampling bias"
                            .into(),
                    });
                }
                _ => {}
            }
        }
    }
    // proxy route
    if reference_n < 2 {
        return Err(Error::Domain("reference size must be at least 2".into()));
    }
    let (reference, note): (DiscreteMeasure, String) = match model.kind() {
        Kind::Circle { circumference } => {
            let c = *circumference;
            let pts: Vec<Point> = (0..reference_n)
                .map(|j| Point::d1((j as f64 + 0.5) * c / reference_n as f64))
                .collect();
            (
                DiscreteMeasure::equal_weights(pts)?,
                format!(
                    "deterministic uniform quantizer with {reference_n} atoms; value within \
                     the quantizer's own distance to the invariant measure (≤ mesh/2 = {:.2e})",
                    0.5 * c / reference_n as f64
                ),
            )
        }
        Kind::Interval { .. } | Kind::Euclidean { dim: 1, .. } | Kind::Ou { dim: 1, .. } => {
            let pts: Vec<Point> = (0..reference_n)
                .map(|j| {
                    model
                        .quantile_mu((j as f64 + 0.5) / reference_n as f64)
                        .map(Point::d1)
                })
                .collect::<Result<_>>()?;
            (
                DiscreteMeasure::equal_weights(pts)?,
                format!(
                    "deterministic equal-mass quantizer with {reference_n} atoms; value \
                     within the quantizer's own distance to the invariant measure"
                ),
            )
        }
        _ => {
            let sample = model.sample_invariant(reference_n, rng)?;
            let mut note = format!(
                "i.i.d. reference of {reference_n} points; overestimates by at most the \
                 reference sample's own distance to the invariant measure"
            );
            if !sample.exact {
                note.push_str(" (approximate sampler: ");
                note.push_str(sample.note.as_deref().unwrap_or("unspecified"));
                note.push(')');
            }
            (DiscreteMeasure::equal_weights(sample.points)?, note)
        }
    };
    // bin oversized circle measures so the LP stays tractable
    let (mu_eff, extra) = match model.kind() {
        Kind::Circle { circumference } if mu.len() > 2048 => {
            let (binned, snap) = mu.binned_on_circle(*circumference, 1024)?;
            (binned, format!("; atoms binned to 1024 cells (snap ≤ {snap:.2e})"))
        }
        _ => (mu.clone(), String::new()),
    };
    let value = distance(&mu_eff, &reference, model, cost, Method::ExactLp)?;
    Ok(InvariantDistance { value, bias_note: format!("{note}{extra}") })
}

/// A test function for dual lower bounds: bounded by one in sup norm and
/// gradient norm, mean zero under μ.
#[derive(Clone)]
pub struct TestFunction {
    pub f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    /// Euclidean norm of the gradient; checked on a probe sample.
    pub grad_norm: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    pub name: String,
}

impl TestFunction {
    /// `sin(2π k x / c) / scale` on a circle of circumference `c`.
    pub fn circle_sine(circumference: f64, k: u32, scale: f64) -> Self {
        let w = 2.0 * std::f64::consts::PI / circumference * k as f64;
        Self {
            f: Arc::new(move |p: &Point| (w * p.x()).sin() / scale),
            grad_norm: Arc::new(move |p: &Point| (w * (w * p.x()).cos() / scale).abs()),
            name: format!("sin({k}x)/{scale}"),
        }
    }
}

/// Dual lower-bound statistic `|∫ f dν|` for a mean-zero 1-bounded
/// 1-Lipschitz test function; its square lower-bounds the squared truncated
/// 1-Wasserstein distance between `ν` and μ.
///
/// The norm constraints and the mean-zero property are validated
/// numerically; violations are errors.
pub fn dual_lower<R: Rng + ?Sized>(
    f: &TestFunction,
    nu: &DiscreteMeasure,
    model: &ModelSpace,
    rng: &mut R,
) -> Result<f64> {
    // validate mean zero by quadrature where available, Monte Carlo otherwise
    let mean = match model.integrate_mu(&|x| (f.f)(x)) {
        Ok(v) => v,
        Err(_) => {
            let sample = model.sample_invariant(200_000, rng)?;
            sample.points.iter().map(|p| (f.f)(p)).sum::<f64>() / 200_000.0
        }
    };
    if mean.abs() > 1e-6 {
        return Err(Error::Prerequisite(format!(
            "test function {} has nonzero invariant mean {mean:.2e}",
            f.name
        )));
    }
    // probe the norms on invariant samples plus the measure's own atoms
    let probe = model.sample_invariant(4096, rng)?;
    for p in probe.points.iter().chain(nu.points()) {
        if (f.f)(p).abs() > 1.0 + 1e-9 {
            return Err(Error::Prerequisite(format!(
                "test function {} exceeds sup-norm one",
                f.name
            )));
        }
        if (f.grad_norm)(p) > 1.0 + 1e-9 {
            return Err(Error::Prerequisite(format!(
                "test function {} exceeds gradient-norm one",
                f.name
            )));
        }
    }
    Ok(nu.integrate(&|x| (f.f)(x)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn line() -> ModelSpace {
        ModelSpace::euclidean_power(1, 1.0, 2.0).unwrap()
    }

    fn plane() -> ModelSpace {
        ModelSpace::euclidean_power(2, 1.0, 2.0).unwrap()
    }

    fn random_equal_measure<R: Rng>(model: &ModelSpace, n: usize, rng: &mut R) -> DiscreteMeasure {
        let pts = model.sample_invariant(n, rng).unwrap().points;
        DiscreteMeasure::equal_weights(pts).unwrap()
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let model = line();
        let mu = random_equal_measure(&model, 5, &mut rng(1));
        for cost in [
            CostSpec::power(2.0).unwrap(),
            CostSpec::truncated(0.5).unwrap(),
            CostSpec::capped_square(5.0).unwrap(),
        ] {
            let v = distance(&mu, &mu, &model, &cost, Method::ExactLp).unwrap();
            assert!(v.abs() < 1e-12, "{cost:?}: {v}");
        }
    }

    #[test]
    fn two_diracs_all_costs() {
        let model = line();
        let d0 = DiscreteMeasure::dirac(Point::d1(0.0));
        let d1 = DiscreteMeasure::dirac(Point::d1(1.0));
        let w2 = distance(&d0, &d1, &model, &CostSpec::power(2.0).unwrap(), Method::ExactLp)
            .unwrap();
        assert_relative_eq!(w2, 1.0, epsilon = 1e-12);
        let wt = distance(&d0, &d1, &model, &CostSpec::truncated(0.5).unwrap(), Method::ExactLp)
            .unwrap();
        assert_relative_eq!(wt, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lp_matches_brute_force_on_random_instances() {
        let mut r = rng(7);
        for trial in 0..60 {
            let model: ModelSpace = if trial % 2 == 0 { line() } else { plane() };
            let n = 2 + (trial % 7);
            let mu1 = random_equal_measure(&model, n, &mut r);
            let mu2 = random_equal_measure(&model, n, &mut r);
            for cost in [
                CostSpec::power(2.0).unwrap(),
                CostSpec::truncated(0.5).unwrap(),
                CostSpec::capped_square(5.0).unwrap(),
            ] {
                let lp = distance(&mu1, &mu2, &model, &cost, Method::ExactLp).unwrap();
                let bf = distance(&mu1, &mu2, &model, &cost, Method::BruteForce).unwrap();
                assert!(
                    (lp - bf).abs() <= 1e-9,
                    "trial {trial} {cost:?}: lp {lp} vs bf {bf}"
                );
            }
        }
    }

    #[test]
    fn quantile_matches_lp_on_the_line() {
        let model = line();
        let mut r = rng(9);
        for _ in 0..40 {
            let n = 2 + (r.random::<u32>() % 7) as usize;
            let mu1 = random_equal_measure(&model, n, &mut r);
            let mu2 = random_equal_measure(&model, n, &mut r);
            let cost = CostSpec::power(2.0).unwrap();
            let q = distance(&mu1, &mu2, &model, &cost, Method::Quantile1d).unwrap();
            let lp = distance(&mu1, &mu2, &model, &cost, Method::ExactLp).unwrap();
            assert!((q - lp).abs() <= 1e-9, "{q} vs {lp}");
        }
    }

    #[test]
    fn ordering_truncated_below_w1_below_w2() {
        let model = ModelSpace::circle(TAU).unwrap();
        let mut r = rng(11);
        for _ in 0..20 {
            let mu1 = random_equal_measure(&model, 6, &mut r);
            let mu2 = random_equal_measure(&model, 6, &mut r);
            let wt1 = distance(&mu1, &mu2, &model, &CostSpec::truncated(1.0).unwrap(), Method::ExactLp)
                .unwrap();
            let w1 = distance(&mu1, &mu2, &model, &CostSpec::power(1.0).unwrap(), Method::ExactLp)
                .unwrap();
            let w2 = distance(&mu1, &mu2, &model, &CostSpec::power(2.0).unwrap(), Method::ExactLp)
                .unwrap();
            assert!(wt1 <= w1 + 1e-12, "{wt1} vs {w1}");
            assert!(w1 <= w2 + 1e-12, "{w1} vs {w2}");
        }
    }

    #[test]
    fn capped_square_monotone_in_cap_with_w2_supremum() {
        let model = ModelSpace::circle(TAU).unwrap();
        let mut r = rng(13);
        let mu1 = random_equal_measure(&model, 6, &mut r);
        let mu2 = random_equal_measure(&model, 6, &mut r);
        let diam2 = model.diameter().powi(2);
        let w2 = distance(&mu1, &mu2, &model, &CostSpec::power(2.0).unwrap(), Method::ExactLp)
            .unwrap();
        let mut prev = 0.0;
        let mut caps = vec![0.05, 0.2, 0.5, 1.0, 2.0];
        caps.push(diam2);
        for cap in caps {
            let v = distance(
                &mu1,
                &mu2,
                &model,
                &CostSpec::capped_square(cap).unwrap(),
                Method::ExactLp,
            )
            .unwrap();
            assert!(v >= prev - 1e-12, "not monotone at cap {cap}");
            assert!(v <= w2 + 1e-12);
            prev = v;
        }
        // at the squared diameter the cap is inactive
        assert_relative_eq!(prev, w2, epsilon = 1e-9);
    }

    #[test]
    fn metric_sanity_on_triples() {
        let model = plane();
        let mut r = rng(17);
        let cost = CostSpec::power(2.0).unwrap();
        for _ in 0..15 {
            let a = random_equal_measure(&model, 5, &mut r);
            let b = random_equal_measure(&model, 5, &mut r);
            let c = random_equal_measure(&model, 5, &mut r);
            let dab = distance(&a, &b, &model, &cost, Method::ExactLp).unwrap();
            let dba = distance(&b, &a, &model, &cost, Method::ExactLp).unwrap();
            assert!((dab - dba).abs() <= 1e-9);
            let dac = distance(&a, &c, &model, &cost, Method::ExactLp).unwrap();
            let dcb = distance(&c, &b, &model, &cost, Method::ExactLp).unwrap();
            assert!(dab <= dac + dcb + 1e-9, "triangle violated");
        }
    }

    #[test]
    fn entropic_approaches_lp_from_above() {
        let model = line();
        let mut r = rng(19);
        let mu1 = random_equal_measure(&model, 8, &mut r);
        let mu2 = random_equal_measure(&model, 8, &mut r);
        let cost = CostSpec::power(2.0).unwrap();
        let exact = distance(&mu1, &mu2, &model, &cost, Method::ExactLp).unwrap();
        // mean ground cost sets the regularization scale
        let mean_cost: f64 = {
            let mut s = 0.0;
            for i in 0..mu1.len() {
                for j in 0..mu2.len() {
                    s += cost.ground(model.distance(&mu1.points()[i], &mu2.points()[j]));
                }
            }
            s / (mu1.len() * mu2.len()) as f64
        };
        let mut prev = f64::INFINITY;
        for scale in [0.3, 0.1, 0.03, 1e-3] {
            let v = distance(
                &mu1,
                &mu2,
                &model,
                &cost,
                Method::Entropic { eps_reg: scale * mean_cost },
            )
            .unwrap();
            assert!(v >= exact - 1e-9);
            assert!(v <= prev + 1e-6);
            prev = v;
        }
        assert!((prev - exact).abs() <= 1e-6 * (1.0 + exact), "{prev} vs {exact}");
    }

    #[test]
    fn uniform_grid_close_to_uniform_measure() {
        let model = ModelSpace::circle(TAU).unwrap();
        let n = 1000;
        let pts: Vec<Point> = (0..n).map(|j| Point::d1(j as f64 * TAU / n as f64)).collect();
        let mu = DiscreteMeasure::equal_weights(pts).unwrap();
        let d = distance_to_invariant(
            &mu,
            &model,
            &CostSpec::power(2.0).unwrap(),
            10,
            &mut rng(23),
        )
        .unwrap();
        assert!(d.value <= std::f64::consts::PI / n as f64, "{}", d.value);
    }

    #[test]
    fn dirac_second_moment_on_circle() {
        // any coupling of a Dirac with the uniform measure is the product:
        // squared distance is the second moment of the geodesic distance
        let model = ModelSpace::circle(TAU).unwrap();
        let mu = DiscreteMeasure::dirac(Point::d1(1.0));
        let d = distance_to_invariant(
            &mu,
            &model,
            &CostSpec::power(2.0).unwrap(),
            10,
            &mut rng(29),
        )
        .unwrap();
        assert_relative_eq!(d.value, (std::f64::consts::PI.powi(2) / 3.0).sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn gaussian_self_distance_shrinks_like_root_n() {
        let model = ModelSpace::ou(1, 1.0).unwrap();
        let mut r = rng(31);
        let cost = CostSpec::power(2.0).unwrap();
        let mut logs = Vec::new();
        for &n in &[64usize, 256, 1024, 4096] {
            let mut vals = Vec::new();
            for _ in 0..6 {
                let mu = random_equal_measure(&model, n, &mut r);
                let d = distance_to_invariant(&mu, &model, &cost, 10, &mut r).unwrap();
                vals.push(d.value * d.value);
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            logs.push(((n as f64).ln(), mean.ln()));
        }
        let x: Vec<f64> = logs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = logs.iter().map(|p| p.1).collect();
        let w = vec![1.0; x.len()];
        let (_, slope, _, _, _) = crate::numerics::weighted_line_fit(&x, &y, &w).unwrap();
        // squared distance decays like 1/n (with a mild log factor)
        assert!((-1.35..=-0.65).contains(&slope), "slope {slope}");
    }

    #[test]
    fn dual_lower_basics() {
        let model = ModelSpace::circle(TAU).unwrap();
        let mut r = rng(37);
        // zero function gives zero
        let zero = TestFunction {
            f: Arc::new(|_| 0.0),
            grad_norm: Arc::new(|_| 0.0),
            name: "zero".into(),
        };
        let nu = DiscreteMeasure::dirac(Point::d1(0.4));
        assert_eq!(dual_lower(&zero, &nu, &model, &mut r).unwrap(), 0.0);

        // a Dirac certificate is |f(x0)|
        let f = TestFunction::circle_sine(TAU, 1, 2.0);
        let v = dual_lower(&f, &nu, &model, &mut r).unwrap();
        assert_relative_eq!(v, (0.4f64).sin().abs() / 2.0, epsilon = 1e-12);

        // an over-normed function is rejected
        let big = TestFunction::circle_sine(TAU, 2, 1.0);
        assert!(dual_lower(&big, &nu, &model, &mut r).is_err());
    }

    #[test]
    fn quantile_rejected_for_truncated_costs() {
        let model = line();
        let mu = DiscreteMeasure::dirac(Point::d1(0.0));
        let r = distance(&mu, &mu, &model, &CostSpec::truncated(0.5).unwrap(), Method::Quantile1d);
        assert!(r.is_err());
    }
}
