//! Explicit eigendata and the spectral formulas built on it.
//!
//! Every built-in spectrum is analytic — trigonometric modes with
//! squared-integer frequencies on the circle and torus, Neumann cosines on
//! the interval, Hermite polynomials for the Ornstein–Uhlenbeck generator —
//! so heat kernels, traces and limit sums can be evaluated with certified
//! truncation instead of a numerical eigensolver.
//!
//! Provided quantities, for eigenvalues `λ_i` and orthonormal eigenfunctions
//! `φ_i` of `-L` (with `λ_0 = 0`, `φ_0 ≡ 1`):
//!
//! * heat kernel `p_t(x,y) = 1 + Σ e^{-λ_i t} φ_i(x) φ_i(y)`, optionally with
//!   subordinated weights `e^{-B(λ_i) t}`;
//! * trace `γ(t) = Σ e^{-λ_i t}` and the window functional
//!   `η^α(ε) = 1 + ∫_ε^1 γ(u) u^α du`;
//! * ball-mass functionals `γ̃(t) = ∫ μ(dx)/μ(B(x, √t))` and its window
//!   integral;
//! * the stationary displacement second moment `δ(ε) = E[ρ(X_0, X_ε)^2]`;
//! * limit sums `Σ c/(λ_i B(λ_i))` with certified tails or an explicit
//!   divergence verdict;
//! * the regularized transport bound `4 Σ ξ_i^2 / (λ_i e^{2 λ_i ε})`.

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::bernstein::{BernsteinFunction, Family};
use crate::diffusion::{Kind, ModelSpace, Point};
use crate::numerics;
use crate::{Error, Result};

/// Source of an explicit spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectralSource {
    Circle { circumference: f64 },
    Torus { dim: usize, side: f64 },
    IntervalNeumann { length: f64 },
    OuHermite { kappa: f64 },
}

#[derive(Clone, Debug)]
enum AxisShape {
    One,
    Cos(u32),
    Sin(u32),
}

#[derive(Clone, Debug)]
enum ModeShape {
    Const,
    CircleCos(u32),
    CircleSin(u32),
    IntervalCos(u32),
    Hermite(u32),
    Torus(Vec<AxisShape>),
}

#[derive(Clone, Debug)]
struct Mode {
    lambda: f64,
    shape: ModeShape,
}

/// Eigenvalue/eigenfunction table `{λ_i, φ_i}` for a built-in source.
#[derive(Clone, Debug)]
pub struct SpectralData {
    source: SpectralSource,
    modes: Vec<Mode>,
}

impl SpectralData {
    /// Build a table with `n_modes` eigenpairs above the constant mode.
    pub fn new(source: SpectralSource, n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Domain("need at least one nonconstant mode".into()));
        }
        let mut modes = vec![Mode { lambda: 0.0, shape: ModeShape::Const }];
        match source {
            SpectralSource::Circle { circumference } => {
                if circumference <= 0.0 {
                    return Err(Error::Domain("circle needs a positive circumference".into()));
                }
                let omega = 2.0 * std::f64::consts::PI / circumference;
                let mut k = 1u32;
                while modes.len() <= n_modes {
                    let lambda = (omega * k as f64).powi(2);
                    modes.push(Mode { lambda, shape: ModeShape::CircleCos(k) });
                    modes.push(Mode { lambda, shape: ModeShape::CircleSin(k) });
                    k += 1;
                }
            }
            SpectralSource::IntervalNeumann { length } => {
                if length <= 0.0 {
                    return Err(Error::Domain("interval needs a positive length".into()));
                }
                let omega = std::f64::consts::PI / length;
                for k in 1..=n_modes as u32 {
                    let lambda = (omega * k as f64).powi(2);
                    modes.push(Mode { lambda, shape: ModeShape::IntervalCos(k) });
                }
            }
            SpectralSource::OuHermite { kappa } => {
                if kappa <= 0.0 {
                    return Err(Error::Domain("hermite source needs kappa > 0".into()));
                }
                for n in 1..=n_modes as u32 {
                    modes.push(Mode {
                        lambda: 2.0 * kappa * n as f64,
                        shape: ModeShape::Hermite(n),
                    });
                }
            }
            SpectralSource::Torus { dim, side } => {
                if dim == 0 || dim > crate::diffusion::MAX_DIM || side <= 0.0 {
                    return Err(Error::Domain(
                        "torus source needs dim in 1..=4 and side > 0".into(),
                    ));
                }
                let omega = 2.0 * std::f64::consts::PI / side;
                let mut shells: Vec<(f64, Vec<AxisShape>)> = Vec::new();
                // grow the frequency box until it holds enough modes
                let mut kmax = 4usize;
                loop {
                    shells.clear();
                    enumerate_torus_modes(dim, kmax, omega, &mut shells);
                    if shells.len() >= n_modes {
                        break;
                    }
                    kmax *= 2;
                    if kmax > 4096 {
                        return Err(Error::Domain("torus mode request too large".into()));
                    }
                }
                shells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                for (lambda, axes) in shells.into_iter().take(n_modes) {
                    modes.push(Mode { lambda, shape: ModeShape::Torus(axes) });
                }
            }
        }
        modes.truncate(n_modes + 1);
        Ok(Self { source, modes })
    }

    /// Spectrum matched to a model space, when the model has one.
    pub fn for_model(model: &ModelSpace, n_modes: usize) -> Result<Self> {
        let source = match model.kind() {
            Kind::Circle { circumference } => {
                SpectralSource::Circle { circumference: *circumference }
            }
            Kind::Torus { dim, side } => SpectralSource::Torus { dim: *dim, side: *side },
            Kind::Interval { length, potential: None } => {
                SpectralSource::IntervalNeumann { length: *length }
            }
            Kind::Ou { dim: 1, kappa } => SpectralSource::OuHermite { kappa: *kappa },
            _ => return Err(Error::MissingSpectrum),
        };
        Self::new(source, n_modes)
    }

    pub fn source(&self) -> SpectralSource {
        self.source
    }

    /// Number of nonconstant modes in the table.
    pub fn len(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Eigenvalue `λ_i` (`i = 0` is the constant mode).
    pub fn lambda(&self, i: usize) -> f64 {
        self.modes[i].lambda
    }

    /// Spectral gap `λ_1`.
    pub fn gap(&self) -> f64 {
        self.modes[1].lambda
    }

    /// Evaluate `φ_i` at a point.
    pub fn phi(&self, i: usize, x: &Point) -> f64 {
        self.eval_shape(&self.modes[i].shape, x.coords())
    }

    fn eval_shape(&self, shape: &ModeShape, x: &[f64]) -> f64 {
        let sqrt2 = std::f64::consts::SQRT_2;
        match (shape, self.source) {
            (ModeShape::Const, _) => 1.0,
            (ModeShape::CircleCos(k), SpectralSource::Circle { circumference }) => {
                let w = 2.0 * std::f64::consts::PI / circumference * *k as f64;
                sqrt2 * (w * x[0]).cos()
            }
            (ModeShape::CircleSin(k), SpectralSource::Circle { circumference }) => {
                let w = 2.0 * std::f64::consts::PI / circumference * *k as f64;
                sqrt2 * (w * x[0]).sin()
            }
            (ModeShape::IntervalCos(k), SpectralSource::IntervalNeumann { length }) => {
                let w = std::f64::consts::PI / length * *k as f64;
                sqrt2 * (w * x[0]).cos()
            }
            (ModeShape::Hermite(n), SpectralSource::OuHermite { kappa }) => {
                hermite_normalized(*n, x[0] * (2.0 * kappa).sqrt())
            }
            (ModeShape::Torus(axes), SpectralSource::Torus { side, .. }) => {
                let w0 = 2.0 * std::f64::consts::PI / side;
                axes.iter()
                    .zip(x)
                    .map(|(a, &xi)| match a {
                        AxisShape::One => 1.0,
                        AxisShape::Cos(k) => sqrt2 * (w0 * *k as f64 * xi).cos(),
                        AxisShape::Sin(k) => sqrt2 * (w0 * *k as f64 * xi).sin(),
                    })
                    .product()
            }
            _ => unreachable!("mode shape inconsistent with source"),
        }
    }

    /// First derivative of `φ_i` (one-dimensional sources only).
    pub fn phi_prime(&self, i: usize, x: f64) -> Result<f64> {
        let sqrt2 = std::f64::consts::SQRT_2;
        match (&self.modes[i].shape, self.source) {
            (ModeShape::Const, _) => Ok(0.0),
            (ModeShape::CircleCos(k), SpectralSource::Circle { circumference }) => {
                let w = 2.0 * std::f64::consts::PI / circumference * *k as f64;
                Ok(-sqrt2 * w * (w * x).sin())
            }
            (ModeShape::CircleSin(k), SpectralSource::Circle { circumference }) => {
                let w = 2.0 * std::f64::consts::PI / circumference * *k as f64;
                Ok(sqrt2 * w * (w * x).cos())
            }
            (ModeShape::IntervalCos(k), SpectralSource::IntervalNeumann { length }) => {
                let w = std::f64::consts::PI / length * *k as f64;
                Ok(-sqrt2 * w * (w * x).sin())
            }
            (ModeShape::Hermite(n), SpectralSource::OuHermite { kappa }) => {
                // d/dx p_n(x s) = s sqrt(n) p_{n-1}(x s) with s = sqrt(2 kappa)
                let s = (2.0 * kappa).sqrt();
                let n = *n;
                Ok(s * (n as f64).sqrt() * hermite_normalized(n - 1, x * s))
            }
            _ => Err(Error::Unsupported("derivative on a multi-dimensional source".into())),
        }
    }

    /// Second derivative of `φ_i` (one-dimensional sources only).
    pub fn phi_second(&self, i: usize, x: f64) -> Result<f64> {
        match (&self.modes[i].shape, self.source) {
            (ModeShape::Const, _) => Ok(0.0),
            (ModeShape::CircleCos(_), _)
            | (ModeShape::CircleSin(_), _)
            | (ModeShape::IntervalCos(_), _) => {
                Ok(-self.modes[i].lambda * self.phi(i, &Point::d1(x)))
            }
            (ModeShape::Hermite(n), SpectralSource::OuHermite { kappa }) => {
                let s = (2.0 * kappa).sqrt();
                let n = *n;
                if n < 2 {
                    return Ok(0.0);
                }
                Ok(s * s * ((n * (n - 1)) as f64).sqrt() * hermite_normalized(n - 2, x * s))
            }
            _ => Err(Error::Unsupported("derivative on a multi-dimensional source".into())),
        }
    }

    /// Bound on `|φ_i(x) φ_i(y)|` uniform over the nonconstant modes.
    fn product_bound(&self, x: &Point, y: &Point) -> f64 {
        match self.source {
            SpectralSource::Circle { .. } | SpectralSource::IntervalNeumann { .. } => 2.0,
            SpectralSource::Torus { dim, .. } => 2f64.powi(dim as i32),
            SpectralSource::OuHermite { kappa } => {
                // Cramer's bound |He_n(y)|/sqrt(n!) <= K e^{y^2/4}, K ~ 1.0865
                let k = 1.086435f64;
                let sx = x.x() * x.x() * 2.0 * kappa;
                let sy = y.x() * y.x() * 2.0 * kappa;
                k * k * ((sx + sy) / 4.0).exp()
            }
        }
    }

    /// Model space carrying the invariant measure of this spectrum.
    pub fn model(&self) -> ModelSpace {
        match self.source {
            SpectralSource::Circle { circumference } => {
                ModelSpace::circle(circumference).unwrap()
            }
            SpectralSource::Torus { dim, side } => ModelSpace::torus(dim, side).unwrap(),
            SpectralSource::IntervalNeumann { length } => ModelSpace::interval(length).unwrap(),
            SpectralSource::OuHermite { kappa } => ModelSpace::ou(1, kappa).unwrap(),
        }
    }

    /// Distinct eigenvalues with multiplicities: `(λ, mult, first index)`.
    fn shells(&self) -> Vec<(f64, usize, usize)> {
        let mut out: Vec<(f64, usize, usize)> = Vec::new();
        for (i, m) in self.modes.iter().enumerate().skip(1) {
            match out.last_mut() {
                Some((l, mult, _)) if (*l - m.lambda).abs() < 1e-12 * (1.0 + *l) => *mult += 1,
                _ => out.push((m.lambda, 1, i)),
            }
        }
        out
    }
}

fn enumerate_torus_modes(
    dim: usize,
    kmax: usize,
    omega: f64,
    out: &mut Vec<(f64, Vec<AxisShape>)>,
) {
    // iterate frequency vectors in {0..kmax}^dim, skipping the zero vector,
    // and expand each nonzero frequency into its cos/sin pair
    let mut freq = vec![0usize; dim];
    loop {
        if freq.iter().any(|&k| k > 0) {
            let lambda = omega * omega * freq.iter().map(|&k| (k * k) as f64).sum::<f64>();
            let mut variants: Vec<Vec<AxisShape>> = vec![Vec::new()];
            for &k in &freq {
                let mut next = Vec::new();
                for v in &variants {
                    if k == 0 {
                        let mut w = v.clone();
                        w.push(AxisShape::One);
                        next.push(w);
                    } else {
                        let mut wc = v.clone();
                        wc.push(AxisShape::Cos(k as u32));
                        next.push(wc);
                        let mut ws = v.clone();
                        ws.push(AxisShape::Sin(k as u32));
                        next.push(ws);
                    }
                }
                variants = next;
            }
            for v in variants {
                out.push((lambda, v));
            }
        }
        // odometer increment
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            freq[d] += 1;
            if freq[d] <= kmax {
                break;
            }
            freq[d] = 0;
            d += 1;
        }
    }
}

/// Normalized Hermite polynomial `He_n(y)/sqrt(n!)` by stable recurrence.
fn hermite_normalized(n: u32, y: f64) -> f64 {
    // p_{k+1} = (y p_k - sqrt(k) p_{k-1}) / sqrt(k+1)
    if n == 0 {
        return 1.0;
    }
    let mut pm = 1.0f64;
    let mut p = y;
    for k in 1..n {
        let k = k as f64;
        let next = (y * p - k.sqrt() * pm) / (k + 1.0).sqrt();
        pm = p;
        p = next;
    }
    p
}

fn weight(b: Option<&BernsteinFunction>, lambda: f64, t: f64) -> f64 {
    match b {
        None => (-lambda * t).exp(),
        Some(b) => (-b.eval_unchecked(lambda) * t).exp(),
    }
}

/// Heat kernel `p_t(x, y)` w.r.t. μ, or the subordinated kernel when a
/// Laplace exponent is supplied.
///
/// The spectral series is summed shell by shell until a geometric tail
/// estimate drops below `tol`; if the table is exhausted first (or the
/// weights do not decay, as happens for bounded exponents) the error reports
/// what was achievable.
pub fn heat_kernel(
    spec: &SpectralData,
    t: f64,
    x: &Point,
    y: &Point,
    b: Option<&BernsteinFunction>,
    tol: f64,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("heat kernel needs t > 0".into()));
    }
    let bound = spec.product_bound(x, y);
    let mut sum = 1.0;
    let shells = spec.shells();
    for (si, &(lambda, mult, first)) in shells.iter().enumerate() {
        let w = weight(b, lambda, t);
        for j in 0..mult {
            sum += w * spec.phi(first + j, x) * spec.phi(first + j, y);
        }
        if si + 1 < shells.len() {
            let (l_next, m_next, _) = shells[si + 1];
            let w_next = weight(b, l_next, t);
            let ratio = if w > 0.0 { w_next * m_next as f64 / (w * mult as f64) } else { 0.0 };
            if ratio < 0.9 {
                let tail = bound * w_next * m_next as f64 / (1.0 - ratio);
                if tail < tol {
                    return Ok(sum);
                }
            }
        }
    }
    Err(Error::Tolerance(format!(
        "heat-kernel tail bound did not close below {tol:.1e} within {} modes",
        spec.len()
    )))
}

/// Heat trace `γ(t) = Σ_i e^{-λ_i t}` (constant mode included).
pub fn trace_gamma(spec: &SpectralData, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("trace needs t > 0".into()));
    }
    let mut sum = 1.0;
    let shells = spec.shells();
    for (si, &(lambda, mult, _)) in shells.iter().enumerate() {
        let w = (-lambda * t).exp() * mult as f64;
        sum += w;
        if si + 1 < shells.len() {
            let (l_next, m_next, _) = shells[si + 1];
            let w_next = (-l_next * t).exp() * m_next as f64;
            let ratio = if w > 0.0 { w_next / w } else { 0.0 };
            if ratio < 0.9 && w_next / (1.0 - ratio) < 1e-14 * sum {
                return Ok(sum);
            }
        }
    }
    Err(Error::Tolerance(format!(
        "trace did not converge within {} modes at t = {t}",
        spec.len()
    )))
}

/// `η^α(ε) = 1 + ∫_ε^1 γ(u) u^α du` for `ε ∈ (0, 1]`.
pub fn eta_alpha(spec: &SpectralData, alpha: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain("eta window needs eps in (0, 1]".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain("eta exponent must lie in [0, 1]".into()));
    }
    if eps == 1.0 {
        return Ok(1.0);
    }
    // integrate on the log axis where the trace integrand is smooth
    let g = |v: f64| -> f64 {
        let u = v.exp();
        trace_gamma(spec, u).unwrap_or(f64::NAN) * u.powf(alpha + 1.0)
    };
    let v = numerics::integrate(&g, eps.ln(), 0.0, 1e-10)?;
    if !v.is_finite() {
        return Err(Error::Tolerance("trace evaluation failed inside the eta window".into()));
    }
    Ok(1.0 + v)
}

/// `γ̃(t) = ∫ μ(dx)/μ(B(x, √t))`.
pub fn ball_gamma(model: &ModelSpace, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("ball functional needs t > 0".into()));
    }
    let r = t.sqrt();
    match model.kind() {
        // homogeneous spaces: the ball mass does not depend on the center
        Kind::Circle { .. } | Kind::Torus { .. } => {
            let center = Point::zero(model.dim())?;
            Ok(1.0 / model.ball_mass(&center, r)?)
        }
        _ => model.integrate_mu(&|x| {
            let m = model.ball_mass(x, r).unwrap_or(f64::NAN);
            if m > 0.0 {
                1.0 / m
            } else {
                f64::INFINITY
            }
        }),
    }
}

/// Ball-mass functionals `(γ̃(t), η̃^α(ε))`.
pub fn ball_functionals(model: &ModelSpace, t: f64, alpha: f64, eps: f64) -> Result<(f64, f64)> {
    let gamma_tilde = ball_gamma(model, t)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain("window needs eps in (0, 1]".into()));
    }
    // fixed high-order panels on the log axis: every evaluation of the
    // integrand is itself a quadrature
    let g = |v: f64| -> f64 {
        let u = v.exp();
        ball_gamma(model, u).unwrap_or(f64::NAN) * u.powf(alpha + 1.0)
    };
    let eta = if eps < 1.0 {
        let mut total = 0.0;
        let (mut lo, hi) = (eps.ln(), 0.0);
        let panels = ((hi - lo) / 1.5).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for _ in 0..panels {
            total += numerics::gauss_legendre(&g, lo, lo + h);
            lo += h;
        }
        if !total.is_finite() {
            return Err(Error::Tolerance("ball-mass trace failed inside the window".into()));
        }
        1.0 + total
    } else {
        1.0
    };
    Ok((gamma_tilde, eta))
}

/// Route taken by [`delta_eps`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaRoute {
    SpectralQuadrature,
    MonteCarlo,
}

/// Stationary displacement moment `δ(ε)` with its evaluation route.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DeltaEps {
    pub value: f64,
    pub standard_error: Option<f64>,
    pub route: DeltaRoute,
}

/// `δ(ε) = E^μ[ρ(X_0, X_ε)^2]`, by heat-kernel quadrature on the circle and
/// flat interval and by stationary-pair Monte Carlo elsewhere.
pub fn delta_eps<R: Rng + ?Sized>(
    model: &ModelSpace,
    spec: Option<&SpectralData>,
    eps: f64,
    mc_pairs: usize,
    rng: &mut R,
) -> Result<DeltaEps> {
    if eps <= 0.0 {
        return Err(Error::Domain("delta needs eps > 0".into()));
    }
    match (model.kind(), spec) {
        (Kind::Circle { .. }, Some(spec)) => {
            // rotation invariance: fix one leg at the origin
            let origin = Point::zero(1)?;
            let v = model.integrate_mu(&|y| {
                let rho = model.distance(&origin, y);
                rho * rho * heat_kernel(spec, eps, &origin, y, None, 1e-11).unwrap_or(f64::NAN)
            })?;
            if !v.is_finite() {
                return Err(Error::Tolerance("kernel failed inside delta quadrature".into()));
            }
            Ok(DeltaEps { value: v, standard_error: None, route: DeltaRoute::SpectralQuadrature })
        }
        (Kind::Interval { potential: None, .. }, Some(spec)) => {
            let v = model.integrate_mu(&|x| {
                let x = *x;
                model
                    .integrate_mu(&|y| {
                        let rho = model.distance(&x, y);
                        rho * rho * heat_kernel(spec, eps, &x, y, None, 1e-10).unwrap_or(f64::NAN)
                    })
                    .unwrap_or(f64::NAN)
            })?;
            if !v.is_finite() {
                return Err(Error::Tolerance("kernel failed inside delta quadrature".into()));
            }
            Ok(DeltaEps { value: v, standard_error: None, route: DeltaRoute::SpectralQuadrature })
        }
        _ => {
            if mc_pairs < 100 {
                return Err(Error::Domain("Monte Carlo delta needs at least 100 pairs".into()));
            }
            let dt = (eps / 10.0).min(1e-3).min(model.max_stable_step());
            let steps = (eps / dt).ceil() as usize;
            let h = eps / steps as f64;
            let mut vals = Vec::with_capacity(mc_pairs);
            for _ in 0..mc_pairs {
                let x0 = model.sample_invariant_one(rng)?;
                let mut x = x0;
                for _ in 0..steps {
                    model.advance(&mut x, h, rng)?;
                }
                let rho = model.distance(&x0, &x);
                vals.push(rho * rho);
            }
            let (mean, se) = numerics::mean_and_se(&vals);
            Ok(DeltaEps { value: mean, standard_error: Some(se), route: DeltaRoute::MonteCarlo })
        }
    }
}

/// Outcome of a spectral limit sum `Σ_i c/(λ_i B(λ_i))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum LimitSum {
    Convergent { sum: f64, truncation_index: usize, tail_bound: f64 },
    Divergent { reason: String },
}

impl LimitSum {
    pub fn value(&self) -> Option<f64> {
        match self {
            LimitSum::Convergent { sum, .. } => Some(*sum),
            LimitSum::Divergent { .. } => None,
        }
    }
}

/// Growth certificate of a Laplace exponent used for tail bounds.
enum Growth {
    /// `B(λ) ≥ κ λ^α` on the probe range.
    PowerLower { alpha: f64, kappa: f64 },
    /// `B` is bounded with the given supremum.
    Bounded { sup: f64 },
    Unknown,
}

fn certify_growth(b: &BernsteinFunction) -> Growth {
    match b.family() {
        Family::Linear => Growth::PowerLower { alpha: 1.0, kappa: 1.0 },
        Family::Stable { alpha } => Growth::PowerLower { alpha: *alpha, kappa: 1.0 },
        Family::BOne { .. } | Family::BTwo => Growth::Bounded { sup: 1.0 },
        Family::Gamma => Growth::Unknown,
        Family::Custom { .. } => {
            let far = b.eval_unchecked(1e12);
            let farther = b.eval_unchecked(1e14);
            if (farther - far).abs() <= 1e-6 * far.abs() {
                Growth::Bounded { sup: farther }
            } else {
                for alpha in [1.0, 0.75, 0.5, 0.25, 0.1] {
                    let grid = crate::bernstein::log_grid(1.0, 1e12, 8);
                    let kappa = grid
                        .iter()
                        .map(|&l| b.eval_unchecked(l) / l.powf(alpha))
                        .fold(f64::INFINITY, f64::min);
                    if kappa > 1e-8 {
                        return Growth::PowerLower { alpha, kappa };
                    }
                }
                Growth::Unknown
            }
        }
    }
}

/// Integral-test bound of `Σ 1/λ_i^p` over the modes beyond the table.
fn inv_lambda_tail(spec: &SpectralData, p: f64) -> Option<f64> {
    let last = spec.modes.last().unwrap().lambda;
    match spec.source {
        SpectralSource::Circle { circumference } => {
            let omega = 2.0 * std::f64::consts::PI / circumference;
            let kmax = (last.sqrt() / omega).round();
            if 2.0 * p <= 1.0 {
                return None;
            }
            Some(2.0 * kmax.powf(1.0 - 2.0 * p) / ((2.0 * p - 1.0) * omega.powf(2.0 * p)))
        }
        SpectralSource::IntervalNeumann { length } => {
            let omega = std::f64::consts::PI / length;
            let kmax = (last.sqrt() / omega).round();
            if 2.0 * p <= 1.0 {
                return None;
            }
            Some(kmax.powf(1.0 - 2.0 * p) / ((2.0 * p - 1.0) * omega.powf(2.0 * p)))
        }
        SpectralSource::OuHermite { kappa } => {
            let nmax = last / (2.0 * kappa);
            if p <= 1.0 {
                return None;
            }
            Some(nmax.powf(1.0 - p) / ((p - 1.0) * (2.0 * kappa).powf(p)))
        }
        SpectralSource::Torus { dim, side } => {
            let omega = 2.0 * std::f64::consts::PI / side;
            // eigenvalue counting grows like c_d λ^{d/2}; integral comparison
            let d = dim as f64;
            if p <= d / 2.0 {
                return None;
            }
            let vol_ball = match dim {
                1 => 2.0,
                2 => std::f64::consts::PI,
                3 => 4.0 * std::f64::consts::PI / 3.0,
                _ => std::f64::consts::PI * std::f64::consts::PI / 2.0,
            };
            let c_d = vol_ball / omega.powf(d);
            Some(c_d * (d / 2.0) * last.powf(d / 2.0 - p) / (p - d / 2.0))
        }
    }
}

/// Whether `Σ 1/λ_i` diverges for this source (harmonic-type tails).
fn inv_lambda_divergent(spec: &SpectralData) -> bool {
    match spec.source {
        SpectralSource::Circle { .. } | SpectralSource::IntervalNeumann { .. } => false,
        SpectralSource::OuHermite { .. } => true,
        SpectralSource::Torus { dim, .. } => dim >= 2,
    }
}

/// Spectral limit sum `Σ_{i≥1} c/(λ_i B(λ_i))` with certified truncation.
///
/// Divergence (a bounded exponent against a harmonic-type spectrum) is a
/// verdict, not an error; a combination with no usable tail certificate is an
/// error carrying what was achievable.
pub fn limit_sum(
    spec: &SpectralData,
    b: &BernsteinFunction,
    coefficient: f64,
    tol: f64,
) -> Result<LimitSum> {
    if coefficient <= 0.0 || tol <= 0.0 {
        return Err(Error::Domain("limit sum needs positive coefficient and tol".into()));
    }
    let growth = certify_growth(b);
    if let Growth::Bounded { sup } = growth {
        if inv_lambda_divergent(spec) {
            return Ok(LimitSum::Divergent {
                reason: format!(
                    "exponent bounded by {sup} while the inverse-eigenvalue sum diverges on {:?}",
                    spec.source
                ),
            });
        }
    }
    let mut sum = 0.0;
    for mode in spec.modes.iter().skip(1) {
        let bl = b.eval_unchecked(mode.lambda);
        if bl <= 0.0 {
            return Err(Error::Domain(format!(
                "exponent vanishes at λ = {}; sum undefined",
                mode.lambda
            )));
        }
        sum += coefficient / (mode.lambda * bl);
    }
    let tail = tail_bound(spec, b, &growth, coefficient);
    match tail {
        Some(tail) if tail < tol => Ok(LimitSum::Convergent {
            sum,
            truncation_index: spec.len(),
            tail_bound: tail,
        }),
        Some(tail) => Err(Error::Tolerance(format!(
            "limit-sum tail bound {tail:.2e} above tol {tol:.1e} after {} modes; \
             enlarge the spectral table",
            spec.len()
        ))),
        None => Err(Error::Tolerance(
            "no tail certificate for this exponent/spectrum combination".into(),
        )),
    }
}

fn tail_bound(
    spec: &SpectralData,
    b: &BernsteinFunction,
    growth: &Growth,
    coefficient: f64,
) -> Option<f64> {
    let last_lambda = spec.modes.last().unwrap().lambda;
    let via_monotone =
        inv_lambda_tail(spec, 1.0).map(|t| coefficient * t / b.eval_unchecked(last_lambda));
    let via_power = match growth {
        Growth::PowerLower { alpha, kappa } => {
            inv_lambda_tail(spec, 1.0 + alpha).map(|t| coefficient * t / kappa)
        }
        _ => None,
    };
    match (via_monotone, via_power) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Upper bound `4 Σ_i ξ_i^2 / (λ_i e^{2 λ_i ε})` for the squared transport
/// distance between a heat-regularized empirical measure and μ.
///
/// `xi[j]` must be the coefficient of mode `j + 1` of the same spectrum.
pub fn regularized_bound(xi: &[f64], spec: &SpectralData, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::Domain("regularized bound needs eps > 0".into()));
    }
    if xi.len() > spec.len() {
        return Err(Error::Domain("more coefficients than table modes".into()));
    }
    Ok(xi
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let l = spec.lambda(j + 1);
            4.0 * c * c / (l * (2.0 * l * eps).exp())
        })
        .sum())
}
