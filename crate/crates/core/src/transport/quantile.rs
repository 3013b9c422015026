//! One-dimensional transport through quantile (monotone) couplings.
//!
//! On the line with a convex power cost the monotone rearrangement is
//! optimal, so discrete-discrete and discrete-continuous distances reduce to
//! integrals along the common quantile axis. On the circle the measure is
//! cut at the antipode of its circular mean and treated as a line problem;
//! for near-uniform measures the cut-induced overestimate is at the mesh
//! level of the atoms.

use crate::diffusion::{wrap, ModelSpace};
use crate::numerics;
use crate::pathlab::DiscreteMeasure;
use crate::{Error, Result};

/// Atoms of a one-dimensional measure sorted by coordinate.
fn sorted_atoms(mu: &DiscreteMeasure, coord: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
    let mut atoms: Vec<(f64, f64)> =
        (0..mu.len()).map(|i| (coord(i), mu.weights()[i])).collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    atoms
}

/// Quantile-coupling cost between two discrete measures on the line under
/// `|x-y|^p`, returned without the outer root.
pub fn discrete_discrete_line(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    p: f64,
    coord1: impl Fn(usize) -> f64,
    coord2: impl Fn(usize) -> f64,
) -> f64 {
    let a = sorted_atoms(mu1, coord1);
    let b = sorted_atoms(mu2, coord2);
    let (mut i, mut j) = (0usize, 0usize);
    let mut wa = a[0].1;
    let mut wb = b[0].1;
    let mut total = 0.0;
    loop {
        let m = wa.min(wb);
        total += m * (a[i].0 - b[j].0).abs().powf(p);
        wa -= m;
        wb -= m;
        if wa <= 1e-18 {
            i += 1;
            if i >= a.len() {
                break;
            }
            wa = a[i].1;
        }
        if wb <= 1e-18 {
            j += 1;
            if j >= b.len() {
                break;
            }
            wb = b[j].1;
        }
    }
    total
}

/// Circular mean direction of a measure of angles scaled to `[0, c)`.
pub fn circular_mean(mu: &DiscreteMeasure, circumference: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let (mut s, mut co) = (0.0, 0.0);
    for (pt, w) in mu.points().iter().zip(mu.weights()) {
        let theta = pt.x() / circumference * two_pi;
        s += w * theta.sin();
        co += w * theta.cos();
    }
    let mean = s.atan2(co);
    wrap(mean / two_pi * circumference, circumference)
}

/// Exact integral of `|u - c s|^p` over the quantile segment `[a, b]`.
///
/// `c s` is the uniform quantile function on a circle (or interval) of
/// total length `c`; the antiderivative of the split power is explicit.
fn segment_cost_uniform(u: f64, c: f64, p: f64, a: f64, b: f64) -> f64 {
    let h = |s: f64| (u - c * s).abs().powf(p + 1.0) / (c * (p + 1.0));
    let sstar = u / c;
    if b <= sstar {
        h(a) - h(b)
    } else if a >= sstar {
        h(b) - h(a)
    } else {
        h(a) + h(b)
    }
}

/// Quantile transport cost (no outer root) from a discrete measure on the
/// circle to the uniform invariant measure, cutting at the antipode of the
/// measure's circular mean.
pub fn discrete_to_uniform_circle(mu: &DiscreteMeasure, circumference: f64, p: f64) -> f64 {
    let cut = wrap(circular_mean(mu, circumference) + 0.5 * circumference, circumference);
    let atoms = sorted_atoms(mu, |i| wrap(mu.points()[i].x() - cut, circumference));
    let mut cum = 0.0;
    let mut total = 0.0;
    for (x, w) in atoms {
        total += segment_cost_uniform(x, circumference, p, cum, cum + w);
        cum += w;
    }
    total
}

/// Quantile transport cost (no outer root) from a discrete measure to the
/// invariant measure of a one-dimensional model, via the model's quantile
/// function.
pub fn discrete_to_invariant_line(
    mu: &DiscreteMeasure,
    model: &ModelSpace,
    p: f64,
) -> Result<f64> {
    let atoms = sorted_atoms(mu, |i| mu.points()[i].x());
    let mut cum = 0.0;
    let mut total = 0.0;
    for (x, w) in atoms {
        total += segment_cost_invariant(model, x, p, cum, cum + w)?;
        cum += w;
    }
    Ok(total)
}

/// `∫_a^b |x - Q(s)|^p ds` with `Q` the model quantile function.
///
/// Gauss panels with geometric refinement toward the distribution tails,
/// where `Q` is steep.
fn segment_cost_invariant(model: &ModelSpace, x: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    let f = |s: f64| {
        let q = model.quantile_mu(s.clamp(1e-14, 1.0 - 1e-14)).unwrap_or(f64::NAN);
        (x - q).abs().powf(p)
    };
    let mut cuts = vec![a, b];
    // refine near the ends of the unit interval
    for k in 1..=6 {
        let lo = a + (b - a) * 0.5f64.powi(k);
        let hi = b - (b - a) * 0.5f64.powi(k);
        if (0.0..=0.02).contains(&a) {
            cuts.push(lo);
        }
        if (0.98..=1.0).contains(&b) {
            cuts.push(hi);
        }
    }
    cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += numerics::gauss_legendre(&f, w[0], w[1]);
    }
    if !total.is_finite() {
        return Err(Error::Tolerance("quantile segment integral failed".into()));
    }
    Ok(total)
}

/// Quantile transport cost (no outer root) from a discrete measure to the
/// uniform measure on `[0, length]`, where the quantile is linear.
pub fn discrete_to_uniform_interval(mu: &DiscreteMeasure, length: f64, p: f64) -> f64 {
    let atoms = sorted_atoms(mu, |i| mu.points()[i].x());
    let mut cum = 0.0;
    let mut total = 0.0;
    for (x, w) in atoms {
        total += segment_cost_uniform(x, length, p, cum, cum + w);
        cum += w;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::Point;
    use approx::assert_relative_eq;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn measure(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(
            points.iter().map(|&x| Point::d1(x)).collect(),
            weights.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn two_diracs_on_line() {
        let m1 = measure(&[0.0], &[1.0]);
        let m2 = measure(&[1.0], &[1.0]);
        assert_relative_eq!(discrete_discrete_line(&m1, &m2, 2.0, |_| 0.0, |_| 1.0), 1.0);
    }

    #[test]
    fn grid_to_uniform_scales_with_mesh() {
        // n midpoints: squared distance c^2/(12 n^2)
        let n = 50usize;
        let c = TAU;
        let pts: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * c / n as f64).collect();
        let m = measure(&pts, &vec![1.0 / n as f64; n]);
        let v = discrete_to_uniform_circle(&m, c, 2.0);
        assert_relative_eq!(v, c * c / (12.0 * (n * n) as f64), epsilon = 1e-10);
    }

    #[test]
    fn dirac_against_uniform_interval() {
        // dirac at the midpoint of [0, 1]: ∫ |1/2 - s|^2 ds = 1/12
        let m = measure(&[0.5], &[1.0]);
        let v = discrete_to_uniform_interval(&m, 1.0, 2.0);
        assert_relative_eq!(v, 1.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn invariant_line_route_matches_uniform_route() {
        // flat interval: both routes compute the same integral
        let model = ModelSpace::interval(1.0).unwrap();
        let m = measure(&[0.2, 0.7, 0.9], &[0.5, 0.25, 0.25]);
        let a = discrete_to_invariant_line(&m, &model, 2.0).unwrap();
        let b = discrete_to_uniform_interval(&m, 1.0, 2.0);
        assert_relative_eq!(a, b, epsilon = 1e-8);
    }

    #[test]
    fn gaussian_dirac_second_moment() {
        // dirac at 0 against a centered Gaussian: cost = variance
        let model = ModelSpace::ou(1, 1.0).unwrap();
        let m = measure(&[0.0], &[1.0]);
        let v = discrete_to_invariant_line(&m, &model, 2.0).unwrap();
        assert_relative_eq!(v, 0.5, epsilon = 1e-4);
    }
}
