//! Shared numerical utilities: quadrature, Kolmogorov–Smirnov statistics,
//! weighted least squares and deterministic seed derivation.

use crate::{Error, Result};

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Classic recursive bisection with the Richardson error estimate
/// `|S_left + S_right - S| / 15`. Tolerance is absolute.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let mut converged = true;
    let v = adaptive(f, a, b, fa, fm, fb, whole, tol, 48, &mut converged);
    if converged {
        Ok(v)
    } else {
        Err(Error::Tolerance(format!(
            "adaptive quadrature on [{a}, {b}] hit maximum depth before tol {tol:.3e}"
        )))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *converged = false;
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged)
}

/// Integrate `f` over `[a, ∞)` by mapping the tail through `x = a + u/(1-u)`.
///
/// Suitable when `f` decays at least like an integrable power; the mapped
/// integrand must vanish as `u -> 1`.
pub fn integrate_to_inf(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let g = |u: f64| -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        let x = a + u / (1.0 - u);
        let jac = 1.0 / ((1.0 - u) * (1.0 - u));
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&g, 0.0, 1.0, tol)
}

/// Nodes and weights of 32-point Gauss–Legendre quadrature on `[-1, 1]`,
/// generated by Newton iteration on Legendre polynomials.
pub fn gauss_legendre_32() -> &'static [(f64, f64); 32] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[(f64, f64); 32]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 32usize;
        let mut out = [(0.0f64, 0.0f64); 32];
        for (i, slot) in out.iter_mut().enumerate() {
            // Chebyshev initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed Gauss–Legendre integral of `f` on `[a, b]`.
pub fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    gauss_legendre_32()
        .iter()
        .map(|&(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// One-sample Kolmogorov–Smirnov statistic against a CDF.
pub fn ks_statistic_cdf(samples: &mut [f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        let lo = i as f64 / n;
        let hi = (i as f64 + 1.0) / n;
        d = d.max((c - lo).abs()).max((hi - c).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at the 1% level.
pub fn ks_critical_two_sample_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Weighted least-squares line fit `y ~ a + b x`.
///
/// Weights are inverse variances. Returns `(a, b, se_a, se_b, rss)` where
/// `rss` is the weighted residual sum of squares.
pub fn weighted_line_fit(
    x: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<(f64, f64, f64, f64, f64)> {
    if x.len() != y.len() || x.len() != w.len() || x.len() < 2 {
        return Err(Error::Domain("line fit needs matched inputs, length >= 2".into()));
    }
    let sw: f64 = w.iter().sum();
    let sx: f64 = x.iter().zip(w).map(|(x, w)| x * w).sum();
    let sy: f64 = y.iter().zip(w).map(|(y, w)| y * w).sum();
    let xbar = sx / sw;
    let ybar = sy / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - xbar) * (x - xbar)).sum();
    if sxx <= 0.0 {
        return Err(Error::Domain("singular design: abscissae are constant".into()));
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let b = sxy / sxx;
    let a = ybar - b * xbar;
    let rss: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| {
            let r = y - (a + b * x);
            w * r * r
        })
        .sum();
    let se_b = (1.0 / sxx).sqrt();
    let se_a = (1.0 / sw + xbar * xbar / sxx).sqrt();
    Ok((a, b, se_a, se_b, rss))
}

/// SplitMix64 step, used to derive independent substream seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a base seed with stream tags into one substream seed.
pub fn substream_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(seed ^ 0x5851_f42d_4c95_7f2d);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    s
}

/// FNV-1a of a byte string; used for stable config fingerprints.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1_0000_0000_01b3);
    }
    h
}
