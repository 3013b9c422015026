//! Entropically regularized transport in the log domain.

use crate::{Error, Result};

/// Transport cost of the Sinkhorn plan at regularization `eps_reg`.
///
/// Log-domain iterations are stable for small `eps_reg`; the returned value
/// is the primal cost `<plan, cost>` of the converged plan (not including
/// the entropy term), which decreases to the exact optimum as the
/// regularization vanishes.
pub fn sinkhorn_cost(
    a: &[f64],
    b: &[f64],
    cost: &dyn Fn(usize, usize) -> f64,
    eps_reg: f64,
    max_iter: usize,
    marginal_tol: f64,
) -> Result<f64> {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 {
        return Err(Error::Domain("transport needs nonempty marginals".into()));
    }
    if eps_reg <= 0.0 {
        return Err(Error::Domain("regularization must be positive".into()));
    }
    if m.saturating_mul(n) > 16_000_000 {
        return Err(Error::Unsupported("cost matrix above 16M entries".into()));
    }
    let sum_a: f64 = a.iter().sum();
    let sum_b: f64 = b.iter().sum();
    if ((sum_a - sum_b) / sum_a).abs() > 1e-6 {
        return Err(Error::Domain("unbalanced marginals".into()));
    }
    let log_a: Vec<f64> = a.iter().map(|&w| (w / sum_a).max(1e-300).ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|&w| (w / sum_b).max(1e-300).ln()).collect();
    let mut c = vec![0.0f64; m * n];
    for i in 0..m {
        for j in 0..n {
            c[i * n + j] = cost(i, j);
        }
    }
    let mut f = vec![0.0f64; m];
    let mut g = vec![0.0f64; n];
    let mut row = vec![0.0f64; n.max(m)];
    let mut converged = false;
    for _ in 0..max_iter {
        // f-update: exact row marginals afterwards
        for i in 0..m {
            for j in 0..n {
                row[j] = (g[j] - c[i * n + j]) / eps_reg + log_b[j];
            }
            f[i] = -eps_reg * log_sum_exp(&row[..n]);
        }
        for j in 0..n {
            for i in 0..m {
                row[i] = (f[i] - c[i * n + j]) / eps_reg + log_a[i];
            }
            g[j] = -eps_reg * log_sum_exp(&row[..m]);
        }
        // column update makes columns exact; check the row violation
        let mut err = 0.0f64;
        for (i, &ai) in a.iter().enumerate() {
            let mut mass = 0.0;
            for j in 0..n {
                mass += plan_entry(&f, &g, &c, &log_a, &log_b, eps_reg, i, j, n);
            }
            err += (mass - (ai / sum_a)).abs();
        }
        if err < marginal_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Tolerance(format!(
            "entropic solver did not meet marginal tolerance within {max_iter} iterations"
        )));
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            total += plan_entry(&f, &g, &c, &log_a, &log_b, eps_reg, i, j, n) * c[i * n + j];
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn plan_entry(
    f: &[f64],
    g: &[f64],
    c: &[f64],
    log_a: &[f64],
    log_b: &[f64],
    eps: f64,
    i: usize,
    j: usize,
    n: usize,
) -> f64 {
    ((f[i] + g[j] - c[i * n + j]) / eps + log_a[i] + log_b[j]).exp()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
