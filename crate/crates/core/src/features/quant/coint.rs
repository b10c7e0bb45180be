//! Engle-Granger two-step cointegration test.
//!
//! Step one regresses `a` on `b` with an intercept; step two runs an
//! augmented Dickey-Fuller regression without deterministic terms on the
//! residuals, `du_t = rho * u_{t-1} + sum_j gamma_j * du_{t-j} + e_t`, and
//! reports the t-ratio of `rho`.
//!
//! Quantiles of the statistic under the no-cointegration null come from a
//! response surface `q_p(T) = tau_inf + c1 / T + c2 / T^2` fitted to a
//! Monte Carlo simulation of independent Gaussian random walks (400k draws
//! at each of T = 50, 100, 250, 500, 1000) with one augmentation lag.

use alloc::vec::Vec;

use crate::config::CriticalValueRow;
use crate::error::{Error, Result};
use crate::math;

const fn row(p: f64, tau_inf: f64, c1: f64, c2: f64) -> CriticalValueRow {
    CriticalValueRow { p, tau_inf, c1, c2 }
}

pub const DEFAULT_TABLE: [CriticalValueRow; 19] = [
    row(0.001, -4.5380, -16.4820, -14.7336),
    row(0.005, -4.1030, -10.3136, -28.2720),
    row(0.010, -3.8878, -9.0817, 1.9441),
    row(0.025, -3.5891, -6.0281, -4.3712),
    row(0.050, -3.3345, -3.6532, -15.8428),
    row(0.100, -3.0418, -2.2297, -6.2418),
    row(0.150, -2.8513, -0.5983, -29.7264),
    row(0.200, -2.6990, -0.0568, -25.9860),
    row(0.300, -2.4542, 0.5976, -18.0986),
    row(0.400, -2.2471, 0.7829, -6.0559),
    row(0.500, -2.0549, 1.2328, -14.4576),
    row(0.600, -1.8614, 1.0709, -3.9610),
    row(0.700, -1.6529, 1.3628, -19.7910),
    row(0.800, -1.3989, 0.6099, 20.1811),
    row(0.900, -1.0117, 1.5232, -19.9823),
    row(0.950, -0.6477, 1.9237, -40.9597),
    row(0.975, -0.3146, 1.6887, -56.8915),
    row(0.990, 0.0822, 1.5402, -90.4464),
    row(0.999, 0.9156, 3.7345, -388.0360),
];

pub const SIZE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CointResult {
    pub cointegrated: bool,
    pub p_value: f64,
    pub statistic: f64,
    /// Slope of the first-step regression.
    pub alpha: f64,
}

fn quantile(row: &CriticalValueRow, t: f64) -> f64 {
    row.tau_inf + row.c1 / t + row.c2 / (t * t)
}

/// The 5% critical value at sample size `t`.
pub fn critical_value(table: &[CriticalValueRow], t: usize) -> Result<f64> {
    let r = table
        .iter()
        .find(|r| (r.p - SIZE).abs() < 1e-12)
        .ok_or_else(|| Error::InvalidParameter("critical value table has no 5% row".into()))?;
    Ok(quantile(r, t as f64))
}

/// Left-tail probability of `stat` at sample size `t`, linearly interpolated
/// between table quantiles and clamped to the table's probability range.
pub fn p_value(table: &[CriticalValueRow], stat: f64, t: usize) -> f64 {
    if table.is_empty() || stat.is_nan() {
        return f64::NAN;
    }
    let q: Vec<(f64, f64)> = table.iter().map(|r| (quantile(r, t as f64), r.p)).collect();
    if stat <= q[0].0 {
        return q[0].1;
    }
    for w in q.windows(2) {
        let ((q0, p0), (q1, p1)) = (w[0], w[1]);
        if stat <= q1 {
            return if q1 > q0 { p0 + (p1 - p0) * (stat - q0) / (q1 - q0) } else { p1 };
        }
    }
    q[q.len() - 1].1
}

/// OLS of `a` on `[1, b]`; returns `(intercept, slope)`. A constant `b`
/// yields slope 0.
pub fn ols_with_intercept(a: &[f64], b: &[f64]) -> (f64, f64) {
    let ma = math::mean(a);
    let mb = math::mean(b);
    let (mut sab, mut sbb) = (0.0, 0.0);
    for (x, y) in b.iter().zip(a) {
        sab += (x - mb) * (y - ma);
        sbb += (x - mb) * (x - mb);
    }
    let slope = if sbb > 0.0 { sab / sbb } else { 0.0 };
    (ma - slope * mb, slope)
}

/// t-ratio of `rho` in the no-constant ADF regression with `lags` lagged
/// differences. `None` when the regression is singular.
pub fn adf_statistic(u: &[f64], lags: usize) -> Option<f64> {
    let n = u.len();
    let du: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    // Regression rows t = lags+1 .. n-1 (indices into u)
    if n < lags + 3 {
        return None;
    }
    let k = lags + 1;
    let m = n - 1 - lags;
    if m <= k {
        return None;
    }
    let mut xtx = nalgebra::DMatrix::<f64>::zeros(k, k);
    let mut xty = nalgebra::DVector::<f64>::zeros(k);
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m);
    for t in lags + 1..n {
        let mut x = Vec::with_capacity(k);
        x.push(u[t - 1]);
        for j in 1..=lags {
            x.push(du[t - 1 - j]);
        }
        let y = du[t - 1];
        for i in 0..k {
            xty[i] += x[i] * y;
            for j in 0..k {
                xtx[(i, j)] += x[i] * x[j];
            }
        }
        rows.push((x, y));
    }
    let inv = xtx.try_inverse()?;
    let beta = &inv * &xty;
    let sse: f64 = rows
        .iter()
        .map(|(x, y)| {
            let fit: f64 = x.iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
            (y - fit) * (y - fit)
        })
        .sum();
    let s2 = sse / (m - k) as f64;
    let var = s2 * inv[(0, 0)];
    if !(var > 0.0) {
        return Some(if beta[0] < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    Some(beta[0] / math::sqrt(var))
}

pub fn engle_granger(a: &[f64], b: &[f64], lags: usize, table: &[CriticalValueRow]) -> Result<CointResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    let (c, alpha) = ols_with_intercept(a, b);
    let u: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - c - alpha * y).collect();
    let energy: f64 = a.iter().map(|v| v * v).sum();
    let resid: f64 = u.iter().map(|v| v * v).sum();
    // An exact linear relation leaves nothing to test.
    let stat = if resid <= 1e-24 * energy {
        f64::NEG_INFINITY
    } else {
        adf_statistic(&u, lags).ok_or_else(|| Error::Degenerate("singular unit-root regression".into()))?
    };
    let cv = critical_value(table, a.len())?;
    let p = if stat == f64::NEG_INFINITY { 0.0 } else { p_value(table, stat, a.len()) };
    Ok(CointResult { cointegrated: stat < cv, p_value: p, statistic: stat, alpha })
}
