use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Sample autocorrelation at lags `1..=max_lag`.
///
/// The full-sample mean is removed; each lag is normalised by the energies of
/// the two overlapping sub-series, so a perfectly alternating series gives
/// exactly -1 at lag 1. Lags with no overlap or a constant sub-series give 0.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mu = math::mean(x);
    (1..=max_lag)
        .map(|k| {
            if k >= n {
                return 0.0;
            }
            let (mut num, mut e0, mut e1) = (0.0, 0.0, 0.0);
            for t in 0..n - k {
                let a = x[t] - mu;
                let b = x[t + k] - mu;
                num += a * b;
                e0 += a * a;
                e1 += b * b;
            }
            if e0 > 0.0 && e1 > 0.0 {
                (num / math::sqrt(e0 * e1)).clamp(-1.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Partial autocorrelation at lags `1..=max_lag` from the Yule-Walker system
/// on the autocorrelations, solved with the Durbin-Levinson recursion.
///
/// Once the recursion hits a non-positive prediction error (singular Toeplitz
/// matrix) the remaining lags are 0.
pub fn partial_autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    pacf_from_acf(&autocorrelation(x, max_lag), max_lag)
}

/// `r[k - 1]` is the autocorrelation at lag `k`.
pub fn pacf_from_acf(r: &[f64], max_lag: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_lag];
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    let mut err = 1.0;
    for k in 1..=max_lag.min(r.len()) {
        let acc: f64 = (1..k).map(|j| phi[j - 1] * r[k - j - 1]).sum();
        if !(err > 1e-12) {
            break;
        }
        let a = (r[k - 1] - acc) / err;
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - a * prev[k - j - 1];
        }
        phi.push(a);
        err *= 1.0 - a * a;
        out[k - 1] = a;
    }
    out
}

/// `ln(x[t] / x[t - 1])`.
pub fn log_returns(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| math::ln(w[1] / w[0])).collect()
}
