//! Series-level primitives. Undefined (warm-up) entries are NaN; every
//! output at index `t` depends only on inputs at indices `<= t`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub type Series = Vec<f64>;

fn check_window(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("window length must be at least 1".into()));
    }
    Ok(())
}

fn window_finite(x: &[f64], t: usize, n: usize) -> Option<&[f64]> {
    if t + 1 < n {
        return None;
    }
    let w = &x[t + 1 - n..=t];
    w.iter().all(|v| v.is_finite()).then_some(w)
}

pub fn sma(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    Ok((0..x.len())
        .map(|t| window_finite(x, t, n).map_or(f64::NAN, |w| w.iter().sum::<f64>() / n as f64))
        .collect())
}

/// Exponential moving average with `alpha = 2 / (n + 1)`, seeded by the
/// simple average of the first complete window.
pub fn ema(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    let alpha = 2.0 / (n as f64 + 1.0);
    let mut out = vec![f64::NAN; x.len()];
    let mut state: Option<f64> = None;
    for t in 0..x.len() {
        state = match state {
            Some(prev) if x[t].is_finite() => Some(prev + alpha * (x[t] - prev)),
            Some(_) => None,
            None => window_finite(x, t, n).map(|w| w.iter().sum::<f64>() / n as f64),
        };
        if let Some(v) = state {
            out[t] = v;
        }
    }
    Ok(out)
}

/// Linearly weighted moving average, weight `k` on the k-th oldest of `n` values
/// counting from 1, so the newest value carries weight `n`.
pub fn wma(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    let norm = (n * (n + 1)) as f64 / 2.0;
    Ok((0..x.len())
        .map(|t| {
            window_finite(x, t, n).map_or(f64::NAN, |w| {
                w.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum::<f64>() / norm
            })
        })
        .collect())
}

pub fn rolling_max(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    Ok((0..x.len())
        .map(|t| window_finite(x, t, n).map_or(f64::NAN, |w| w.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
        .collect())
}

pub fn rolling_min(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    Ok((0..x.len())
        .map(|t| window_finite(x, t, n).map_or(f64::NAN, |w| w.iter().copied().fold(f64::INFINITY, f64::min)))
        .collect())
}

/// Population standard deviation over the trailing window.
pub fn rolling_std(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    Ok((0..x.len())
        .map(|t| window_finite(x, t, n).map_or(f64::NAN, |w| math::sqrt(math::variance(w))))
        .collect())
}

/// `x[t] - x[t - lag]`.
pub fn diff(x: &[f64], lag: usize) -> Series {
    (0..x.len()).map(|t| if t >= lag { x[t] - x[t - lag] } else { f64::NAN }).collect()
}

pub fn lagged(x: &[f64], lag: usize) -> Series {
    (0..x.len()).map(|t| if t >= lag { x[t - lag] } else { f64::NAN }).collect()
}

pub fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Series {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

pub fn true_range(high: &[f64], low: &[f64], close: &[f64]) -> Series {
    (0..high.len())
        .map(|t| {
            if t == 0 {
                return f64::NAN;
            }
            let pc = close[t - 1];
            (high[t] - low[t]).max(math::abs(high[t] - pc)).max(math::abs(low[t] - pc))
        })
        .collect()
}

/// Wilder average: the mean of the first `n` defined values, then
/// `(prev * (n - 1) + x) / n`.
pub fn wilder_average(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    let mut out = vec![f64::NAN; x.len()];
    let mut prev: Option<f64> = None;
    for t in 0..x.len() {
        prev = match prev {
            Some(p) => Some((p * (n as f64 - 1.0) + x[t]) / n as f64),
            None => window_finite(x, t, n).map(|w| w.iter().sum::<f64>() / n as f64),
        };
        if let Some(v) = prev {
            out[t] = v;
        }
    }
    Ok(out)
}

/// Wilder running sum: the sum of the first `n` defined values, then
/// `prev - prev / n + x`.
pub fn wilder_sum(x: &[f64], n: usize) -> Result<Series> {
    check_window(n)?;
    let mut out = vec![f64::NAN; x.len()];
    let mut prev: Option<f64> = None;
    for t in 0..x.len() {
        prev = match prev {
            Some(p) => Some(p - p / n as f64 + x[t]),
            None => window_finite(x, t, n).map(|w| w.iter().sum::<f64>()),
        };
        if let Some(v) = prev {
            out[t] = v;
        }
    }
    Ok(out)
}

/// Direct-form IIR/FIR filter with zero initial conditions.
pub fn lfilter(b: &[f64], a: &[f64], x: &[f64]) -> Result<Series> {
    if b.is_empty() || a.is_empty() || a[0] == 0.0 {
        return Err(Error::InvalidParameter("filter needs non-empty b and a with a[0] != 0".into()));
    }
    let mut y = vec![0.0; x.len()];
    for n in 0..x.len() {
        let mut acc = 0.0;
        for (k, bk) in b.iter().enumerate().take(n + 1) {
            acc += bk * x[n - k];
        }
        for (k, ak) in a.iter().enumerate().skip(1).take(n) {
            acc -= ak * y[n - k];
        }
        y[n] = acc / a[0];
    }
    Ok(y)
}

/// Forward-backward filtering over an odd (point-reflected) extension of the
/// signal, so the result has zero phase and is symmetric under time reversal.
pub fn filtfilt(b: &[f64], a: &[f64], x: &[f64]) -> Result<Series> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, available: n });
    }
    let pad = (3 * b.len().max(a.len())).min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        ext.push(2.0 * x[0] - x[i]);
    }
    ext.extend_from_slice(x);
    for i in 1..=pad {
        ext.push(2.0 * x[n - 1] - x[n - 1 - i]);
    }
    let mut y = lfilter(b, a, &ext)?;
    y.reverse();
    let mut y = lfilter(b, a, &y)?;
    y.reverse();
    Ok(y[pad..pad + n].to_vec())
}

/// Convolution weights of a least-squares polynomial fit of `degree` over the
/// given abscissae, evaluated at `at`: the smoothed value is `sum(h_i * y_i)`.
pub fn savgol_weights(abscissae: &[f64], weights: &[f64], degree: usize, at: f64) -> Result<Vec<f64>> {
    let m = abscissae.len();
    if weights.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: weights.len() });
    }
    if degree + 1 > m {
        return Err(Error::InvalidParameter("polynomial degree must be below the window length".into()));
    }
    let p = degree + 1;
    // Normal matrix A[j][k] = sum w x^(j+k)
    let a = nalgebra::DMatrix::from_fn(p, p, |j, k| {
        abscissae.iter().zip(weights).map(|(x, w)| w * libm::pow(*x, (j + k) as f64)).sum::<f64>()
    });
    let lu = a.lu();
    // Solve A^T c = v(at) so that value = c . B with B_k = sum w y x^k.
    let v = nalgebra::DVector::from_fn(p, |r, _| libm::pow(at, r as f64));
    let c = lu
        .solve(&v)
        .ok_or_else(|| Error::Degenerate("singular Savitzky-Golay normal matrix".into()))?;
    Ok(abscissae
        .iter()
        .zip(weights)
        .map(|(x, w)| (0..p).map(|k| c[k] * w * libm::pow(*x, k as f64)).sum())
        .collect())
}

/// Least-squares line through `(i, y_i)`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Correlation coefficient; 0 when either variable is constant.
    pub r: f64,
}

impl LineFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

pub fn fit_line(y: &[f64]) -> LineFit {
    let n = y.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let dx = i as f64 - xm;
        let dy = v - ym;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r = if sxx > 0.0 && syy > 0.0 { sxy / math::sqrt(sxx * syy) } else { 0.0 };
    LineFit { slope, intercept: ym - slope * xm, r }
}
