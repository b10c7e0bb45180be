use alloc::vec::Vec;

use crate::classify::Class;
use crate::config::Smoother;
use crate::error::{Error, Result};

/// Smoothed mid-prices. `Ema` uses `alpha = 2 / (span + 1)` seeded with the
/// first mid; `Centered` is a centred moving average truncated at the edges
/// (it reads future mids, so it is not causal).
pub fn smooth(mids: &[f64], span: usize, kind: Smoother) -> Result<Vec<f64>> {
    if span == 0 {
        return Err(Error::InvalidParameter("smoothing span must be at least 1".into()));
    }
    Ok(match kind {
        Smoother::Ema => {
            let alpha = 2.0 / (span as f64 + 1.0);
            let mut out = Vec::with_capacity(mids.len());
            for (t, m) in mids.iter().enumerate() {
                out.push(if t == 0 { *m } else { out[t - 1] + alpha * (m - out[t - 1]) });
            }
            out
        }
        Smoother::Centered => {
            let half = span / 2;
            (0..mids.len())
                .map(|t| {
                    let lo = t.saturating_sub(half);
                    let hi = (t + half).min(mids.len() - 1);
                    mids[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
                })
                .collect()
        }
    })
}

/// Class of the relative change of the smoothed mid `horizon` blocks ahead;
/// `None` for the last `horizon` blocks.
pub fn extract_labels(
    mids: &[f64],
    horizon: usize,
    threshold: f64,
    span: usize,
    kind: Smoother,
) -> Result<Vec<Option<Class>>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter("label threshold must be positive".into()));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least one block".into()));
    }
    let s = smooth(mids, span, kind)?;
    Ok((0..s.len())
        .map(|t| {
            let next = *s.get(t + horizon)?;
            let change = (next - s[t]) / s[t];
            Some(if change > threshold {
                Class::Up
            } else if change < -threshold {
                Class::Down
            } else {
                Class::Stationary
            })
        })
        .collect())
}
