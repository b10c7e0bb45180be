use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::math;

/// Welford accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Population standard deviation, floored.
    pub fn std(&self, floor: f64) -> f64 {
        if self.n == 0 {
            return floor;
        }
        math::sqrt(self.m2 / self.n as f64).max(floor)
    }

    pub fn normalize(&self, x: f64, floor: f64) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (x - self.mean) / self.std(floor)
        }
    }
}

/// Expanding-window z-score over the rows of `x` in order: each row is
/// normalised with statistics of the unflagged rows up to and including it.
/// Returns the normalised matrix and the final statistics.
pub fn expanding_zscore(x: &DMatrix<f64>, flags: &[bool], floor: f64) -> (DMatrix<f64>, Vec<RunningStats>) {
    let (n, d) = x.shape();
    let mut stats = alloc::vec![RunningStats::default(); d];
    let mut out = DMatrix::zeros(n, d);
    for i in 0..n {
        let flagged = flags.get(i).copied().unwrap_or(false);
        for j in 0..d {
            if !flagged {
                stats[j].push(x[(i, j)]);
            }
            out[(i, j)] = stats[j].normalize(x[(i, j)], floor);
        }
    }
    (out, stats)
}

/// Normalises with frozen statistics.
pub fn apply_zscore(x: &DMatrix<f64>, stats: &[RunningStats], floor: f64) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| stats[j].normalize(x[(i, j)], floor))
}
