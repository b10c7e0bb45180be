use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Train on days `0..test_day`, test on `test_day` (0-based day indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    /// 1-based.
    pub index: usize,
    pub train_days: usize,
    pub test_day: usize,
}

pub fn anchored_folds(n_days: usize) -> Vec<FoldSpec> {
    (1..n_days).map(|k| FoldSpec { index: k, train_days: k, test_day: k }).collect()
}
