//! Labels, normalisation, anchored cross-validation and the evaluation grid.

pub mod folds;
pub mod labels;
pub mod protocol;
pub mod zscore;

pub use folds::{anchored_folds, FoldSpec};
pub use labels::{extract_labels, smooth};
pub use protocol::{evaluate_fold, rank_on_fold, run_protocol, Day, MeanStd, Report, SummaryRow, TaskResult};
pub use zscore::{apply_zscore, expanding_zscore, RunningStats};
