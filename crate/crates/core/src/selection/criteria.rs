//! Criteria evaluated from scratch on an explicit feature block.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::entropy::histogram_entropy;
use super::{Method, RankingData};
use crate::classify::lda::{class_means, lda_fit, nearest};
use crate::classify::lms::with_bias;
use crate::classify::{argmax_rows, lms_fit, one_hot, NUM_CLASSES};
use crate::config::SelectionConfig;
use crate::error::Result;
use crate::linalg::sq_dist;

fn select(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    x.select_columns(cols)
}

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len().max(1) as f64
}

/// `trace(S_W) / trace(S_B)` of the rows of `y`; infinite when the classes
/// share one mean.
pub fn scatter_trace_ratio(y: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let (counts, means) = class_means(y, labels);
    let n = y.nrows().max(1) as f64;
    let total: Vec<f64> = (0..y.ncols()).map(|j| y.column(j).sum() / n).collect();
    let mut within = 0.0;
    for (i, &c) in labels.iter().enumerate() {
        let r: Vec<f64> = y.row(i).iter().copied().collect();
        within += sq_dist(&r, means[c].as_slice());
    }
    let mut between = 0.0;
    for c in 0..NUM_CLASSES {
        if counts[c] > 0 {
            between += counts[c] as f64 * sq_dist(means[c].as_slice(), &total);
        }
    }
    if between > 0.0 {
        within / between
    } else {
        f64::INFINITY
    }
}

/// Criterion of the feature block `cols`.
pub fn evaluate(method: Method, data: &RankingData, cols: &[usize], config: &SelectionConfig) -> Result<f64> {
    match method {
        Method::Entropy => Ok(cols
            .iter()
            .map(|&j| {
                let c: Vec<f64> = data.x.column(j).iter().copied().collect();
                histogram_entropy(&c, config.entropy_bins)
            })
            .sum()),
        Method::Lms1 | Method::Lms2 => {
            let fit = with_bias(&select(&data.fit_rows(), cols));
            let w = lms_fit(&fit, &one_hot(data.fit_labels()));
            let out = with_bias(&select(&data.score_rows(), cols)) * w;
            Ok(if method == Method::Lms1 {
                accuracy(&argmax_rows(&out), data.score_labels())
            } else {
                (out - one_hot(data.score_labels())).norm()
            })
        }
        Method::Lda1 | Method::Lda2 => {
            let fit = select(&data.fit_rows(), cols);
            let (w, _) = lda_fit(&fit, data.fit_labels(), config.lda_ridge)?;
            let y = select(&data.score_rows(), cols) * &w;
            if method == Method::Lda2 {
                return Ok(scatter_trace_ratio(&y, data.score_labels()));
            }
            let (counts, means) = class_means(&fit, data.fit_labels());
            let centroids: Vec<Option<Vec<f64>>> = (0..NUM_CLASSES)
                .map(|c| (counts[c] > 0).then(|| (w.transpose() * &means[c]).iter().copied().collect()))
                .collect();
            let pred: Vec<usize> = (0..y.nrows())
                .map(|i| {
                    let r: Vec<f64> = y.row(i).iter().copied().collect();
                    nearest(&r, &centroids)
                })
                .collect();
            Ok(accuracy(&pred, data.score_labels()))
        }
    }
}
