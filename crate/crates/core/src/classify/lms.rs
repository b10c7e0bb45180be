use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{argmax_rows, check_labels, one_hot};
use crate::error::Result;
use crate::linalg::pinv_psd;

/// Minimum-norm least-squares weights mapping the rows of `x` to the rows of
/// `t`: `pinv(x^T x) x^T t`.
pub fn lms_fit(x: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = x.transpose() * x;
    pinv_psd(&gram) * (x.transpose() * t)
}

/// Prepends a column of ones.
pub fn with_bias(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().insert_column(0, 1.0)
}

/// Least-squares classifier on one-hot targets with an intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmsModel {
    /// `(1 + p) x C`, bias row first.
    #[serde(with = "crate::linalg::matrix_serde")]
    pub weights: DMatrix<f64>,
}

impl LmsModel {
    pub fn fit(x: &DMatrix<f64>, labels: &[usize]) -> Result<Self> {
        check_labels(x, labels)?;
        Ok(Self { weights: lms_fit(&with_bias(x), &one_hot(labels)) })
    }

    pub fn outputs(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        with_bias(x) * &self.weights
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        argmax_rows(&self.outputs(x))
    }
}
