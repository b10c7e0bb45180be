use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{argmax_rows, check_labels, kmeans::kmeans, one_hot};
use crate::config::ClassifyConfig;
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, sq_dist};
use crate::math;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfnModel {
    pub prototypes: Vec<Vec<f64>>,
    pub sigma: f64,
    pub ridge: f64,
    /// `K x C` output weights.
    #[serde(with = "crate::linalg::matrix_serde")]
    pub weights: DMatrix<f64>,
}

/// Median distance over all prototype pairs; 1 when it is not positive.
pub fn median_pairwise_distance(protos: &[Vec<f64>]) -> f64 {
    let mut d = Vec::new();
    for i in 0..protos.len() {
        for j in i + 1..protos.len() {
            d.push(math::sqrt(sq_dist(&protos[i], &protos[j])));
        }
    }
    let m = if d.is_empty() { 0.0 } else { math::median(&d) };
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

/// `n x K` Gaussian activations `exp(-|x - v|^2 / (2 sigma^2))`.
pub fn hidden(x: &DMatrix<f64>, protos: &[Vec<f64>], sigma: f64) -> DMatrix<f64> {
    let s2 = 2.0 * sigma * sigma;
    DMatrix::from_fn(x.nrows(), protos.len(), |i, k| {
        let r: Vec<f64> = x.row(i).iter().copied().collect();
        math::exp(-sq_dist(&r, &protos[k]) / s2)
    })
}

/// Ridge output weights `(H^T H + ridge I)^-1 H^T T` for activations `h` (`n x K`).
pub fn output_weights(h: &DMatrix<f64>, t: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    solve_spd(&(h.transpose() * h), &(h.transpose() * t), ridge)
        .ok_or_else(|| Error::Degenerate("radial basis output system is not positive definite".into()))
}

impl RbfnModel {
    pub fn fit(x: &DMatrix<f64>, labels: &[usize], config: &ClassifyConfig) -> Result<Self> {
        check_labels(x, labels)?;
        if config.rbfn_ridge < 0.0 || config.rbfn_sigma.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("RBFN needs sigma > 0 and ridge >= 0".into()));
        }
        let mut k = config.rbfn_prototypes.max(1);
        if k > x.nrows() {
            log::warn!("only {} training samples; using that many prototypes instead of {k}", x.nrows());
            k = x.nrows();
        }
        let prototypes = kmeans(x, k, config.kmeans_max_iter, config.seed)?;
        let sigma = config.rbfn_sigma.unwrap_or_else(|| median_pairwise_distance(&prototypes));
        let h = hidden(x, &prototypes, sigma);
        let weights = output_weights(&h, &one_hot(labels), config.rbfn_ridge)?;
        Ok(Self { prototypes, sigma, ridge: config.rbfn_ridge, weights })
    }

    pub fn outputs(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        hidden(x, &self.prototypes, self.sigma) * &self.weights
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        argmax_rows(&self.outputs(x))
    }
}
