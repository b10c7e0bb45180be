use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_labels, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::linalg::sq_dist;

/// Discriminant directions whose eigenvalue is at most this fraction of the
/// largest carry no class separation and are dropped.
pub const EIGEN_DROP: f64 = 1e-12;

/// Per-class counts and means of the rows of `x`.
pub fn class_means(x: &DMatrix<f64>, labels: &[usize]) -> (Vec<usize>, Vec<DVector<f64>>) {
    let p = x.ncols();
    let mut counts = vec![0usize; NUM_CLASSES];
    let mut means = vec![DVector::zeros(p); NUM_CLASSES];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        means[c] += x.row(i).transpose();
    }
    for c in 0..NUM_CLASSES {
        if counts[c] > 0 {
            means[c] /= counts[c] as f64;
        }
    }
    (counts, means)
}

/// Within-class and between-class scatter matrices.
pub fn scatter_matrices(x: &DMatrix<f64>, labels: &[usize]) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = x.ncols();
    let (counts, means) = class_means(x, labels);
    let total: DVector<f64> = x.row_sum().transpose() / x.nrows().max(1) as f64;
    let mut sw = DMatrix::zeros(p, p);
    for (i, &c) in labels.iter().enumerate() {
        let d = x.row(i).transpose() - &means[c];
        sw += &d * d.transpose();
    }
    let mut sb = DMatrix::zeros(p, p);
    for c in 0..NUM_CLASSES {
        if counts[c] > 0 {
            let d = &means[c] - &total;
            sb += (&d * d.transpose()) * counts[c] as f64;
        }
    }
    (sw, sb)
}

/// Generalised eigenvectors of `(S_W + ridge I)^-1 S_B` with non-negligible
/// eigenvalue, at most `C - 1`, largest first, scaled so that
/// `W^T (S_W + ridge I) W = I`. Returns `(W, eigenvalues)`.
pub fn lda_fit(x: &DMatrix<f64>, labels: &[usize], ridge: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    check_labels(x, labels)?;
    let present = labels.iter().fold([false; NUM_CLASSES], |mut a, c| {
        a[*c] = true;
        a
    });
    let n_present = present.iter().filter(|p| **p).count();
    if n_present < 2 {
        return Err(Error::Degenerate("discriminant analysis needs at least two classes".into()));
    }
    let p = x.ncols();
    let (mut sw, sb) = scatter_matrices(x, labels);
    for i in 0..p {
        sw[(i, i)] += ridge;
    }
    let chol = sw
        .cholesky()
        .ok_or_else(|| Error::Degenerate("within-class scatter is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular Cholesky factor".into()))?;
    let m = &l_inv * sb * l_inv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]).then(a.cmp(b)));
    let lmax = eig.eigenvalues[idx[0]].max(0.0);
    let keep: Vec<usize> = idx
        .into_iter()
        .take(n_present - 1)
        .filter(|&k| lmax > 0.0 && eig.eigenvalues[k] > EIGEN_DROP * lmax)
        .collect();
    let mut w = DMatrix::zeros(p, keep.len());
    let lt_inv = l_inv.transpose();
    for (j, &k) in keep.iter().enumerate() {
        w.set_column(j, &(&lt_inv * eig.eigenvectors.column(k)));
    }
    Ok((w, keep.iter().map(|&k| eig.eigenvalues[k]).collect()))
}

/// `w^T S_B w / w^T S_W w` for a single direction.
pub fn fisher_ratio(w: &DVector<f64>, sw: &DMatrix<f64>, sb: &DMatrix<f64>) -> f64 {
    let num = (w.transpose() * sb * w)[0];
    let den = (w.transpose() * sw * w)[0];
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Nearest projected class mean classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    /// `p x k` projection.
    #[serde(with = "crate::linalg::matrix_serde")]
    pub projection: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    /// Projected training mean per class; `None` for classes absent in training.
    pub centroids: Vec<Option<Vec<f64>>>,
}

impl LdaModel {
    pub fn fit(x: &DMatrix<f64>, labels: &[usize], ridge: f64) -> Result<Self> {
        let (projection, eigenvalues) = lda_fit(x, labels, ridge)?;
        let (counts, means) = class_means(x, labels);
        let centroids = (0..NUM_CLASSES)
            .map(|c| (counts[c] > 0).then(|| (projection.transpose() * &means[c]).iter().copied().collect()))
            .collect();
        Ok(Self { projection, eigenvalues, centroids })
    }

    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        x * &self.projection
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        let y = self.project(x);
        (0..y.nrows())
            .map(|i| {
                let row: Vec<f64> = y.row(i).iter().copied().collect();
                nearest(&row, &self.centroids)
            })
            .collect()
    }
}

/// Index of the nearest present centroid; ties go to the lowest index.
pub fn nearest(y: &[f64], centroids: &[Option<Vec<f64>>]) -> usize {
    let mut best = (usize::MAX, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        if let Some(m) = m {
            let d = sq_dist(y, m);
            if d < best.1 || best.0 == usize::MAX {
                best = (c, d);
            }
        }
    }
    best.0.min(NUM_CLASSES - 1)
}
