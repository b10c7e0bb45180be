//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

pub use nalgebra::{DMatrix, DVector};

/// Solves `(a + ridge * I) x = b` by Cholesky; `None` when not positive definite.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>, ridge: f64) -> Option<DMatrix<f64>> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] += ridge;
    }
    m.cholesky().map(|c| c.solve(b))
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semi-definite matrix
/// via its eigendecomposition; eigenvalues at or below
/// `max(rows) * eps * lambda_max` are treated as zero.
pub fn pinv_psd(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let e = a.clone().symmetric_eigen();
    let lmax = e.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    let tol = n.max(1) as f64 * f64::EPSILON * lmax;
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (k, l) in e.eigenvalues.iter().enumerate() {
        if *l > tol {
            let v = e.eigenvectors.column(k);
            out += (v * v.transpose()) / *l;
        }
    }
    out
}

/// Squared Euclidean distance.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Builds a `rows x cols` matrix from row slices.
pub fn from_rows(rows: &[&[f64]], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

pub fn column_vec(m: &DMatrix<f64>, j: usize) -> Vec<f64> {
    m.column(j).iter().copied().collect()
}

/// `#[serde(with = "crate::linalg::matrix_serde")]` for `DMatrix<f64>`:
/// `{rows, cols, data}` with `data` row-major.
pub mod matrix_serde {
    use alloc::vec::Vec;

    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        Repr { rows: m.nrows(), cols: m.ncols(), data }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let r = Repr::deserialize(d)?;
        if r.data.len() != r.rows * r.cols {
            return Err(serde::de::Error::custom("matrix data length does not match its shape"));
        }
        Ok(DMatrix::from_row_slice(r.rows, r.cols, &r.data))
    }
}
