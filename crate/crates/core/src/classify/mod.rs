//! Mid-price movement classifiers: least squares, linear discriminant
//! analysis and a radial basis function network, plus scoring.

pub mod kmeans;
pub mod lda;
pub mod lms;
pub mod metrics;
pub mod rbfn;

use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::ClassifyConfig;
use crate::error::{Error, Result};

pub use lda::{lda_fit, LdaModel};
pub use lms::{lms_fit, LmsModel};
pub use metrics::{score, Scores};
pub use rbfn::RbfnModel;

pub const NUM_CLASSES: usize = 3;

/// Direction of the smoothed mid-price over the prediction horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Up = 0,
    Down = 1,
    Stationary = 2,
}

impl Class {
    pub const ALL: [Class; NUM_CLASSES] = [Class::Up, Class::Down, Class::Stationary];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Class> {
        Self::ALL.get(i).copied()
    }
}

/// `n x NUM_CLASSES` indicator matrix.
pub fn one_hot(labels: &[usize]) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(labels.len(), NUM_CLASSES);
    for (i, &c) in labels.iter().enumerate() {
        t[(i, c)] = 1.0;
    }
    t
}

/// Row-wise argmax; ties go to the lowest class index.
pub fn argmax_rows(outputs: &DMatrix<f64>) -> Vec<usize> {
    (0..outputs.nrows())
        .map(|i| {
            let row: Vec<f64> = outputs.row(i).iter().copied().collect();
            crate::linalg::argmax(&row)
        })
        .collect()
}

pub(crate) fn check_labels(x: &DMatrix<f64>, labels: &[usize]) -> Result<()> {
    if x.nrows() != labels.len() {
        return Err(Error::LengthMismatch { expected: x.nrows(), found: labels.len() });
    }
    if let Some(c) = labels.iter().find(|c| **c >= NUM_CLASSES) {
        return Err(Error::InvalidParameter(alloc::format!("class index {c} out of range")));
    }
    if x.nrows() == 0 {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Lms,
    Lda,
    Rbfn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Lms, ClassifierKind::Lda, ClassifierKind::Rbfn];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Lms => "lms",
            ClassifierKind::Lda => "lda",
            ClassifierKind::Rbfn => "rbfn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Model {
    Lms(LmsModel),
    Lda(LdaModel),
    Rbfn(RbfnModel),
}

impl Model {
    /// Rows of `x` are samples.
    pub fn train(kind: ClassifierKind, x: &DMatrix<f64>, labels: &[usize], config: &ClassifyConfig, lda_ridge: f64) -> Result<Model> {
        Ok(match kind {
            ClassifierKind::Lms => Model::Lms(LmsModel::fit(x, labels)?),
            ClassifierKind::Lda => Model::Lda(LdaModel::fit(x, labels, lda_ridge)?),
            ClassifierKind::Rbfn => Model::Rbfn(RbfnModel::fit(x, labels, config)?),
        })
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<usize> {
        match self {
            Model::Lms(m) => m.predict(x),
            Model::Lda(m) => m.predict(x),
            Model::Rbfn(m) => m.predict(x),
        }
    }
}
