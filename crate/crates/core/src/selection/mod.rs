//! Greedy forward wrapper ranking of features under five criteria.
//!
//! At every step each remaining feature is appended to the already selected
//! block, the criterion is evaluated on the stacked block, and the best
//! candidate (ties to the lowest index) is appended to the ranking.
//! Criteria that need a model are fitted on the first `fit_fraction` of the
//! samples (in time order) and scored on the rest.

pub mod criteria;
pub mod entropy;
mod fast;

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classify::NUM_CLASSES;
use crate::config::SelectionConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Entropy,
    Lms1,
    Lms2,
    Lda1,
    Lda2,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Entropy, Method::Lms1, Method::Lms2, Method::Lda1, Method::Lda2];

    /// Whether larger criterion values are better.
    pub fn maximize(self) -> bool {
        matches!(self, Method::Entropy | Method::Lms1 | Method::Lda1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Entropy => "entropy",
            Method::Lms1 => "lms1",
            Method::Lms2 => "lms2",
            Method::Lda1 => "lda1",
            Method::Lda2 => "lda2",
        }
    }

    /// The value a failed evaluation is scored with.
    pub fn worst(self) -> f64 {
        if self.maximize() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    /// Strictly better; ties are resolved by the caller.
    pub fn better(self, a: f64, b: f64) -> bool {
        if self.maximize() {
            a > b
        } else {
            a < b
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown ranking method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub method: Method,
    /// Feature indices, best first.
    pub order: Vec<usize>,
    /// Criterion value of the winning block at each step.
    pub criterion_trace: Vec<f64>,
    #[serde(default)]
    pub config_hash: String,
}

impl Ranking {
    pub fn top(&self, d: usize) -> &[usize] {
        &self.order[..d.min(self.order.len())]
    }
}

/// Samples (rows, in time order) with their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingData {
    pub x: DMatrix<f64>,
    pub labels: Vec<usize>,
    /// Rows `0..n_fit` fit the models; the rest score them.
    pub n_fit: usize,
}

impl RankingData {
    pub fn new(x: DMatrix<f64>, labels: Vec<usize>, fit_fraction: f64) -> Result<Self> {
        let n = x.nrows();
        if labels.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: labels.len() });
        }
        if labels.iter().any(|c| *c >= NUM_CLASSES) {
            return Err(Error::InvalidParameter("class index out of range".into()));
        }
        if n < 2 || x.ncols() == 0 {
            return Err(Error::InsufficientData { needed: 2, available: n });
        }
        if !(fit_fraction > 0.0 && fit_fraction < 1.0) {
            return Err(Error::InvalidParameter("fit fraction must lie in (0, 1)".into()));
        }
        let n_fit = ((n as f64 * fit_fraction) as usize).clamp(1, n - 1);
        Ok(Self { x, labels, n_fit })
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn fit_rows(&self) -> DMatrix<f64> {
        self.x.rows(0, self.n_fit).into_owned()
    }

    pub fn score_rows(&self) -> DMatrix<f64> {
        self.x.rows(self.n_fit, self.x.nrows() - self.n_fit).into_owned()
    }

    pub fn fit_labels(&self) -> &[usize] {
        &self.labels[..self.n_fit]
    }

    pub fn score_labels(&self) -> &[usize] {
        &self.labels[self.n_fit..]
    }
}

/// Index of the best score; ties go to the earliest position.
pub(crate) fn pick(method: Method, scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if method.better(*s, scores[best]) {
            best = i;
        }
    }
    best
}

pub(crate) fn sanitize(method: Method, r: Result<f64>, feature: usize) -> f64 {
    match r {
        Ok(v) if !v.is_nan() => v,
        Ok(_) => {
            log::warn!("{} criterion undefined for candidate {feature}; scored worst", method.as_str());
            method.worst()
        }
        Err(e) => {
            log::warn!("{} criterion failed for candidate {feature}: {e}; scored worst", method.as_str());
            method.worst()
        }
    }
}

/// Full ranking with the incremental evaluators.
pub fn rank(method: Method, data: &RankingData, config: &SelectionConfig) -> Result<Ranking> {
    let (order, criterion_trace) = match method {
        Method::Entropy => fast::entropy_rank(data, config.entropy_bins),
        Method::Lms1 | Method::Lms2 => fast::lms_rank(method, data),
        Method::Lda1 | Method::Lda2 => fast::lda_rank(method, data, config.lda_ridge),
    };
    Ok(Ranking { method, order, criterion_trace, config_hash: String::new() })
}

/// Full ranking that refits the criterion from scratch for every candidate
/// at every step.
pub fn rank_brute_force(method: Method, data: &RankingData, config: &SelectionConfig) -> Result<Ranking> {
    let d = data.dim();
    let mut order = Vec::with_capacity(d);
    let mut trace = Vec::with_capacity(d);
    let mut remaining: Vec<usize> = (0..d).collect();
    while !remaining.is_empty() {
        let scores = crate::par::map(&remaining, |&i| {
            let mut cols = order.clone();
            cols.push(i);
            sanitize(method, criteria::evaluate(method, data, &cols, config), i)
        });
        let k = pick(method, &scores);
        order.push(remaining.remove(k));
        trace.push(scores[k]);
    }
    Ok(Ranking { method, order, criterion_trace: trace, config_hash: String::new() })
}
