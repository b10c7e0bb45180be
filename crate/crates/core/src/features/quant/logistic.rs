//! Online logistic models for "does the best price move on the next event".
//!
//! Each block contributes one sample: the volumes of the first levels at its
//! 9th snapshot, labelled 1 when the best price differs at the 10th. Two
//! models are kept, one for the ask and one for the bid price. For every
//! block the features are read from the current parameters first and the
//! models are trained on the block afterwards.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::config::QuantConfig;
use crate::lob::{Block, LobSnapshot};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Leading 1 for the intercept, then the regressors.
    pub v: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted { halvings: usize },
    /// No step size within the halving budget lowered the cost.
    Rejected,
    /// The gradient vanished.
    Converged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub theta: Vec<f64>,
    pub ridge: f64,
    pub max_halvings: usize,
    pub iterations: usize,
    pub last_cost: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + math::ln_1p(math::exp(-math::abs(z)))
}

impl LogisticModel {
    pub fn new(dim: usize, ridge: f64, max_halvings: usize) -> Self {
        Self { theta: vec![0.0; dim], ridge, max_halvings, iterations: 0, last_cost: f64::NAN }
    }

    pub fn predict(&self, v: &[f64]) -> f64 {
        math::sigmoid(dot(&self.theta, v))
    }

    /// Mean cross-entropy of `theta` on `batch`.
    pub fn cost_at(theta: &[f64], batch: &[Sample]) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        batch.iter().map(|s| {
            let z = dot(theta, &s.v);
            softplus(z) - s.y * z
        }).sum::<f64>()
            / batch.len() as f64
    }

    pub fn cost(&self, batch: &[Sample]) -> f64 {
        Self::cost_at(&self.theta, batch)
    }

    /// `(1/m) sum (h - y) v`.
    pub fn gradient(&self, batch: &[Sample]) -> Vec<f64> {
        let mut g = vec![0.0; self.theta.len()];
        for s in batch {
            let r = self.predict(&s.v) - s.y;
            for (gi, vi) in g.iter_mut().zip(&s.v) {
                *gi += r * vi;
            }
        }
        let m = batch.len().max(1) as f64;
        g.iter_mut().for_each(|x| *x /= m);
        g
    }

    /// `(1/m) sum h (1 - h) v v^T + ridge * I`.
    pub fn hessian(&self, batch: &[Sample]) -> DMatrix<f64> {
        let d = self.theta.len();
        let mut h = DMatrix::<f64>::zeros(d, d);
        for s in batch {
            let p = self.predict(&s.v);
            let w = p * (1.0 - p);
            for i in 0..d {
                for j in 0..=i {
                    h[(i, j)] += w * s.v[i] * s.v[j];
                }
            }
        }
        let m = batch.len().max(1) as f64;
        for i in 0..d {
            for j in 0..=i {
                h[(i, j)] /= m;
                h[(j, i)] = h[(i, j)];
            }
            h[(i, i)] += self.ridge;
        }
        h
    }

    /// One damped Newton step on `batch`.
    pub fn newton_step(&mut self, batch: &[Sample]) -> StepOutcome {
        self.iterations += 1;
        let j0 = self.cost(batch);
        self.last_cost = j0;
        let g = self.gradient(batch);
        if batch.is_empty() || g.iter().all(|x| *x == 0.0) {
            return StepOutcome::Converged;
        }
        let h = self.hessian(batch);
        let Some(chol) = h.cholesky() else {
            return StepOutcome::Rejected;
        };
        let dir = chol.solve(&DVector::from_vec(g));
        let mut step = 1.0;
        for halvings in 0..=self.max_halvings {
            let cand: Vec<f64> = self.theta.iter().zip(dir.iter()).map(|(t, d)| t - step * d).collect();
            let j = Self::cost_at(&cand, batch);
            if j <= j0 && j.is_finite() {
                self.theta = cand;
                self.last_cost = j;
                return StepOutcome::Accepted { halvings };
            }
            step *= 0.5;
        }
        StepOutcome::Rejected
    }
}

fn regressors(s: &LobSnapshot, levels: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(1 + 2 * levels);
    v.push(1.0);
    v.extend(s.levels().iter().take(levels).map(|l| l.ask_volume as f64));
    v.extend(s.levels().iter().take(levels).map(|l| l.bid_volume as f64));
    v
}

/// Level-`k` weight of one model: the absolute coefficients on the ask and
/// bid volume of that level (k is 1-based).
fn level_weight(theta: &[f64], levels: usize, k: usize) -> f64 {
    math::abs(theta[k]) + math::abs(theta[levels + k])
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// `(local, extended)`: level 1 against levels 2-3, and levels 1-3 against
/// levels 4-6.
pub fn spatial_ratios(theta: &[f64], levels: usize) -> (f64, f64) {
    let w = |k: usize| if k <= levels { level_weight(theta, levels, k) } else { 0.0 };
    let local = ratio(w(1), w(2) + w(3));
    let extended = ratio(w(1) + w(2) + w(3), w(4) + w(5) + w(6));
    (local, extended)
}

pub const LOGISTIC_OUTPUTS: usize = 6;

/// Streaming state over blocks; yields
/// `[p_ask, p_bid, local_ask, extended_ask, local_bid, extended_bid]`.
#[derive(Debug, Clone)]
pub struct LogisticFeature {
    levels: usize,
    batch: usize,
    pub ask: LogisticModel,
    pub bid: LogisticModel,
    ask_batch: VecDeque<Sample>,
    bid_batch: VecDeque<Sample>,
    trained: usize,
}

impl LogisticFeature {
    pub fn new(config: &QuantConfig) -> Self {
        let dim = 1 + 2 * config.logistic_levels;
        let model = LogisticModel::new(dim, config.logistic_ridge, config.logistic_max_halvings);
        Self {
            levels: config.logistic_levels,
            batch: config.logistic_batch.max(1),
            ask: model.clone(),
            bid: model,
            ask_batch: VecDeque::new(),
            bid_batch: VecDeque::new(),
            trained: 0,
        }
    }

    /// The (regressors, ask label, bid label) sample of a block.
    pub fn block_sample(block: &Block, levels: usize) -> (Vec<f64>, f64, f64) {
        let n = block.snapshots.len();
        let ninth = &block.snapshots[n - 2];
        let tenth = &block.snapshots[n - 1];
        let (before, after) = (ninth.best(), tenth.best());
        let y_ask = if before.ask_price != after.ask_price { 1.0 } else { 0.0 };
        let y_bid = if before.bid_price != after.bid_price { 1.0 } else { 0.0 };
        (regressors(ninth, levels), y_ask, y_bid)
    }

    pub fn push(&mut self, block: &Block) -> [f64; LOGISTIC_OUTPUTS] {
        let (v, y_ask, y_bid) = Self::block_sample(block, self.levels);
        let out = if self.trained == 0 {
            [f64::NAN; LOGISTIC_OUTPUTS]
        } else {
            let (la, ea) = spatial_ratios(&self.ask.theta, self.levels);
            let (lb, eb) = spatial_ratios(&self.bid.theta, self.levels);
            [self.ask.predict(&v), self.bid.predict(&v), la, ea, lb, eb]
        };
        for (q, y) in [(&mut self.ask_batch, y_ask), (&mut self.bid_batch, y_bid)] {
            q.push_back(Sample { v: v.clone(), y });
            if q.len() > self.batch {
                q.pop_front();
            }
        }
        self.ask.newton_step(self.ask_batch.make_contiguous());
        self.bid.newton_step(self.bid_batch.make_contiguous());
        self.trained += 1;
        out
    }
}
