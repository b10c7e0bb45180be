use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::NUM_CLASSES;
use crate::error::{Error, Result};

/// Per-class confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class_f1: Vec<f64>,
    pub confusion: Vec<Confusion>,
}

fn div(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// Accuracy and macro-averaged precision, recall and F1 over the three
/// classes. A class with an undefined ratio contributes 0.
pub fn score(pred: &[usize], truth: &[usize]) -> Result<Scores> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), found: pred.len() });
    }
    let n = truth.len();
    let mut conf = [Confusion::default(); NUM_CLASSES];
    for c in 0..NUM_CLASSES {
        for (p, t) in pred.iter().zip(truth) {
            match (*p == c, *t == c) {
                (true, true) => conf[c].tp += 1,
                (true, false) => conf[c].fp += 1,
                (false, true) => conf[c].fn_ += 1,
                (false, false) => conf[c].tn += 1,
            }
        }
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    let (mut ps, mut rs, mut fs) = (0.0, 0.0, 0.0);
    let mut per_class = Vec::with_capacity(NUM_CLASSES);
    for k in &conf {
        let p = div(k.tp as f64, (k.tp + k.fp) as f64);
        let r = div(k.tp as f64, (k.tp + k.fn_) as f64);
        let f = div(2.0 * p * r, p + r);
        ps += p;
        rs += r;
        fs += f;
        per_class.push(f);
    }
    let c = NUM_CLASSES as f64;
    Ok(Scores {
        accuracy: div(correct as f64, n as f64),
        precision: ps / c,
        recall: rs / c,
        f1: fs / c,
        per_class_f1: per_class,
        confusion: conf.to_vec(),
    })
}
