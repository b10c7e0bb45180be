//! Selection criteria re-derived from their definitions: pseudoinverse
//! least squares, whitened-scatter discriminant analysis and histogram
//! entropy.

use lobfeat_core::selection::Method;
use nalgebra::{DMatrix, DVector};

pub struct Split {
    pub x: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub n_fit: usize,
}

fn rows(x: &DMatrix<f64>, from: usize, to: usize, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(to - from, cols.len(), |i, j| x[(from + i, cols[j])])
}

fn targets(labels: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), 3, |i, c| f64::from(u8::from(labels[i] == c)))
}

fn first_max(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn bias(x: DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols() + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] })
}

pub fn entropy(x: &[f64], bins: usize) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return 0.0;
    }
    let mut counts = vec![0.0; bins];
    for v in x {
        let k = ((v - lo) / ((hi - lo) / bins as f64)).floor() as usize;
        counts[k.min(bins - 1)] += 1.0;
    }
    let n = x.len() as f64;
    counts.iter().filter(|c| **c > 0.0).map(|c| -(c / n) * (c / n).ln()).sum()
}

fn lms(s: &Split, cols: &[usize], method: Method) -> f64 {
    let n = s.x.nrows();
    let a = bias(rows(&s.x, 0, s.n_fit, cols));
    let w = a.clone().pseudo_inverse(1e-12).unwrap() * targets(&s.labels[..s.n_fit]);
    let out = bias(rows(&s.x, s.n_fit, n, cols)) * w;
    let truth = &s.labels[s.n_fit..];
    if method == Method::Lms1 {
        let pred: Vec<usize> = (0..out.nrows()).map(|i| first_max(&out.row(i).iter().copied().collect::<Vec<_>>())).collect();
        accuracy(&pred, truth)
    } else {
        (out - targets(truth)).norm()
    }
}

fn means(y: &DMatrix<f64>, labels: &[usize]) -> Vec<Option<DVector<f64>>> {
    (0..3)
        .map(|c| {
            let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            (!idx.is_empty()).then(|| {
                let mut m = DVector::zeros(y.ncols());
                for &i in &idx {
                    m += y.row(i).transpose();
                }
                m / idx.len() as f64
            })
        })
        .collect()
}

fn lda(s: &Split, cols: &[usize], method: Method, ridge: f64) -> f64 {
    let n = s.x.nrows();
    let fit = rows(&s.x, 0, s.n_fit, cols);
    let lf = &s.labels[..s.n_fit];
    let p = cols.len();
    let mu = means(&fit, lf);
    let overall = fit.row_mean().transpose();
    let mut sw = DMatrix::identity(p, p) * ridge;
    let mut sb = DMatrix::zeros(p, p);
    for i in 0..s.n_fit {
        let d = fit.row(i).transpose() - mu[lf[i]].as_ref().unwrap();
        sw += &d * d.transpose();
    }
    let present = mu.iter().flatten().count();
    for (c, m) in mu.iter().enumerate() {
        if let Some(m) = m {
            let k = lf.iter().filter(|l| **l == c).count() as f64;
            let d = m - &overall;
            sb += &d * d.transpose() * k;
        }
    }
    // W = Sw^{-1/2} V with V the leading eigenvectors of Sw^{-1/2} Sb Sw^{-1/2}
    let e = sw.symmetric_eigen();
    let isq = &e.eigenvectors
        * DMatrix::from_diagonal(&e.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * e.eigenvectors.transpose();
    let m = &isq * sb * &isq;
    let m = (&m + m.transpose()) / 2.0;
    let f = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|a, b| f.eigenvalues[*b].total_cmp(&f.eigenvalues[*a]));
    let top = f.eigenvalues[order[0]].max(0.0);
    let keep: Vec<usize> =
        order.into_iter().take(present - 1).filter(|&k| top > 0.0 && f.eigenvalues[k] > 1e-12 * top).collect();
    let w = DMatrix::from_fn(p, keep.len(), |i, j| (&isq * f.eigenvectors.column(keep[j]))[i]);
    let y = rows(&s.x, s.n_fit, n, cols) * &w;
    let truth = &s.labels[s.n_fit..];
    if method == Method::Lda2 {
        let ym = means(&y, truth);
        let all = y.row_mean().transpose();
        let mut within = 0.0;
        for i in 0..y.nrows() {
            within += (y.row(i).transpose() - ym[truth[i]].as_ref().unwrap()).norm_squared();
        }
        let mut between = 0.0;
        for (c, m) in ym.iter().enumerate() {
            if let Some(m) = m {
                between += truth.iter().filter(|l| **l == c).count() as f64 * (m - &all).norm_squared();
            }
        }
        return if between > 0.0 { within / between } else { f64::INFINITY };
    }
    let centroids: Vec<Option<DVector<f64>>> = mu.iter().map(|m| m.as_ref().map(|m| w.transpose() * m)).collect();
    let pred: Vec<usize> = (0..y.nrows())
        .map(|i| {
            let r = y.row(i).transpose();
            let mut best = (f64::INFINITY, 0);
            for (c, m) in centroids.iter().enumerate() {
                if let Some(m) = m {
                    let d = (&r - m).norm_squared();
                    if d < best.0 {
                        best = (d, c);
                    }
                }
            }
            best.1
        })
        .collect();
    accuracy(&pred, truth)
}

pub fn criterion(method: Method, s: &Split, cols: &[usize], bins: usize, ridge: f64) -> f64 {
    match method {
        Method::Entropy => cols.iter().map(|&j| entropy(&s.x.column(j).iter().copied().collect::<Vec<_>>(), bins)).sum(),
        Method::Lms1 | Method::Lms2 => lms(s, cols, method),
        Method::Lda1 | Method::Lda2 => lda(s, cols, method, ridge),
    }
}

fn better(method: Method, a: f64, b: f64) -> bool {
    if matches!(method, Method::Entropy | Method::Lms1 | Method::Lda1) {
        a > b
    } else {
        a < b
    }
}

/// Greedy forward ranking: append the candidate whose stacked block scores
/// best, earliest index on ties. Returns the order and per-step scores of
/// every candidate.
pub fn greedy(method: Method, s: &Split, bins: usize, ridge: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    let mut order = Vec::new();
    let mut steps = Vec::new();
    let mut left: Vec<usize> = (0..s.x.ncols()).collect();
    while !left.is_empty() {
        let scores: Vec<f64> = left
            .iter()
            .map(|&j| {
                let mut cols = order.clone();
                cols.push(j);
                criterion(method, s, &cols, bins, ridge)
            })
            .collect();
        let mut k = 0;
        for i in 1..scores.len() {
            if better(method, scores[i], scores[k]) {
                k = i;
            }
        }
        order.push(left.remove(k));
        steps.push(scores);
    }
    (order, steps)
}
