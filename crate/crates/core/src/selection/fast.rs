//! Incremental greedy rankings.
//!
//! LMS: the selected block (plus intercept) is kept as an orthonormal basis
//! of the fitting rows (modified Gram-Schmidt); every candidate carries its
//! residual against that basis on both the fitting and the scoring rows, so
//! the least-squares predictions with one more feature are a rank-one update.
//!
//! LDA: the selected block is kept as a basis orthonormal in the metric of
//! the regularised within-class scatter `A = S_W + ridge I`. In that basis
//! the discriminant problem reduces to the eigen-decomposition of the
//! `C x C` matrix `K = sum_k m_k m_k^T`, with `m_k` the whitened, count-
//! weighted class-mean offsets along basis vector `k`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix3, Vector3};

use super::entropy::histogram_entropy;
use super::{pick, Method, RankingData};
use crate::classify::NUM_CLASSES;
use crate::math;

/// Squared residual norm, relative to the original, below which a candidate
/// is taken to lie in the span of the selected block.
const DEPENDENT: f64 = 1e-20;

pub fn entropy_rank(data: &RankingData, bins: usize) -> (Vec<usize>, Vec<f64>) {
    let h: Vec<f64> = (0..data.dim())
        .map(|j| {
            let c: Vec<f64> = data.x.column(j).iter().copied().collect();
            histogram_entropy(&c, bins)
        })
        .collect();
    let mut order: Vec<usize> = (0..data.dim()).collect();
    // stable: equal entropies keep ascending index order
    order.sort_by(|a, b| h[*b].total_cmp(&h[*a]));
    let mut acc = 0.0;
    let trace = order
        .iter()
        .map(|&j| {
            acc += h[j];
            acc
        })
        .collect();
    (order, trace)
}

fn accuracy(pred: impl Iterator<Item = usize>, truth: &[usize]) -> f64 {
    let hits = pred.zip(truth).filter(|(p, t)| p == *t).count();
    hits as f64 / truth.len().max(1) as f64
}

fn argmax3(v: &[f64; NUM_CLASSES]) -> usize {
    let mut b = 0;
    for c in 1..NUM_CLASSES {
        if v[c] > v[b] {
            b = c;
        }
    }
    b
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn column(x: &DMatrix<f64>, j: usize) -> Vec<f64> {
    x.column(j).iter().copied().collect()
}

struct LmsState {
    /// Per-class indicator columns of the fitting rows.
    t_fit: Vec<Vec<f64>>,
    score_labels: Vec<usize>,
    r_fit: Vec<Vec<f64>>,
    r_score: Vec<Vec<f64>>,
    norm0: Vec<f64>,
    pred: Vec<[f64; NUM_CLASSES]>,
}

impl LmsState {
    fn new(data: &RankingData) -> Self {
        let fit = data.fit_rows();
        let score = data.score_rows();
        let nf = fit.nrows() as f64;
        let t_fit: Vec<Vec<f64>> = (0..NUM_CLASSES)
            .map(|c| data.fit_labels().iter().map(|l| if *l == c { 1.0 } else { 0.0 }).collect())
            .collect();
        // Intercept-only model: predictions are the class frequencies.
        let freq: [f64; NUM_CLASSES] = core::array::from_fn(|c| t_fit[c].iter().sum::<f64>() / nf);
        let mut r_fit = Vec::with_capacity(data.dim());
        let mut r_score = Vec::with_capacity(data.dim());
        let mut norm0 = Vec::with_capacity(data.dim());
        for j in 0..data.dim() {
            let f = column(&fit, j);
            let s = column(&score, j);
            norm0.push(dot(&f, &f));
            let m = f.iter().sum::<f64>() / nf;
            r_fit.push(f.iter().map(|v| v - m).collect());
            r_score.push(s.iter().map(|v| v - m).collect());
        }
        Self {
            t_fit,
            score_labels: data.score_labels().to_vec(),
            r_fit,
            r_score,
            norm0,
            pred: vec![freq; score.nrows()],
        }
    }

    fn dependent(&self, i: usize) -> Option<f64> {
        let nr = dot(&self.r_fit[i], &self.r_fit[i]);
        (nr <= DEPENDENT * self.norm0[i] || nr == 0.0).then_some(nr)
    }

    fn evaluate(&self, method: Method, i: usize) -> f64 {
        let onehot_err = |p: &[f64; NUM_CLASSES], l: usize| -> f64 {
            (0..NUM_CLASSES).map(|c| {
                let d = p[c] - if c == l { 1.0 } else { 0.0 };
                d * d
            }).sum()
        };
        let new_pred = |beta: &[f64; NUM_CLASSES], j: usize| -> [f64; NUM_CLASSES] {
            core::array::from_fn(|c| self.pred[j][c] + self.r_score[i][j] * beta[c])
        };
        let beta: [f64; NUM_CLASSES] = if self.dependent(i).is_some() {
            [0.0; NUM_CLASSES]
        } else {
            let nr = dot(&self.r_fit[i], &self.r_fit[i]);
            core::array::from_fn(|c| dot(&self.r_fit[i], &self.t_fit[c]) / nr)
        };
        let n = self.pred.len();
        if method == Method::Lms1 {
            accuracy((0..n).map(|j| argmax3(&new_pred(&beta, j))), &self.score_labels)
        } else {
            math::sqrt((0..n).map(|j| onehot_err(&new_pred(&beta, j), self.score_labels[j])).sum())
        }
    }

    fn accept(&mut self, w: usize, remaining: &[usize]) {
        if self.dependent(w).is_some() {
            return;
        }
        let norm = math::sqrt(dot(&self.r_fit[w], &self.r_fit[w]));
        let q: Vec<f64> = self.r_fit[w].iter().map(|v| v / norm).collect();
        let qs: Vec<f64> = self.r_score[w].iter().map(|v| v / norm).collect();
        let coef: [f64; NUM_CLASSES] = core::array::from_fn(|c| dot(&q, &self.t_fit[c]));
        for (j, p) in self.pred.iter_mut().enumerate() {
            for c in 0..NUM_CLASSES {
                p[c] += qs[j] * coef[c];
            }
        }
        for &i in remaining {
            let a = dot(&q, &self.r_fit[i]);
            for (r, qv) in self.r_fit[i].iter_mut().zip(&q) {
                *r -= a * qv;
            }
            for (r, qv) in self.r_score[i].iter_mut().zip(&qs) {
                *r -= a * qv;
            }
        }
    }
}

trait Incremental: Sync {
    fn evaluate(&self, method: Method, i: usize) -> f64;
    fn accept(&mut self, w: usize, remaining: &[usize]);
}

impl Incremental for LmsState {
    fn evaluate(&self, method: Method, i: usize) -> f64 {
        LmsState::evaluate(self, method, i)
    }

    fn accept(&mut self, w: usize, remaining: &[usize]) {
        LmsState::accept(self, w, remaining)
    }
}

fn drive<S: Incremental>(method: Method, dim: usize, st: &mut S) -> (Vec<usize>, Vec<f64>) {
    let mut remaining: Vec<usize> = (0..dim).collect();
    let mut order = Vec::with_capacity(dim);
    let mut trace = Vec::with_capacity(dim);
    while !remaining.is_empty() {
        let state: &S = st;
        let scores: Vec<f64> = crate::par::map(&remaining, |&i| {
            let v = state.evaluate(method, i);
            if v.is_nan() {
                log::warn!("{} criterion undefined for candidate {i}; scored worst", method.as_str());
                method.worst()
            } else {
                v
            }
        });
        let k = pick(method, &scores);
        let w = remaining.remove(k);
        st.accept(w, &remaining);
        order.push(w);
        trace.push(scores[k]);
    }
    (order, trace)
}

pub fn lms_rank(method: Method, data: &RankingData) -> (Vec<usize>, Vec<f64>) {
    drive(method, data.dim(), &mut LmsState::new(data))
}

struct LdaState {
    a: DMatrix<f64>,
    counts: [usize; NUM_CLASSES],
    n_present: usize,
    score_labels: Vec<usize>,
    /// Per candidate: scoring-row coordinates not yet explained by the basis.
    res_score: Vec<Vec<f64>>,
    /// Per candidate: the same for the class means and the overall mean.
    res_mu: Vec<[f64; NUM_CLASSES + 1]>,
    /// Per candidate: squared A-norm already captured by the basis.
    captured: Vec<f64>,
    basis: Vec<Vec<f64>>,
    a_basis: Vec<Vec<f64>>,
    k: Matrix3<f64>,
    p_score: Vec<Vector3<f64>>,
    p_mu: [Vector3<f64>; NUM_CLASSES],
}

struct Direction {
    nu: f64,
    m: Vector3<f64>,
    mu: [f64; NUM_CLASSES],
}

impl LdaState {
    fn new(data: &RankingData, ridge: f64) -> Self {
        let fit = data.fit_rows();
        let score = data.score_rows();
        let labels = data.fit_labels();
        let d = data.dim();
        let nf = fit.nrows() as f64;
        let mut counts = [0usize; NUM_CLASSES];
        for &c in labels {
            counts[c] += 1;
        }
        let mut means = [vec![0.0; d], vec![0.0; d], vec![0.0; d]];
        for (i, &c) in labels.iter().enumerate() {
            for j in 0..d {
                means[c][j] += fit[(i, j)];
            }
        }
        for c in 0..NUM_CLASSES {
            if counts[c] > 0 {
                means[c].iter_mut().for_each(|v| *v /= counts[c] as f64);
            }
        }
        let overall: Vec<f64> = (0..d).map(|j| fit.column(j).sum() / nf).collect();
        let centred = DMatrix::from_fn(fit.nrows(), d, |i, j| fit[(i, j)] - means[labels[i]][j]);
        let mut a = centred.transpose() * &centred;
        for j in 0..d {
            a[(j, j)] += ridge;
        }
        Self {
            a,
            counts,
            n_present: counts.iter().filter(|c| **c > 0).count(),
            score_labels: data.score_labels().to_vec(),
            res_score: (0..d).map(|j| column(&score, j)).collect(),
            res_mu: (0..d).map(|j| [means[0][j], means[1][j], means[2][j], overall[j]]).collect(),
            captured: vec![0.0; d],
            basis: Vec::new(),
            a_basis: Vec::new(),
            k: Matrix3::zeros(),
            p_score: vec![Vector3::zeros(); score.nrows()],
            p_mu: [Vector3::zeros(); NUM_CLASSES],
        }
    }

    /// The new basis direction contributed by candidate `i`, if any.
    fn direction(&self, i: usize) -> Option<Direction> {
        let norm2 = self.a[(i, i)] - self.captured[i];
        if !(norm2 > DEPENDENT * self.a[(i, i)]) {
            return None;
        }
        let nu = 1.0 / math::sqrt(norm2);
        let r = &self.res_mu[i];
        let mu: [f64; NUM_CLASSES] = core::array::from_fn(|c| nu * r[c]);
        let all = nu * r[NUM_CLASSES];
        let m = Vector3::from_fn(|c, _| {
            if self.counts[c] > 0 {
                math::sqrt(self.counts[c] as f64) * (mu[c] - all)
            } else {
                0.0
            }
        });
        Some(Direction { nu, m, mu })
    }

    fn evaluate(&self, method: Method, i: usize) -> f64 {
        if self.n_present < 2 {
            return f64::NAN;
        }
        let dir = self.direction(i);
        let k = match &dir {
            Some(d) => self.k + d.m * d.m.transpose(),
            None => self.k,
        };
        let eig = k.symmetric_eigen();
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]).then(a.cmp(b)));
        let lmax = eig.eigenvalues[idx[0]].max(0.0);
        let axes: Vec<Vector3<f64>> = idx
            .iter()
            .take(self.n_present - 1)
            .filter(|&&j| lmax > 0.0 && eig.eigenvalues[j] > crate::classify::lda::EIGEN_DROP * lmax)
            .map(|&j| eig.eigenvectors.column(j) / math::sqrt(eig.eigenvalues[j]))
            .collect();
        let project = |p: Vector3<f64>| -> Vec<f64> { axes.iter().map(|u| u.dot(&p)).collect() };

        let ys: Vec<Vec<f64>> = (0..self.p_score.len())
            .map(|j| {
                let p = match &dir {
                    Some(d) => self.p_score[j] + d.m * (d.nu * self.res_score[i][j]),
                    None => self.p_score[j],
                };
                project(p)
            })
            .collect();

        if method == Method::Lda1 {
            let centroids: Vec<Option<Vec<f64>>> = (0..NUM_CLASSES)
                .map(|c| {
                    (self.counts[c] > 0).then(|| {
                        let p = match &dir {
                            Some(d) => self.p_mu[c] + d.m * d.mu[c],
                            None => self.p_mu[c],
                        };
                        project(p)
                    })
                })
                .collect();
            accuracy(ys.iter().map(|y| crate::classify::lda::nearest(y, &centroids)), &self.score_labels)
        } else {
            trace_ratio(&ys, &self.score_labels, axes.len())
        }
    }

    fn accept(&mut self, w: usize, remaining: &[usize]) {
        let Some(dir) = self.direction(w) else {
            return;
        };
        let d = self.a.nrows();
        let mut z = vec![0.0; d];
        z[w] = dir.nu;
        for (zk, ak) in self.basis.iter().zip(&self.a_basis) {
            let c = ak[w];
            for (zi, v) in z.iter_mut().zip(zk) {
                *zi -= dir.nu * c * v;
            }
        }
        let az: Vec<f64> = (0..d).map(|i| (0..d).map(|j| self.a[(i, j)] * z[j]).sum()).collect();
        let xt: Vec<f64> = self.res_score[w].iter().map(|v| dir.nu * v).collect();
        let all = dir.nu * self.res_mu[w][NUM_CLASSES];

        self.k += dir.m * dir.m.transpose();
        for (p, x) in self.p_score.iter_mut().zip(&xt) {
            *p += dir.m * *x;
        }
        for c in 0..NUM_CLASSES {
            self.p_mu[c] += dir.m * dir.mu[c];
        }
        for &i in remaining {
            let c = az[i];
            self.captured[i] += c * c;
            for (r, x) in self.res_score[i].iter_mut().zip(&xt) {
                *r -= c * x;
            }
            for k in 0..NUM_CLASSES {
                self.res_mu[i][k] -= c * dir.mu[k];
            }
            self.res_mu[i][NUM_CLASSES] -= c * all;
        }
        self.basis.push(z);
        self.a_basis.push(az);
    }
}

impl Incremental for LdaState {
    fn evaluate(&self, method: Method, i: usize) -> f64 {
        LdaState::evaluate(self, method, i)
    }

    fn accept(&mut self, w: usize, remaining: &[usize]) {
        LdaState::accept(self, w, remaining)
    }
}

fn trace_ratio(ys: &[Vec<f64>], labels: &[usize], dim: usize) -> f64 {
    let mut counts = [0usize; NUM_CLASSES];
    let mut means = [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    let mut total = vec![0.0; dim];
    for (y, &c) in ys.iter().zip(labels) {
        counts[c] += 1;
        for k in 0..dim {
            means[c][k] += y[k];
            total[k] += y[k];
        }
    }
    for c in 0..NUM_CLASSES {
        if counts[c] > 0 {
            means[c].iter_mut().for_each(|v| *v /= counts[c] as f64);
        }
    }
    total.iter_mut().for_each(|v| *v /= ys.len().max(1) as f64);
    let within: f64 = ys.iter().zip(labels).map(|(y, &c)| crate::linalg::sq_dist(y, &means[c])).sum();
    let between: f64 = (0..NUM_CLASSES)
        .filter(|c| counts[*c] > 0)
        .map(|c| counts[c] as f64 * crate::linalg::sq_dist(&means[c], &total))
        .sum();
    if between > 0.0 {
        within / between
    } else {
        f64::INFINITY
    }
}

pub fn lda_rank(method: Method, data: &RankingData, ridge: f64) -> (Vec<usize>, Vec<f64>) {
    drive(method, data.dim(), &mut LdaState::new(data, ridge))
}
