use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::folds::{anchored_folds, FoldSpec};
use super::labels::extract_labels;
use super::zscore::{apply_zscore, expanding_zscore};
use crate::classify::{score, Class, ClassifierKind, Model, Scores};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::math;
use crate::selection::{rank, Method, Ranking, RankingData};

/// One trading day: raw features (rows are blocks in time order), warm-up
/// flags and labels per horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Day {
    pub x: DMatrix<f64>,
    pub flags: Vec<bool>,
    /// Horizon (in blocks) to per-row labels.
    pub labels: BTreeMap<usize, Vec<Option<Class>>>,
}

impl Day {
    pub fn new(x: DMatrix<f64>, flags: Vec<bool>, labels: BTreeMap<usize, Vec<Option<Class>>>) -> Result<Self> {
        if flags.len() != x.nrows() {
            return Err(Error::LengthMismatch { expected: x.nrows(), found: flags.len() });
        }
        if let Some(l) = labels.values().find(|l| l.len() != x.nrows()) {
            return Err(Error::LengthMismatch { expected: x.nrows(), found: l.len() });
        }
        Ok(Self { x, flags, labels })
    }

    /// Labels every configured horizon from the block mids.
    pub fn from_features(m: &FeatureMatrix, config: &Config) -> Result<Self> {
        let p = &config.pipeline;
        let mut labels = BTreeMap::new();
        for &h in &p.horizons {
            labels.insert(h, extract_labels(&m.mids, h, p.threshold, p.smoothing_span, p.smoother)?);
        }
        let x = DMatrix::from_row_slice(m.len(), m.dim(), &m.values);
        Day::new(x, m.flags.clone(), labels)
    }

    /// Stacks several streams (e.g. stocks) of the same day in order.
    pub fn concat(parts: &[Day]) -> Result<Day> {
        let first = parts.first().ok_or(Error::InsufficientData { needed: 1, available: 0 })?;
        let d = first.x.ncols();
        let n: usize = parts.iter().map(|p| p.x.nrows()).sum();
        let mut x = DMatrix::zeros(n, d);
        let mut flags = Vec::with_capacity(n);
        let mut labels: BTreeMap<usize, Vec<Option<Class>>> = BTreeMap::new();
        let mut r = 0;
        for p in parts {
            if p.x.ncols() != d {
                return Err(Error::LengthMismatch { expected: d, found: p.x.ncols() });
            }
            x.rows_mut(r, p.x.nrows()).copy_from(&p.x);
            r += p.x.nrows();
            flags.extend_from_slice(&p.flags);
            for h in first.labels.keys() {
                let l = p.labels.get(h).ok_or_else(|| Error::InvalidParameter("streams disagree on horizons".into()))?;
                labels.entry(*h).or_default().extend_from_slice(l);
            }
        }
        Day::new(x, flags, labels)
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }
}

/// Normalised training and test rows of one fold.
struct FoldData {
    train: DMatrix<f64>,
    train_flags: Vec<bool>,
    train_labels: BTreeMap<usize, Vec<Option<Class>>>,
    test: DMatrix<f64>,
    test_flags: Vec<bool>,
    test_labels: BTreeMap<usize, Vec<Option<Class>>>,
}

fn fold_data(days: &[Day], spec: &FoldSpec, floor: f64) -> Result<FoldData> {
    let train = Day::concat(&days[..spec.train_days])?;
    let (xn, stats) = expanding_zscore(&train.x, &train.flags, floor);
    let test = &days[spec.test_day];
    Ok(FoldData {
        train: xn,
        train_flags: train.flags,
        train_labels: train.labels,
        test: apply_zscore(&test.x, &stats, floor),
        test_flags: test.flags.clone(),
        test_labels: test.labels.clone(),
    })
}

/// Rows that are unflagged and labelled, with their class indices.
fn usable(flags: &[bool], labels: Option<&Vec<Option<Class>>>) -> (Vec<usize>, Vec<usize>) {
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    if let Some(labels) = labels {
        for (i, (f, l)) in flags.iter().zip(labels).enumerate() {
            if let (false, Some(c)) = (f, l) {
                rows.push(i);
                classes.push(c.index());
            }
        }
    }
    (rows, classes)
}

fn submatrix(x: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| x[(rows[i], cols[j])])
}

/// Ranking on the (normalised) training rows of a fold.
pub fn rank_fold(x: &DMatrix<f64>, flags: &[bool], labels: &[Option<Class>], method: Method, config: &Config) -> Result<Ranking> {
    let labels_owned = labels.to_vec();
    let (rows, classes) = usable(flags, Some(&labels_owned));
    let all: Vec<usize> = (0..x.ncols()).collect();
    let data = RankingData::new(submatrix(x, &rows, &all), classes, config.selection.fit_fraction)?;
    rank(method, &data, &config.selection)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub fold: usize,
    pub horizon: usize,
    pub method: Method,
    pub classifier: ClassifierKind,
    pub d: usize,
    pub scores: Option<Scores>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(v: &[f64]) -> MeanStd {
    if v.is_empty() {
        return MeanStd { mean: f64::NAN, std: f64::NAN };
    }
    MeanStd { mean: math::mean(v), std: math::sqrt(math::variance(v)) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub horizon: usize,
    pub method: Method,
    pub classifier: ClassifierKind,
    pub d: usize,
    pub accuracy: MeanStd,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
    pub folds_ok: usize,
    pub folds_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub folds: Vec<FoldSpec>,
    pub feature_counts: Vec<usize>,
    /// Rankings used for each horizon (and fold, when re-ranking per fold).
    pub rankings: Vec<(usize, usize, Ranking)>,
    pub results: Vec<TaskResult>,
    pub summary: Vec<SummaryRow>,
}

impl Report {
    pub fn row(&self, horizon: usize, method: Method, classifier: ClassifierKind, d: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.horizon == horizon && r.method == method && r.classifier == classifier && r.d == d)
    }

    /// Mean F1 against the number of features.
    pub fn curve(&self, horizon: usize, method: Method, classifier: ClassifierKind) -> Vec<(usize, f64)> {
        self.summary
            .iter()
            .filter(|r| r.horizon == horizon && r.method == method && r.classifier == classifier)
            .map(|r| (r.d, r.f1.mean))
            .collect()
    }

    /// Row with the highest mean F1 (first on ties).
    pub fn best(&self) -> Option<&SummaryRow> {
        self.summary.iter().fold(None, |best: Option<&SummaryRow>, r| match best {
            Some(b) if !(r.f1.mean > b.f1.mean) => Some(b),
            _ if r.f1.mean.is_nan() => best,
            _ => Some(r),
        })
    }
}

/// Feature counts evaluated: the configured slice plus the curve stride,
/// capped at the dimension.
pub fn feature_counts(config: &Config, dim: usize) -> Vec<usize> {
    let p = &config.pipeline;
    let mut ds: Vec<usize> = p.top_k.iter().map(|d| (*d).min(dim)).filter(|d| *d > 0).collect();
    if p.curve_stride > 0 {
        ds.extend((p.curve_stride..=dim).step_by(p.curve_stride));
    }
    ds.sort_unstable();
    ds.dedup();
    ds
}

fn train_and_score(
    fd: &FoldData,
    horizon: usize,
    cols: &[usize],
    classifier: ClassifierKind,
    config: &Config,
) -> Result<(Model, Scores)> {
    let (tr_rows, tr_y) = usable(&fd.train_flags, fd.train_labels.get(&horizon));
    let (te_rows, te_y) = usable(&fd.test_flags, fd.test_labels.get(&horizon));
    if tr_rows.is_empty() || te_rows.is_empty() {
        return Err(Error::InsufficientData { needed: 1, available: 0 });
    }
    let model = Model::train(
        classifier,
        &submatrix(&fd.train, &tr_rows, cols),
        &tr_y,
        &config.classify,
        config.selection.lda_ridge,
    )?;
    let pred = model.predict(&submatrix(&fd.test, &te_rows, cols));
    let scores = score(&pred, &te_y)?;
    Ok((model, scores))
}

/// Trains one classifier on a fold's anchored span using `cols` and scores
/// it on the test day.
pub fn evaluate_fold(
    days: &[Day],
    spec: &FoldSpec,
    horizon: usize,
    cols: &[usize],
    classifier: ClassifierKind,
    config: &Config,
) -> Result<(Model, Scores)> {
    if spec.test_day >= days.len() || spec.train_days == 0 || spec.train_days > spec.test_day {
        return Err(Error::InvalidParameter(alloc::format!("fold {} does not fit {} days", spec.index, days.len())));
    }
    let dim = days[0].dim();
    if let Some(&c) = cols.iter().find(|&&c| c >= dim) {
        return Err(Error::InvalidParameter(alloc::format!("feature {c} out of range (D = {dim})")));
    }
    let fd = fold_data(days, spec, config.pipeline.std_floor)?;
    train_and_score(&fd, horizon, cols, classifier, config)
}

/// Ranking from the first `train_days` days, normalised as a fold's
/// training span.
pub fn rank_on_fold(days: &[Day], train_days: usize, horizon: usize, method: Method, config: &Config) -> Result<Ranking> {
    if train_days == 0 || train_days > days.len() {
        return Err(Error::InsufficientData { needed: train_days.max(1), available: days.len() });
    }
    let train = Day::concat(&days[..train_days])?;
    let (xn, _) = expanding_zscore(&train.x, &train.flags, config.pipeline.std_floor);
    let labels = train
        .labels
        .get(&horizon)
        .ok_or_else(|| Error::InvalidParameter(alloc::format!("no labels for horizon {horizon}")))?;
    rank_fold(&xn, &train.flags, labels, method, config)
}

#[derive(Clone, Copy)]
struct Task {
    fold: usize,
    horizon: usize,
    method: Method,
    classifier: ClassifierKind,
    d: usize,
}

/// Anchored evaluation over every (fold, horizon, method, classifier, d).
pub fn run_protocol(days: &[Day], config: &Config) -> Result<Report> {
    if days.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, available: days.len() });
    }
    let dim = days[0].dim();
    if let Some(d) = days.iter().find(|d| d.dim() != dim) {
        return Err(Error::LengthMismatch { expected: dim, found: d.dim() });
    }
    let p = &config.pipeline;
    let folds = anchored_folds(days.len());
    let fold_data: Vec<Result<FoldData>> =
        crate::par::map(&folds, |spec| fold_data(days, spec, p.std_floor));

    // Rankings: from the first fold's training data, or per fold.
    let rank_folds: Vec<usize> = if p.rerank_per_fold { (0..folds.len()).collect() } else { alloc::vec![0] };
    let mut jobs = Vec::new();
    for &f in &rank_folds {
        for &h in &p.horizons {
            for m in Method::ALL {
                jobs.push((f, h, m));
            }
        }
    }
    let ranked: Vec<((usize, usize, Method), Result<Ranking>)> = crate::par::map(&jobs, |&(f, h, m)| {
        let r = match &fold_data[f] {
            Ok(fd) => match fd.train_labels.get(&h) {
                Some(l) => rank_fold(&fd.train, &fd.train_flags, l, m, config),
                None => Err(Error::InvalidParameter(alloc::format!("no labels for horizon {h}"))),
            },
            Err(e) => Err(e.clone()),
        };
        ((f, h, m), r)
    });
    let ranking_for = |fold: usize, h: usize, m: Method| -> core::result::Result<&Ranking, String> {
        let f = if p.rerank_per_fold { fold } else { 0 };
        ranked
            .iter()
            .find(|(k, _)| *k == (f, h, m))
            .map(|(_, r)| r.as_ref().map_err(|e| e.to_string()))
            .unwrap_or_else(|| Err("ranking missing".into()))
    };

    let ds = feature_counts(config, dim);
    let mut tasks = Vec::new();
    for f in 0..folds.len() {
        for &h in &p.horizons {
            for m in Method::ALL {
                for c in ClassifierKind::ALL {
                    for &d in &ds {
                        tasks.push(Task { fold: f, horizon: h, method: m, classifier: c, d });
                    }
                }
            }
        }
    }
    let results: Vec<TaskResult> = crate::par::map(&tasks, |t| {
        let outcome = (|| -> core::result::Result<Scores, String> {
            let fd = fold_data[t.fold].as_ref().map_err(|e| e.to_string())?;
            let ranking = ranking_for(t.fold, t.horizon, t.method)?;
            train_and_score(fd, t.horizon, ranking.top(t.d), t.classifier, config)
                .map(|(_, s)| s)
                .map_err(|e| e.to_string())
        })();
        let (scores, error) = match outcome {
            Ok(s) => (Some(s), None),
            Err(e) => {
                log::warn!("fold {} h={} {} {} d={} failed: {e}", folds[t.fold].index, t.horizon, t.method.as_str(), t.classifier.as_str(), t.d);
                (None, Some(e))
            }
        };
        TaskResult {
            fold: folds[t.fold].index,
            horizon: t.horizon,
            method: t.method,
            classifier: t.classifier,
            d: t.d,
            scores,
            error,
        }
    });

    let mut summary = Vec::new();
    for &h in &p.horizons {
        for m in Method::ALL {
            for c in ClassifierKind::ALL {
                for &d in &ds {
                    let group: Vec<&TaskResult> = results
                        .iter()
                        .filter(|r| r.horizon == h && r.method == m && r.classifier == c && r.d == d)
                        .collect();
                    let ok: Vec<&Scores> = group.iter().filter_map(|r| r.scores.as_ref()).collect();
                    let pick = |f: fn(&Scores) -> f64| mean_std(&ok.iter().map(|s| f(s)).collect::<Vec<_>>());
                    summary.push(SummaryRow {
                        horizon: h,
                        method: m,
                        classifier: c,
                        d,
                        accuracy: pick(|s| s.accuracy),
                        precision: pick(|s| s.precision),
                        recall: pick(|s| s.recall),
                        f1: pick(|s| s.f1),
                        folds_ok: ok.len(),
                        folds_failed: group.len() - ok.len(),
                    });
                }
            }
        }
    }
    let rankings = ranked
        .into_iter()
        .filter_map(|((f, h, _), r)| r.ok().map(|r| (folds[f].index, h, r)))
        .collect();
    Ok(Report { folds, feature_counts: ds, rankings, results, summary })
}
