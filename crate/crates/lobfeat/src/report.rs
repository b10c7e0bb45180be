//! Report rendering in JSON, CSV and Markdown, and aggregation of per-fold
//! metrics files written by `lobfeat evaluate`.

use std::fmt::Write as _;
use std::path::Path;

use lobfeat_core::classify::{ClassifierKind, Scores};
use lobfeat_core::pipeline::{MeanStd, Report, SummaryRow};
use lobfeat_core::selection::Method;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// Metrics of one fold as written by `lobfeat evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub horizon: usize,
    pub method: Method,
    pub classifier: ClassifierKind,
    pub d: usize,
    pub scores: Option<Scores>,
    pub error: Option<String>,
    pub config_hash: String,
}

fn mean_std(v: &[f64]) -> MeanStd {
    if v.is_empty() {
        return MeanStd { mean: f64::NAN, std: f64::NAN };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    MeanStd { mean, std: var.sqrt() }
}

/// Summary rows over per-fold metrics; failed folds are counted but excluded.
pub fn summarize(metrics: &[FoldMetrics]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, Method, ClassifierKind, usize)> =
        metrics.iter().map(|m| (m.horizon, m.method, m.classifier, m.d)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(horizon, method, classifier, d)| {
            let group: Vec<&FoldMetrics> = metrics
                .iter()
                .filter(|m| (m.horizon, m.method, m.classifier, m.d) == (horizon, method, classifier, d))
                .collect();
            let ok: Vec<&Scores> = group.iter().filter_map(|m| m.scores.as_ref()).collect();
            let pick = |f: fn(&Scores) -> f64| mean_std(&ok.iter().map(|s| f(s)).collect::<Vec<_>>());
            SummaryRow {
                horizon,
                method,
                classifier,
                d,
                accuracy: pick(|s| s.accuracy),
                precision: pick(|s| s.precision),
                recall: pick(|s| s.recall),
                f1: pick(|s| s.f1),
                folds_ok: ok.len(),
                folds_failed: group.len() - ok.len(),
            }
        })
        .collect()
}

/// Reads every `*.json` under `dir`: full reports contribute their task
/// results, fold metrics files contribute themselves.
pub fn collect_runs(dir: &Path) -> Result<Vec<FoldMetrics>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let value: serde_json::Value = crate::io::read_json(&p)?;
        if let Ok(m) = serde_json::from_value::<FoldMetrics>(value.clone()) {
            out.push(m);
        } else if let Ok(r) = serde_json::from_value::<Report>(value) {
            out.extend(r.results.into_iter().map(|t| FoldMetrics {
                fold: t.fold,
                horizon: t.horizon,
                method: t.method,
                classifier: t.classifier,
                d: t.d,
                scores: t.scores,
                error: t.error,
                config_hash: String::new(),
            }));
        } else {
            log::debug!("skipping {}", p.display());
        }
    }
    Ok(out)
}

fn pm(m: &MeanStd) -> String {
    if m.mean.is_nan() {
        return "n/a".into();
    }
    format!("{:.4} ± {:.4}", m.mean, m.std)
}

pub fn csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(
        "horizon,method,classifier,d,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,folds_ok,folds_failed\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.horizon,
            r.method.as_str(),
            r.classifier.as_str(),
            r.d,
            r.accuracy.mean,
            r.accuracy.std,
            r.precision.mean,
            r.precision.std,
            r.recall.mean,
            r.recall.std,
            r.f1.mean,
            r.f1.std,
            r.folds_ok,
            r.folds_failed
        );
    }
    s
}

/// One table per (horizon, d): a row per sorting/classifier pair, followed
/// by the F1-versus-d curves.
pub fn markdown(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let mut horizons: Vec<usize> = rows.iter().map(|r| r.horizon).collect();
    horizons.sort_unstable();
    horizons.dedup();
    let mut ds: Vec<usize> = rows.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    for &h in &horizons {
        for &d in &ds {
            let block: Vec<&SummaryRow> = rows.iter().filter(|r| r.horizon == h && r.d == d).collect();
            if block.is_empty() {
                continue;
            }
            let _ = writeln!(s, "## Horizon {} ({} events), {} features\n", h, 10 * h, d);
            s.push_str("| Sorting | Classifier | Accuracy | Precision | Recall | F1 | Folds |\n");
            s.push_str("|---|---|---|---|---|---|---|\n");
            for r in block {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {}/{} |",
                    r.method.as_str(),
                    r.classifier.as_str(),
                    pm(&r.accuracy),
                    pm(&r.precision),
                    pm(&r.recall),
                    pm(&r.f1),
                    r.folds_ok,
                    r.folds_ok + r.folds_failed
                );
            }
            s.push('\n');
        }
        if ds.len() > 1 {
            let _ = writeln!(s, "## Horizon {h}: mean F1 against d\n");
            s.push_str("| Sorting | Classifier |");
            for d in &ds {
                let _ = write!(s, " {d} |");
            }
            s.push_str("\n|---|---|");
            s.push_str(&"---|".repeat(ds.len()));
            s.push('\n');
            for m in Method::ALL {
                for c in ClassifierKind::ALL {
                    if !rows.iter().any(|r| r.horizon == h && r.method == m && r.classifier == c) {
                        continue;
                    }
                    let _ = write!(s, "| {} | {} |", m.as_str(), c.as_str());
                    for &d in &ds {
                        match rows.iter().find(|r| r.horizon == h && r.method == m && r.classifier == c && r.d == d) {
                            Some(r) => {
                                let _ = write!(s, " {:.4} |", r.f1.mean);
                            }
                            None => s.push_str(" |"),
                        }
                    }
                    s.push('\n');
                }
            }
            s.push('\n');
        }
    }
    s
}

pub fn render(rows: &[SummaryRow], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(rows).expect("summary serialises"),
        Format::Csv => csv(rows),
        Format::Md => markdown(rows),
    }
}
