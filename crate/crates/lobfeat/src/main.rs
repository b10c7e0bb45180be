use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lobfeat::report::{self, FoldMetrics, Format};
use lobfeat::{config, io, synth};
use lobfeat_core::classify::{Class, ClassifierKind};
use lobfeat_core::features::{extract, FeatureMatrix};
use lobfeat_core::lob::segment_blocks;
use lobfeat_core::pipeline::{anchored_folds, evaluate_fold, rank_on_fold, run_protocol, Day};
use lobfeat_core::selection::{Method, Ranking};
use lobfeat_core::Config;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "lobfeat", version, about = "Limit order book feature extraction, ranking and evaluation")]
struct Cli {
    /// TOML configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the classifier seed (and seeds `synth`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extracts the feature matrix from a message file and its book file.
    Extract {
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        book: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the feature metadata as JSON.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Writes the labels of every configured horizon for a feature file.
    Labels {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ranks features on the first fold's training day.
    Rank {
        /// One feature file per day, in date order; only the first is ranked on.
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        /// Label files from `lobfeat labels`, one per feature file; computed
        /// from the mids when omitted.
        #[arg(long, num_args = 1..)]
        labels: Vec<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Anchored evaluation of one classifier on the top-d features of a ranking.
    Evaluate {
        #[arg(long, num_args = 2.., required = true)]
        features: Vec<PathBuf>,
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long, value_enum)]
        classifier: ClassifierArg,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        #[arg(long)]
        topk: usize,
        /// Directory receiving one metrics file and one model file per fold.
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Full protocol over every method, classifier, horizon and feature count.
    Run {
        #[arg(long, num_args = 2.., required = true)]
        features: Vec<PathBuf>,
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Summarises the metrics under a runs directory.
    Report {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes synthetic message and book files, one pair per day.
    Synth {
        #[arg(long, default_value_t = 2)]
        days: usize,
        #[arg(long, default_value_t = 10_000)]
        events: usize,
        #[arg(long, default_value = "synth")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Entropy,
    Lms1,
    Lms2,
    Lda1,
    Lda2,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Entropy => Method::Entropy,
            MethodArg::Lms1 => Method::Lms1,
            MethodArg::Lms2 => Method::Lms2,
            MethodArg::Lda1 => Method::Lda1,
            MethodArg::Lda2 => Method::Lda2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Lms,
    Lda,
    Rbfn,
}

impl From<ClassifierArg> for ClassifierKind {
    fn from(c: ClassifierArg) -> Self {
        match c {
            ClassifierArg::Lms => ClassifierKind::Lms,
            ClassifierArg::Lda => ClassifierKind::Lda,
            ClassifierArg::Rbfn => ClassifierKind::Rbfn,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LabelFile {
    config_hash: String,
    horizons: std::collections::BTreeMap<usize, Vec<Option<Class>>>,
}

#[derive(Serialize)]
struct ModelFile<'a> {
    version: u32,
    config_hash: &'a str,
    features: &'a [usize],
    model: &'a lobfeat_core::classify::Model,
}

fn load_day(path: &Path, config: &Config) -> Result<(FeatureMatrix, Day)> {
    let (m, manifest) = io::read_features(path)?;
    let hash = config::hash(config);
    if manifest.config_hash != hash {
        log::warn!("{} was extracted with configuration {}, current is {hash}", path.display(), manifest.config_hash);
    }
    let day = Day::from_features(&m, config)?;
    Ok((m, day))
}

fn load_days(paths: &[PathBuf], config: &Config) -> Result<Vec<Day>> {
    paths.iter().map(|p| load_day(p, config).map(|(_, d)| d)).collect()
}

/// Prints without panicking when the reader goes away (e.g. `| head`).
fn print_stdout(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let mut config = config::load_or_default(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.classify.seed = seed;
    }
    let hash = config::hash(&config);

    match cli.command {
        Command::Extract { messages, book, out, meta } => {
            let start = Instant::now();
            let events = io::read_messages(&messages)?;
            let snaps = io::read_book(&book, config.lob.depth)?;
            let blocks = segment_blocks(events, snaps)?;
            let m = extract(&blocks, &config)?;
            io::write_features(&out, &m, &hash)?;
            if let Some(meta) = meta {
                io::write_json(&meta, &io::metadata_json(&m.meta))?;
            }
            let flagged = m.flags.iter().filter(|f| **f).count();
            log::info!(
                "{} blocks, {} features, {flagged} flagged rows, {:.2}s",
                m.len(),
                m.dim(),
                start.elapsed().as_secs_f64()
            );
        }
        Command::Labels { features, out } => {
            let (_, day) = load_day(&features, &config)?;
            io::write_json(&out, &LabelFile { config_hash: hash, horizons: day.labels })?;
        }
        Command::Rank { features, labels, method, horizon, out } => {
            let mut days = load_days(&features, &config)?;
            if !labels.is_empty() {
                if labels.len() != days.len() {
                    bail!("{} label files for {} feature files", labels.len(), days.len());
                }
                for (day, path) in days.iter_mut().zip(&labels) {
                    let file: LabelFile = io::read_json(path)?;
                    day.labels = file.horizons;
                }
            }
            let mut ranking = rank_on_fold(&days, 1, horizon, method.into(), &config)?;
            ranking.config_hash = hash;
            let text = serde_json::to_string_pretty(&ranking)?;
            match out {
                Some(p) => io::write_text(&p, &text)?,
                None => print_stdout(&text),
            }
        }
        Command::Evaluate { features, ranking, classifier, horizon, topk, out_dir } => {
            let days = load_days(&features, &config)?;
            let ranking: Ranking = io::read_json(&ranking)?;
            if ranking.config_hash != hash {
                log::warn!("ranking was produced with configuration {}, current is {hash}", ranking.config_hash);
            }
            let cols = ranking.top(topk);
            let kind: ClassifierKind = classifier.into();
            std::fs::create_dir_all(&out_dir).with_context(|| out_dir.display().to_string())?;
            let stem = format!("{}_{}_h{}_d{}", ranking.method.as_str(), kind.as_str(), horizon, cols.len());
            for spec in anchored_folds(days.len()) {
                let (scores, error) = match evaluate_fold(&days, &spec, horizon, cols, kind, &config) {
                    Ok((model, scores)) => {
                        let file = ModelFile { version: 1, config_hash: &hash, features: cols, model: &model };
                        io::write_json(&out_dir.join(format!("model_{stem}_fold{}.json", spec.index)), &file)?;
                        log::info!("fold {}: F1 {:.4}", spec.index, scores.f1);
                        (Some(scores), None)
                    }
                    Err(e) => {
                        log::warn!("fold {} failed: {e}", spec.index);
                        (None, Some(e.to_string()))
                    }
                };
                let metrics = FoldMetrics {
                    fold: spec.index,
                    horizon,
                    method: ranking.method,
                    classifier: kind,
                    d: cols.len(),
                    scores,
                    error,
                    config_hash: hash.clone(),
                };
                io::write_json(&out_dir.join(format!("metrics_{stem}_fold{}.json", spec.index)), &metrics)?;
            }
        }
        Command::Run { features, out_dir } => {
            let days = load_days(&features, &config)?;
            let report = run_protocol(&days, &config)?;
            std::fs::create_dir_all(&out_dir).with_context(|| out_dir.display().to_string())?;
            io::write_json(&out_dir.join("report.json"), &report)?;
            io::write_text(&out_dir.join("summary.md"), &report::markdown(&report.summary))?;
            if let Some(best) = report.best() {
                log::info!(
                    "best: {} / {} at h={} d={}: F1 {:.4}",
                    best.method.as_str(),
                    best.classifier.as_str(),
                    best.horizon,
                    best.d,
                    best.f1.mean
                );
            }
        }
        Command::Report { runs, format, out } => {
            let metrics = report::collect_runs(&runs)?;
            if metrics.is_empty() {
                bail!("no metrics found under {}", runs.display());
            }
            let text = report::render(&report::summarize(&metrics), format);
            match out {
                Some(p) => io::write_text(&p, &text)?,
                None => print_stdout(&text),
            }
        }
        Command::Synth { days, events, out_dir } => {
            std::fs::create_dir_all(&out_dir).with_context(|| out_dir.display().to_string())?;
            let seed = cli.seed.unwrap_or(1);
            for d in 0..days {
                let spec = synth::BookSpec {
                    events,
                    depth: config.lob.depth,
                    seed: seed.wrapping_mul(1000).wrapping_add(d as u64),
                    ..synth::BookSpec::default()
                };
                let (ev, snaps) = synth::simulate_book(&spec);
                io::write_text(&out_dir.join(format!("day{:02}_messages.csv", d + 1)), &io::messages_csv(&ev))?;
                io::write_text(&out_dir.join(format!("day{:02}_book.csv", d + 1)), &io::book_csv(&snaps))?;
            }
            log::info!("wrote {days} days of {events} events to {}", out_dir.display());
        }
    }
    Ok(())
}
