use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::lob::{self as lobf, TimeSensitiveState, LOB_FEATURES};
use super::quant::{self, QuantState};
use super::technical::{self, BarSeries, TECHNICAL_FEATURES};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::lob::{Block, DEFAULT_DEPTH};

pub const TOTAL_FEATURES: usize = LOB_FEATURES + TECHNICAL_FEATURES + quant::QUANT_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Lob,
    Technical,
    Quant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub index: usize,
    pub name: String,
    pub group: FeatureGroup,
    /// Indicator family tag, e.g. `lob.spread_mid` or `technical.rsi`.
    pub appendix_ref: String,
}

/// Samples (blocks) by features, stored sample-major.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub meta: Vec<FeatureMeta>,
    pub values: Vec<f64>,
    /// `true` where the sample had at least one undefined feature (replaced by 0).
    pub flags: Vec<bool>,
    /// Mid-price at the end of each block.
    pub mids: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(meta: Vec<FeatureMeta>) -> Self {
        Self { meta, ..Default::default() }
    }

    pub fn dim(&self) -> usize {
        self.meta.len()
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        let d = self.dim();
        &self.values[sample * d..(sample + 1) * d]
    }

    pub fn get(&self, sample: usize, feature: usize) -> f64 {
        self.values[sample * self.dim() + feature]
    }

    /// Appends a sample, replacing non-finite entries by 0 and flagging it.
    pub fn push_row(&mut self, row: &[f64], mid: f64) -> Result<()> {
        if row.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: row.len() });
        }
        let mut flagged = false;
        for v in row {
            if v.is_finite() {
                self.values.push(*v);
            } else {
                self.values.push(0.0);
                flagged = true;
            }
        }
        self.flags.push(flagged);
        self.mids.push(mid);
        Ok(())
    }

    /// Column `feature` over all samples.
    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.len()).map(|s| self.get(s, feature)).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.meta.iter().map(|m| m.name.as_str()).collect()
    }
}

pub fn feature_meta(config: &Config) -> Vec<FeatureMeta> {
    let groups = [
        (FeatureGroup::Lob, lobf::names()),
        (FeatureGroup::Technical, technical::names()),
        (FeatureGroup::Quant, quant::names(&config.quant, DEFAULT_DEPTH)),
    ];
    let mut meta = Vec::new();
    for (group, names) in groups {
        for (name, family) in names {
            meta.push(FeatureMeta { index: meta.len(), name, group, appendix_ref: family.into() });
        }
    }
    meta
}

/// Features of every block of one trading day, in block order.
pub fn extract(blocks: &[Block], config: &Config) -> Result<FeatureMatrix> {
    if config.lob.depth != DEFAULT_DEPTH {
        return Err(Error::InvalidParameter(alloc::format!(
            "book depth {} is not supported; the layout expects {DEFAULT_DEPTH} levels",
            config.lob.depth
        )));
    }
    for b in blocks {
        if b.last_snapshot().depth() != DEFAULT_DEPTH {
            return Err(Error::LengthMismatch { expected: DEFAULT_DEPTH, found: b.last_snapshot().depth() });
        }
    }
    let mut out = FeatureMatrix::new(feature_meta(config));
    let tech = technical::compute_all(&BarSeries::from_blocks(blocks), &config.technical)?;
    let mut ts = TimeSensitiveState::new(&config.lob);
    let mut qs = QuantState::new(&config.quant);
    let mut row = Vec::with_capacity(out.dim());
    for (t, block) in blocks.iter().enumerate() {
        row.clear();
        row.extend(lobf::basic_features(block));
        row.extend(lobf::time_insensitive_features(block));
        row.extend(ts.push(block));
        row.extend(tech.iter().map(|c| c[t]));
        row.extend(qs.push(block));
        out.push_row(&row, block.bar.close)?;
    }
    Ok(out)
}
