//! Second feature group: 83 technical indicators and digital filters over
//! the block-level OHLC bar series.
//!
//! Every indicator is computed over the whole series at once; a value at
//! bar `t` only reads bars `0..=t`. Warm-up entries are NaN.

mod indicators;
pub mod series;

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::TechnicalConfig;
use crate::error::{Error, Result};
use crate::lob::{Block, OhlcBar, BLOCK_LEN};

pub use indicators::compute_all;

pub const TECHNICAL_FEATURES: usize = 83;

/// Column view of a bar series, plus the intra-block mid-prices each bar was
/// built from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BarSeries {
    pub open: Vec<f64>,
    pub high: Vec<f64>,
    pub low: Vec<f64>,
    pub close: Vec<f64>,
    pub volume: Vec<f64>,
    pub block_mids: Vec<[f64; BLOCK_LEN]>,
}

impl BarSeries {
    pub fn from_blocks(blocks: &[Block]) -> Self {
        let mut s = BarSeries::default();
        for b in blocks {
            s.push(&b.bar, b.mids());
        }
        s
    }

    /// Bars whose open/close are not backed by real events; the mids are the
    /// close repeated.
    pub fn from_bars(bars: &[OhlcBar]) -> Self {
        let mut s = BarSeries::default();
        for b in bars {
            s.push(b, [b.close; BLOCK_LEN]);
        }
        s
    }

    pub fn push(&mut self, bar: &OhlcBar, mids: [f64; BLOCK_LEN]) {
        self.open.push(bar.open);
        self.high.push(bar.high);
        self.low.push(bar.low);
        self.close.push(bar.close);
        self.volume.push(bar.volume as f64);
        self.block_mids.push(mids);
    }

    pub fn len(&self) -> usize {
        self.close.len()
    }

    pub fn is_empty(&self) -> bool {
        self.close.is_empty()
    }

    /// `(H + L) / 2`.
    pub fn median(&self) -> Vec<f64> {
        self.high.iter().zip(&self.low).map(|(h, l)| (h + l) / 2.0).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for len in [self.open.len(), self.high.len(), self.low.len(), self.volume.len(), self.block_mids.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, found: len });
            }
        }
        Ok(())
    }
}

const FAMILY_NAMES: [(&str, &str); 63] = [
    ("adl", "technical.adl"),
    ("awesome_oscillator", "technical.ao"),
    ("accelerator_oscillator", "technical.ac"),
    ("adx", "technical.adx"),
    ("adxr", "technical.adxr"),
    ("alligator_jaw", "technical.alligator"),
    ("alligator_teeth", "technical.alligator"),
    ("alligator_lips", "technical.alligator"),
    ("apo", "technical.apo"),
    ("aroon_up", "technical.aroon"),
    ("aroon_down", "technical.aroon"),
    ("aroon_oscillator", "technical.aroon_oscillator"),
    ("atr", "technical.atr"),
    ("bollinger_middle", "technical.bollinger"),
    ("bollinger_upper", "technical.bollinger"),
    ("bollinger_lower", "technical.bollinger"),
    ("ichimoku_conversion", "technical.ichimoku"),
    ("ichimoku_base", "technical.ichimoku"),
    ("ichimoku_span_a", "technical.ichimoku"),
    ("ichimoku_span_b", "technical.ichimoku"),
    ("ichimoku_lagging", "technical.ichimoku"),
    ("cmo", "technical.cmo"),
    ("chaikin_oscillator", "technical.chaikin"),
    ("chandelier_long", "technical.chandelier"),
    ("chandelier_short", "technical.chandelier"),
    ("center_of_gravity", "technical.cog"),
    ("donchian_upper", "technical.donchian"),
    ("donchian_middle", "technical.donchian"),
    ("donchian_lower", "technical.donchian"),
    ("dema", "technical.dema"),
    ("dpo", "technical.dpo"),
    ("heikin_ashi_open", "technical.heikin_ashi"),
    ("heikin_ashi_high", "technical.heikin_ashi"),
    ("heikin_ashi_low", "technical.heikin_ashi"),
    ("heikin_ashi_close", "technical.heikin_ashi"),
    ("highest_high", "technical.highest_lowest"),
    ("lowest_low", "technical.highest_lowest"),
    ("hull_ma", "technical.hull"),
    ("internal_bar_strength", "technical.ibs"),
    ("keltner_middle", "technical.keltner"),
    ("keltner_upper", "technical.keltner"),
    ("keltner_lower", "technical.keltner"),
    ("macd", "technical.macd"),
    ("median_price", "technical.median"),
    ("momentum", "technical.momentum"),
    ("variable_ma", "technical.vma"),
    ("natr", "technical.natr"),
    ("ppo", "technical.ppo"),
    ("roc", "technical.roc"),
    ("rsi", "technical.rsi"),
    ("parabolic_sar", "technical.psar"),
    ("stddev_deviation", "technical.stddev"),
    ("stddev_sasd", "technical.stddev"),
    ("stoch_rsi", "technical.stoch_rsi"),
    ("t3", "technical.t3"),
    ("tema", "technical.tema"),
    ("trima", "technical.trima"),
    ("trix", "technical.trix"),
    ("tsi", "technical.tsi"),
    ("ultimate_oscillator", "technical.uo"),
    ("weighted_close", "technical.wcl"),
    ("williams_r", "technical.williams_r"),
    ("zlema", "technical.zlema"),
];

const TAIL_NAMES: [(&str, &str); 12] = [
    ("lrl_value", "technical.linear_regression"),
    ("lrl_slope", "technical.linear_regression"),
    ("lrl_intercept", "technical.linear_regression"),
    ("lrl_r", "technical.linear_regression"),
    ("lrl_r2", "technical.linear_regression"),
    ("rational_transfer", "technical.rational_transfer"),
    ("savitzky_golay", "technical.savitzky_golay"),
    ("zero_phase", "technical.zero_phase"),
    ("offset", "technical.offset"),
    ("detrend_slope", "technical.detrend"),
    ("detrend_residual", "technical.detrend"),
    ("beta", "technical.beta"),
];

pub fn names() -> Vec<(String, &'static str)> {
    use alloc::format;
    let mut v: Vec<(String, &'static str)> = FAMILY_NAMES.iter().map(|(n, f)| ((*n).into(), *f)).collect();
    for p in ["open", "high", "low", "close"] {
        v.push((format!("fractal_buy_{p}"), "technical.fractals"));
        v.push((format!("fractal_sell_{p}"), "technical.fractals"));
    }
    v.extend(TAIL_NAMES.iter().map(|(n, f)| ((*n).into(), *f)));
    v
}

/// Index of a technical feature by name.
pub fn index_of(name: &str) -> Option<usize> {
    names().iter().position(|(n, _)| n == name)
}

/// Every feature of the last bar. Convenience for streaming callers.
pub fn latest(bars: &BarSeries, config: &TechnicalConfig) -> Result<Vec<f64>> {
    let cols = compute_all(bars, config)?;
    Ok(cols.iter().map(|c| c.last().copied().unwrap_or(f64::NAN)).collect())
}
