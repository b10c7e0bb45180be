//! Third feature group: autocorrelation, partial autocorrelation,
//! cointegration of the best ask and bid, volume imbalance and the online
//! logistic feature.
//!
//! Default layout (55 values):
//!
//! | slots  | content                                                   |
//! |--------|-----------------------------------------------------------|
//! | 0..10  | ACF of block mid-prices, lags 1..10                       |
//! | 10..20 | ACF of mid log-returns, lags 1..10                        |
//! | 20..30 | PACF of mid-prices, lags 1..10                            |
//! | 30..35 | PACF of log-returns, lags 1..5                            |
//! | 35..38 | cointegration flag, p-value, statistic                    |
//! | 38..49 | volume imbalance per level, then over the summed depth    |
//! | 49..55 | p_ask, p_bid, local/extended ratio (ask), same (bid)      |
//!
//! The window statistics use the last `window` blocks (fewer early on) and
//! are undefined until `min_window` blocks are available.

pub mod acf;
pub mod coint;
pub mod imbalance;
pub mod logistic;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::config::{CriticalValueRow, QuantConfig};
use crate::lob::{mid_price, Block};

pub use logistic::{LogisticFeature, LogisticModel, Sample, StepOutcome};

pub const QUANT_FEATURES: usize = 55;

/// Width of the group under `config`; 55 at the defaults.
pub fn width(config: &QuantConfig, depth: usize) -> usize {
    2 * config.acf_lags + config.pacf_mid_lags + config.pacf_return_lags + 3 + depth + 1 + logistic::LOGISTIC_OUTPUTS
}

pub fn names(config: &QuantConfig, depth: usize) -> Vec<(String, &'static str)> {
    let mut v = Vec::with_capacity(width(config, depth));
    for k in 1..=config.acf_lags {
        v.push((format!("acf_mid_lag_{k}"), "quant.autocorrelation"));
    }
    for k in 1..=config.acf_lags {
        v.push((format!("acf_log_return_lag_{k}"), "quant.autocorrelation"));
    }
    for k in 1..=config.pacf_mid_lags {
        v.push((format!("pacf_mid_lag_{k}"), "quant.partial_autocorrelation"));
    }
    for k in 1..=config.pacf_return_lags {
        v.push((format!("pacf_log_return_lag_{k}"), "quant.partial_autocorrelation"));
    }
    for n in ["cointegrated", "cointegration_p_value", "cointegration_statistic"] {
        v.push((n.into(), "quant.cointegration"));
    }
    for i in 1..=depth {
        v.push((format!("volume_imbalance_{i}"), "quant.imbalance"));
    }
    v.push(("volume_imbalance_total".into(), "quant.imbalance"));
    for n in [
        "logistic_p_ask",
        "logistic_p_bid",
        "logistic_local_ratio_ask",
        "logistic_extended_ratio_ask",
        "logistic_local_ratio_bid",
        "logistic_extended_ratio_bid",
    ] {
        v.push((n.into(), "quant.logistic"));
    }
    v
}

/// Per-stock streaming evaluator.
#[derive(Debug, Clone)]
pub struct QuantState {
    config: QuantConfig,
    table: Vec<CriticalValueRow>,
    mids: VecDeque<f64>,
    asks: VecDeque<f64>,
    bids: VecDeque<f64>,
    logistic: LogisticFeature,
}

impl QuantState {
    pub fn new(config: &QuantConfig) -> Self {
        let table = config.critical_values.clone().unwrap_or_else(|| coint::DEFAULT_TABLE.to_vec());
        Self {
            config: config.clone(),
            table,
            mids: VecDeque::new(),
            asks: VecDeque::new(),
            bids: VecDeque::new(),
            logistic: LogisticFeature::new(config),
        }
    }

    pub fn logistic(&self) -> &LogisticFeature {
        &self.logistic
    }

    pub fn push(&mut self, block: &Block) -> Vec<f64> {
        let c = &self.config;
        let last = block.last_snapshot();
        let best = last.best();
        for (q, v) in [
            (&mut self.mids, mid_price(last)),
            (&mut self.asks, best.ask_price as f64),
            (&mut self.bids, best.bid_price as f64),
        ] {
            q.push_back(v);
            if q.len() > c.window.max(1) {
                q.pop_front();
            }
        }
        let mut out = Vec::with_capacity(width(c, last.depth()));
        let n_window = 2 * c.acf_lags + c.pacf_mid_lags + c.pacf_return_lags + 3;
        if self.mids.len() < c.min_window.max(2) {
            out.resize(n_window, f64::NAN);
        } else {
            let mids = self.mids.make_contiguous();
            let rets = acf::log_returns(mids);
            out.extend(acf::autocorrelation(mids, c.acf_lags));
            out.extend(acf::autocorrelation(&rets, c.acf_lags));
            out.extend(acf::partial_autocorrelation(mids, c.pacf_mid_lags));
            out.extend(acf::partial_autocorrelation(&rets, c.pacf_return_lags));
            match coint::engle_granger(self.asks.make_contiguous(), self.bids.make_contiguous(), c.adf_lags, &self.table)
            {
                Ok(r) => out.extend([if r.cointegrated { 1.0 } else { 0.0 }, r.p_value, r.statistic]),
                Err(e) => {
                    log::debug!("cointegration test skipped: {e}");
                    out.extend([f64::NAN; 3]);
                }
            }
        }
        out.extend(imbalance::book_imbalance(last));
        out.extend(self.logistic.push(block));
        out
    }
}
