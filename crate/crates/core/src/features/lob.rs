//! First feature group: raw book levels, time-insensitive book shape
//! descriptors and time-sensitive derivatives and event intensities.
//!
//! Layout (135 values):
//!
//! | slots     | content                                                     |
//! |-----------|-------------------------------------------------------------|
//! | 0..40     | per level: ask price, ask volume, bid price, bid volume     |
//! | 40..51    | spread per level (10), level-1 mid-price (1)                |
//! | 51..71    | ask range, bid range, 9 ask gaps, 9 bid gaps                |
//! | 71..75    | mean ask price, mean bid price, mean ask vol, mean bid vol  |
//! | 75..77    | accumulated price and volume differences                    |
//! | 77..117   | per-level d/dt of the four level quantities                 |
//! | 117..123  | event intensity per (kind, side), short window              |
//! | 123..129  | short-window intensity above long-window intensity (0/1)    |
//! | 129..135  | d/dt of the short-window intensities                        |
//!
//! Intensities are ordered Submission/Ask, Submission/Bid, Cancellation/Ask,
//! Cancellation/Bid, Execution/Ask, Execution/Bid.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::config::LobConfig;
use crate::lob::{Block, LobSnapshot};

pub const BASIC_LEN: usize = 40;
pub const TIME_INSENSITIVE_LEN: usize = 37;
pub const TIME_SENSITIVE_LEN: usize = 58;
pub const LOB_FEATURES: usize = BASIC_LEN + TIME_INSENSITIVE_LEN + TIME_SENSITIVE_LEN;

const N_INTENSITIES: usize = 6;
const LEVELS: usize = 10;

fn level_quad(s: &LobSnapshot, i: usize) -> [f64; 4] {
    let l = &s.levels()[i];
    [l.ask_price as f64, l.ask_volume as f64, l.bid_price as f64, l.bid_volume as f64]
}

/// Prices and volumes of the block's last snapshot, level-major.
pub fn basic_features(block: &Block) -> Vec<f64> {
    let s = block.last_snapshot();
    (0..LEVELS).flat_map(|i| level_quad(s, i)).collect()
}

/// Spreads, level-1 mid, ranges and gaps, level means and accumulated differences.
pub fn time_insensitive_features(block: &Block) -> Vec<f64> {
    let s = block.last_snapshot();
    let lv = s.levels();
    let ask = |i: usize| lv[i].ask_price as f64;
    let bid = |i: usize| lv[i].bid_price as f64;
    let mut out = Vec::with_capacity(TIME_INSENSITIVE_LEN);
    for i in 0..LEVELS {
        out.push(ask(i) - bid(i));
    }
    out.push((ask(0) + bid(0)) / 2.0);
    out.push(ask(LEVELS - 1) - ask(0));
    out.push(bid(0) - bid(LEVELS - 1));
    for i in 0..LEVELS - 1 {
        out.push(crate::math::abs(ask(i + 1) - ask(i)));
    }
    for i in 0..LEVELS - 1 {
        out.push(crate::math::abs(bid(i + 1) - bid(i)));
    }
    let n = LEVELS as f64;
    let sum = |f: &dyn Fn(usize) -> f64| (0..LEVELS).map(f).sum::<f64>();
    out.push(sum(&ask) / n);
    out.push(sum(&bid) / n);
    out.push(sum(&|i| lv[i].ask_volume as f64) / n);
    out.push(sum(&|i| lv[i].bid_volume as f64) / n);
    out.push(sum(&|i| ask(i) - bid(i)));
    out.push(sum(&|i| lv[i].ask_volume as f64 - lv[i].bid_volume as f64));
    debug_assert_eq!(out.len(), TIME_INSENSITIVE_LEN);
    out
}

/// Event counts per (kind, side) in a block.
pub fn event_counts(block: &Block) -> [f64; N_INTENSITIES] {
    let mut c = [0.0; N_INTENSITIES];
    for e in &block.events {
        c[2 * e.kind.index() + e.side.index()] += 1.0;
    }
    c
}

#[derive(Debug, Clone)]
struct Past {
    first_ts: i64,
    counts: [f64; N_INTENSITIES],
}

/// Streaming state for the time-sensitive features. Blocks must be pushed in order.
#[derive(Debug, Clone)]
pub struct TimeSensitiveState {
    long_window: usize,
    min_dt: f64,
    seen_positive: bool,
    prev_snapshot: Option<(i64, [[f64; 4]; LEVELS])>,
    prev_intensity: Option<[f64; N_INTENSITIES]>,
    history: VecDeque<Past>,
}

impl TimeSensitiveState {
    pub fn new(config: &LobConfig) -> Self {
        Self {
            long_window: config.long_window.max(1),
            min_dt: config.min_dt_seconds,
            seen_positive: false,
            prev_snapshot: None,
            prev_intensity: None,
            history: VecDeque::new(),
        }
    }

    fn observe(&mut self, dt: f64) {
        if dt > 0.0 && (!self.seen_positive || dt < self.min_dt) {
            self.min_dt = dt;
            self.seen_positive = true;
        }
    }

    fn effective(&self, dt: f64) -> f64 {
        if dt > 0.0 {
            dt
        } else {
            self.min_dt
        }
    }

    /// Returns the 58 time-sensitive values; entries that need more history
    /// than is available are NaN.
    pub fn push(&mut self, block: &Block) -> Vec<f64> {
        let secs = |a: i64, b: i64| (b - a) as f64 / 1000.0;
        let last = block.last_snapshot();
        let quads: [[f64; 4]; LEVELS] = core::array::from_fn(|i| level_quad(last, i));
        let counts = event_counts(block);
        let (first_ts, last_ts) = (block.first_timestamp(), block.last_timestamp());

        self.history.push_back(Past { first_ts, counts });
        if self.history.len() > self.long_window {
            self.history.pop_front();
        }

        let span = secs(first_ts, last_ts);
        let gap = self.prev_snapshot.map(|(ts, _)| secs(ts, last_ts));
        let long_span = secs(self.history[0].first_ts, last_ts);
        self.observe(span);
        if let Some(g) = gap {
            self.observe(g);
        }
        self.observe(long_span);

        let mut out = Vec::with_capacity(TIME_SENSITIVE_LEN);
        match (self.prev_snapshot, gap) {
            (Some((_, prev)), Some(g)) => {
                let dt = self.effective(g);
                for i in 0..LEVELS {
                    for k in 0..4 {
                        out.push((quads[i][k] - prev[i][k]) / dt);
                    }
                }
            }
            _ => out.extend(std::iter::repeat_n(f64::NAN, 4 * LEVELS)),
        }

        let short_dt = self.effective(span);
        let intensity: [f64; N_INTENSITIES] = core::array::from_fn(|j| counts[j] / short_dt);
        out.extend_from_slice(&intensity);

        if self.history.len() == self.long_window {
            let long_dt = self.effective(long_span);
            for j in 0..N_INTENSITIES {
                let total: f64 = self.history.iter().map(|p| p.counts[j]).sum();
                out.push(if intensity[j] > total / long_dt { 1.0 } else { 0.0 });
            }
        } else {
            out.extend(std::iter::repeat_n(f64::NAN, N_INTENSITIES));
        }

        match (self.prev_intensity, gap) {
            (Some(prev), Some(g)) => {
                let dt = self.effective(g);
                for j in 0..N_INTENSITIES {
                    out.push((intensity[j] - prev[j]) / dt);
                }
            }
            _ => out.extend(std::iter::repeat_n(f64::NAN, N_INTENSITIES)),
        }

        self.prev_snapshot = Some((last_ts, quads));
        self.prev_intensity = Some(intensity);
        debug_assert_eq!(out.len(), TIME_SENSITIVE_LEN);
        out
    }
}

pub fn names() -> Vec<(alloc::string::String, &'static str)> {
    use alloc::format;
    let mut v = Vec::with_capacity(LOB_FEATURES);
    for i in 1..=LEVELS {
        for q in ["ask_price", "ask_volume", "bid_price", "bid_volume"] {
            v.push((format!("{q}_{i}"), "lob.basic"));
        }
    }
    for i in 1..=LEVELS {
        v.push((format!("spread_{i}"), "lob.spread_mid"));
    }
    v.push(("mid_price_1".into(), "lob.spread_mid"));
    v.push(("ask_range".into(), "lob.price_differences"));
    v.push(("bid_range".into(), "lob.price_differences"));
    for i in 1..LEVELS {
        v.push((format!("ask_gap_{i}"), "lob.price_differences"));
    }
    for i in 1..LEVELS {
        v.push((format!("bid_gap_{i}"), "lob.price_differences"));
    }
    for n in ["mean_ask_price", "mean_bid_price", "mean_ask_volume", "mean_bid_volume"] {
        v.push((n.into(), "lob.means"));
    }
    v.push(("accumulated_price_difference".into(), "lob.accumulated_differences"));
    v.push(("accumulated_volume_difference".into(), "lob.accumulated_differences"));
    for i in 1..=LEVELS {
        for q in ["ask_price", "ask_volume", "bid_price", "bid_volume"] {
            v.push((format!("d_{q}_{i}_dt"), "lob.derivatives"));
        }
    }
    let kinds = [
        "submission_ask",
        "submission_bid",
        "cancellation_ask",
        "cancellation_bid",
        "execution_ask",
        "execution_bid",
    ];
    for k in kinds {
        v.push((format!("intensity_{k}"), "lob.intensity"));
    }
    for k in kinds {
        v.push((format!("intensity_above_long_{k}"), "lob.relative_intensity"));
    }
    for k in kinds {
        v.push((format!("d_intensity_{k}_dt"), "lob.intensity_acceleration"));
    }
    debug_assert_eq!(v.len(), LOB_FEATURES);
    v
}
