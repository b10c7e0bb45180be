use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::types::{LobSnapshot, MessageEvent};
use crate::error::{Error, Result};

/// Events per block; one block is one feature sample.
pub const BLOCK_LEN: usize = 10;

/// Open/high/low/close over a block's mid-prices plus the block's traded quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcBar {
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: usize,
    pub events: Vec<MessageEvent>,
    pub snapshots: Vec<LobSnapshot>,
    pub bar: OhlcBar,
}

impl Block {
    pub fn last_snapshot(&self) -> &LobSnapshot {
        &self.snapshots[BLOCK_LEN - 1]
    }

    pub fn mids(&self) -> [f64; BLOCK_LEN] {
        core::array::from_fn(|i| mid_price(&self.snapshots[i]))
    }

    pub fn first_timestamp(&self) -> i64 {
        self.events[0].timestamp
    }

    pub fn last_timestamp(&self) -> i64 {
        self.events[BLOCK_LEN - 1].timestamp
    }
}

/// Level-1 mid-price, never truncated to ticks.
pub fn mid_price(snapshot: &LobSnapshot) -> f64 {
    let best = snapshot.best();
    (best.ask_price as f64 + best.bid_price as f64) / 2.0
}

/// Splits the stream into consecutive non-overlapping 10-event blocks; a
/// trailing partial block is dropped.
pub fn segment_blocks(events: Vec<MessageEvent>, snapshots: Vec<LobSnapshot>) -> Result<Vec<Block>> {
    if events.len() != snapshots.len() {
        return Err(Error::LengthMismatch { expected: events.len(), found: snapshots.len() });
    }
    let n_blocks = events.len() / BLOCK_LEN;
    let mut blocks = Vec::with_capacity(n_blocks);
    let mut ev = events.into_iter();
    let mut sn = snapshots.into_iter();
    for index in 0..n_blocks {
        let events: Vec<MessageEvent> = ev.by_ref().take(BLOCK_LEN).collect();
        let snapshots: Vec<LobSnapshot> = sn.by_ref().take(BLOCK_LEN).collect();
        let bar = bar_from_parts(&events, &snapshots);
        blocks.push(Block { index, events, snapshots, bar });
    }
    Ok(blocks)
}

pub fn derive_bar(block: &Block) -> OhlcBar {
    bar_from_parts(&block.events, &block.snapshots)
}

fn bar_from_parts(events: &[MessageEvent], snapshots: &[LobSnapshot]) -> OhlcBar {
    let mids: Vec<f64> = snapshots.iter().map(mid_price).collect();
    ohlc(&mids, events.iter().map(|e| e.quantity).sum())
}

pub(crate) fn ohlc(mids: &[f64], volume: u64) -> OhlcBar {
    let mut high = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for &m in mids {
        high = high.max(m);
        low = low.min(m);
    }
    OhlcBar { open: mids[0], high, low, close: mids[mids.len() - 1], volume }
}
