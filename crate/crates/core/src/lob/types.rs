use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of book levels used by the first feature group.
pub const DEFAULT_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Submission,
    Cancellation,
    Execution,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [EventKind::Submission, EventKind::Cancellation, EventKind::Execution];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Submission => "Submission",
            EventKind::Cancellation => "Cancellation",
            EventKind::Execution => "Execution",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Ask,
    Bid,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Ask => "Ask",
            Side::Bid => "Bid",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One row of a message list. Prices are integer ticks, timestamps milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageEvent {
    pub timestamp: i64,
    pub order_id: u64,
    pub price: i64,
    pub quantity: u64,
    pub kind: EventKind,
    pub side: Side,
}

impl MessageEvent {
    pub fn new(
        timestamp: i64,
        order_id: u64,
        price: i64,
        quantity: u64,
        kind: EventKind,
        side: Side,
    ) -> Result<Self> {
        if quantity == 0 {
            return Err(Error::Validation { line: 0, message: "quantity must be positive".into() });
        }
        if price <= 0 {
            return Err(Error::Validation { line: 0, message: "price must be positive".into() });
        }
        Ok(Self { timestamp, order_id, price, quantity, kind, side })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub ask_price: i64,
    pub ask_volume: u64,
    pub bid_price: i64,
    pub bid_volume: u64,
}

/// Book state after an event. `levels[0]` is the best quote on each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LobSnapshot {
    pub timestamp: i64,
    levels: Vec<Level>,
}

impl LobSnapshot {
    /// Validates the ordering and positivity invariants of a book.
    pub fn new(timestamp: i64, levels: Vec<Level>) -> Result<Self> {
        let bad = |message: alloc::string::String| Err(Error::Validation { line: 0, message });
        if levels.is_empty() {
            return bad("snapshot has no levels".into());
        }
        if levels[0].ask_price <= levels[0].bid_price {
            return bad(format!(
                "crossed book: ask {} <= bid {}",
                levels[0].ask_price, levels[0].bid_price
            ));
        }
        for (i, l) in levels.iter().enumerate() {
            if l.ask_volume == 0 || l.bid_volume == 0 {
                return bad(format!("zero volume at level {}", i + 1));
            }
            if l.bid_price <= 0 {
                return bad(format!("non-positive bid price at level {}", i + 1));
            }
        }
        for (i, w) in levels.windows(2).enumerate() {
            if w[1].ask_price <= w[0].ask_price {
                return bad(format!("ask prices not increasing at level {}", i + 2));
            }
            if w[1].bid_price >= w[0].bid_price {
                return bad(format!("bid prices not decreasing at level {}", i + 2));
            }
        }
        Ok(Self { timestamp, levels })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn best(&self) -> &Level {
        &self.levels[0]
    }
}
