//! Row-level CSV parsing. File handling lives in the std companion crate;
//! everything here works on `&str`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use super::types::{EventKind, Level, LobSnapshot, MessageEvent, Side};
use crate::error::{Error, Result};

pub const MESSAGE_HEADER: &str = "timestamp,id,price,quantity,event,side";

/// `timestamp` followed by `ask_price_k,ask_vol_k,bid_price_k,bid_vol_k` for each level.
pub fn book_header(depth: usize) -> String {
    let mut h = String::from("timestamp");
    for k in 1..=depth {
        h.push_str(&format!(",ask_price_{k},ask_vol_{k},bid_price_{k},bid_vol_{k}"));
    }
    h
}

fn field<T: FromStr>(raw: &str, name: &str, line: usize) -> Result<T> {
    raw.trim().parse::<T>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {name} `{}`", raw.trim()),
    })
}

pub fn parse_message_record(row: &str, line: usize) -> Result<MessageEvent> {
    let cols: Vec<&str> = row.trim_end_matches(['\r', '\n']).split(',').collect();
    if cols.len() != 6 {
        return Err(Error::Parse { line, message: format!("expected 6 columns, found {}", cols.len()) });
    }
    let timestamp: i64 = field(cols[0], "timestamp", line)?;
    let order_id: u64 = field(cols[1], "id", line)?;
    let price: i64 = field(cols[2], "price", line)?;
    let quantity: u64 = field(cols[3], "quantity", line)?;
    let kind = match cols[4].trim() {
        "Submission" => EventKind::Submission,
        "Cancellation" => EventKind::Cancellation,
        "Execution" => EventKind::Execution,
        other => return Err(Error::Parse { line, message: format!("unknown event `{other}`") }),
    };
    let side = match cols[5].trim() {
        "Bid" => Side::Bid,
        "Ask" => Side::Ask,
        other => return Err(Error::Parse { line, message: format!("unknown side `{other}`") }),
    };
    MessageEvent::new(timestamp, order_id, price, quantity, kind, side).map_err(|e| with_line(e, line))
}

pub fn parse_book_record(row: &str, line: usize, depth: usize) -> Result<LobSnapshot> {
    let cols: Vec<&str> = row.trim_end_matches(['\r', '\n']).split(',').collect();
    let expected = 1 + 4 * depth;
    if cols.len() != expected {
        return Err(Error::Parse {
            line,
            message: format!("expected {expected} columns, found {}", cols.len()),
        });
    }
    let timestamp: i64 = field(cols[0], "timestamp", line)?;
    let mut levels = Vec::with_capacity(depth);
    for k in 0..depth {
        let c = &cols[1 + 4 * k..5 + 4 * k];
        levels.push(Level {
            ask_price: field(c[0], "ask price", line)?,
            ask_volume: field(c[1], "ask volume", line)?,
            bid_price: field(c[2], "bid price", line)?,
            bid_volume: field(c[3], "bid volume", line)?,
        });
    }
    LobSnapshot::new(timestamp, levels).map_err(|e| with_line(e, line))
}

fn with_line(e: Error, line: usize) -> Error {
    match e {
        Error::Validation { message, .. } => Error::Validation { line, message },
        other => other,
    }
}

fn check_header(found: &str, expected: &str) -> Result<()> {
    if found.trim_end_matches('\r').trim() != expected {
        return Err(Error::Parse { line: 1, message: format!("unexpected header, want `{expected}`") });
    }
    Ok(())
}

/// Parses a whole message CSV. An empty input yields no events.
pub fn parse_message_text(text: &str) -> Result<Vec<MessageEvent>> {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return Ok(Vec::new());
    };
    check_header(header, MESSAGE_HEADER)?;
    let mut out = Vec::new();
    let mut last_ts = i64::MIN;
    for (i, row) in lines.enumerate() {
        if row.trim().is_empty() {
            continue;
        }
        let line = i + 2;
        let ev = parse_message_record(row, line)?;
        if ev.timestamp < last_ts {
            return Err(Error::Validation { line, message: "timestamp regression".into() });
        }
        last_ts = ev.timestamp;
        out.push(ev);
    }
    Ok(out)
}

pub fn parse_book_text(text: &str, depth: usize) -> Result<Vec<LobSnapshot>> {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return Ok(Vec::new());
    };
    check_header(header, &book_header(depth))?;
    let mut out = Vec::new();
    let mut last_ts = i64::MIN;
    for (i, row) in lines.enumerate() {
        if row.trim().is_empty() {
            continue;
        }
        let line = i + 2;
        let snap = parse_book_record(row, line, depth)?;
        if snap.timestamp < last_ts {
            return Err(Error::Validation { line, message: "timestamp regression".into() });
        }
        last_ts = snap.timestamp;
        out.push(snap);
    }
    Ok(out)
}
