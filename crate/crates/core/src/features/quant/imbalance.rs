use alloc::vec::Vec;

use crate::lob::LobSnapshot;

/// `(bid - ask) / (bid + ask)`; 0 when both are zero.
pub fn volume_imbalance(bid: f64, ask: f64) -> f64 {
    let total = bid + ask;
    if total > 0.0 {
        (bid - ask) / total
    } else {
        0.0
    }
}

/// One value per level followed by the imbalance of the summed depth.
pub fn book_imbalance(snapshot: &LobSnapshot) -> Vec<f64> {
    let mut out: Vec<f64> = snapshot
        .levels()
        .iter()
        .map(|l| volume_imbalance(l.bid_volume as f64, l.ask_volume as f64))
        .collect();
    let bid: f64 = snapshot.levels().iter().map(|l| l.bid_volume as f64).sum();
    let ask: f64 = snapshot.levels().iter().map(|l| l.ask_volume as f64).sum();
    out.push(volume_imbalance(bid, ask));
    out
}
