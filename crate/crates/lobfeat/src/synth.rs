//! Synthetic data: a random order-flow book simulator and planted-signal
//! feature days.

use std::collections::BTreeMap;

use lobfeat_core::classify::Class;
use lobfeat_core::lob::{EventKind, Level, LobSnapshot, MessageEvent, Side};
use lobfeat_core::pipeline::Day;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

pub const TICK: i64 = 100;
/// 09:30 in milliseconds after midnight.
pub const OPEN_MS: i64 = 34_200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BookSpec {
    pub events: usize,
    pub depth: usize,
    pub start_price: i64,
    /// Mean inter-event time in milliseconds.
    pub mean_gap_ms: f64,
    /// Per-event standard deviation, in ticks, of the latent fair price that
    /// aggressive order flow leans towards.
    pub volatility: f64,
    pub seed: u64,
}

impl Default for BookSpec {
    fn default() -> Self {
        Self { events: 10_000, depth: 10, start_price: 20_000, mean_gap_ms: 25.0, volatility: 0.5, seed: 1 }
    }
}

struct Book {
    /// (price, volume), best first.
    asks: Vec<(i64, u64)>,
    bids: Vec<(i64, u64)>,
    depth: usize,
}

impl Book {
    fn new(depth: usize, mid: i64, rng: &mut ChaCha8Rng) -> Self {
        let asks = (0..depth).map(|i| (mid + TICK * (i as i64 + 1), rng.gen_range(50..=500))).collect();
        let bids = (0..depth).map(|i| (mid - TICK * (i as i64 + 1), rng.gen_range(50..=500))).collect();
        Self { asks, bids, depth }
    }

    fn side(&mut self, side: Side) -> &mut Vec<(i64, u64)> {
        match side {
            Side::Ask => &mut self.asks,
            Side::Bid => &mut self.bids,
        }
    }

    fn mid(&self) -> f64 {
        (self.asks[0].0 + self.bids[0].0) as f64 / 2.0
    }

    fn spread_ticks(&self) -> i64 {
        (self.asks[0].0 - self.bids[0].0) / TICK
    }

    /// Drops `level` and refills the far end of the book.
    fn remove(&mut self, side: Side, level: usize, rng: &mut ChaCha8Rng) {
        let depth = self.depth;
        let levels = self.side(side);
        levels.remove(level);
        let last = levels.last().map(|l| l.0).unwrap_or(0);
        let price = match side {
            Side::Ask => last + TICK,
            Side::Bid => last - TICK,
        };
        if levels.len() < depth && price > 0 {
            levels.push((price, rng.gen_range(50..=500)));
        }
    }

    fn snapshot(&self, timestamp: i64) -> LobSnapshot {
        let levels = self
            .asks
            .iter()
            .zip(&self.bids)
            .map(|(a, b)| Level { ask_price: a.0, ask_volume: a.1, bid_price: b.0, bid_volume: b.1 })
            .collect();
        LobSnapshot::new(timestamp, levels).expect("simulated book stays valid")
    }
}

fn pick_level(rng: &mut ChaCha8Rng, depth: usize) -> usize {
    let mut k = 0;
    while k + 1 < depth && rng.gen_bool(0.55) {
        k += 1;
    }
    k
}

/// Simulates submissions, cancellations and executions on a `depth`-level
/// book; returns the message list and the book after every event.
pub fn simulate_book(spec: &BookSpec) -> (Vec<MessageEvent>, Vec<LobSnapshot>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gaps = Exp::new(1.0 / spec.mean_gap_ms.max(1e-3)).expect("positive rate");
    let mut book = Book::new(spec.depth, spec.start_price, &mut rng);
    let shocks = Normal::new(0.0, spec.volatility.max(0.0) * TICK as f64).expect("finite volatility");
    let mut fair = spec.start_price as f64;
    let mut t = OPEN_MS as f64;
    let mut events = Vec::with_capacity(spec.events);
    let mut snapshots = Vec::with_capacity(spec.events);
    for id in 0..spec.events as u64 {
        t += gaps.sample(&mut rng);
        let ts = t.floor() as i64;
        // Weak pull towards the opening price keeps long days away from zero.
        fair += shocks.sample(&mut rng) - 2e-4 * (fair - spec.start_price as f64);
        // Probability that aggressive flow pushes the mid up.
        let up = (0.5 + 0.25 * (fair - book.mid()) / TICK as f64).clamp(0.1, 0.9);
        let coin = |rng: &mut ChaCha8Rng, p: f64, yes: Side, no: Side| if rng.gen_bool(p) { yes } else { no };
        let u: f64 = rng.gen();
        let (kind, side, price, qty) = if u < 0.45 {
            let qty = rng.gen_range(1..=200);
            let improve = book.spread_ticks() > 1 && rng.gen_bool(if book.spread_ticks() > 4 { 0.8 } else { 0.3 });
            if improve {
                let side = coin(&mut rng, up, Side::Bid, Side::Ask);
                let levels = book.side(side);
                let price = match side {
                    Side::Ask => levels[0].0 - TICK,
                    Side::Bid => levels[0].0 + TICK,
                };
                levels.insert(0, (price, qty));
                levels.truncate(spec.depth);
                (EventKind::Submission, side, price, qty)
            } else {
                let side = coin(&mut rng, 0.5, Side::Ask, Side::Bid);
                let k = pick_level(&mut rng, spec.depth);
                let levels = book.side(side);
                levels[k].1 += qty;
                (EventKind::Submission, side, levels[k].0, qty)
            }
        } else if u < 0.8 {
            let side = coin(&mut rng, 0.5, Side::Ask, Side::Bid);
            let k = pick_level(&mut rng, spec.depth);
            let (price, vol) = book.side(side)[k];
            let qty = rng.gen_range(1..=vol.min(200));
            if qty == vol {
                book.remove(side, k, &mut rng);
            } else {
                book.side(side)[k].1 -= qty;
            }
            (EventKind::Cancellation, side, price, qty)
        } else {
            // Buyers lift the ask, sellers hit the bid.
            let side = coin(&mut rng, up, Side::Ask, Side::Bid);
            let (price, vol) = book.side(side)[0];
            let qty = if rng.gen_bool(0.5) { vol } else { rng.gen_range(1..=vol) };
            if qty == vol {
                book.remove(side, 0, &mut rng);
            } else {
                book.side(side)[0].1 -= qty;
            }
            (EventKind::Execution, side, price, qty)
        };
        events.push(MessageEvent::new(ts, id + 1, price, qty, kind, side).expect("valid event"));
        snapshots.push(book.snapshot(ts));
    }
    (events, snapshots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub days: usize,
    pub samples_per_day: usize,
    pub dim: usize,
    /// Columns carrying the signal.
    pub informative: Vec<usize>,
    /// Standard deviation of the noise added to the linear score.
    pub noise: f64,
    pub horizons: Vec<usize>,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            days: 10,
            samples_per_day: 600,
            dim: 40,
            informative: vec![4, 17, 31],
            noise: 0.1,
            horizons: vec![1, 2, 3],
            seed: 7,
        }
    }
}

/// Days whose labels are a noisy linear score of the informative columns,
/// cut into three roughly equal classes. Informative columns are uniform
/// with unit variance, all others standard normal.
pub fn planted_days(spec: &PlantedSpec) -> Vec<Day> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let half_width = 3f64.sqrt();
    // Tertiles of a sum of k unit-variance uniforms, roughly normal.
    let cut = 0.43 * (spec.informative.len() as f64).sqrt();
    (0..spec.days)
        .map(|_| {
            let n = spec.samples_per_day;
            let mut x = DMatrix::zeros(n, spec.dim);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                for j in 0..spec.dim {
                    x[(i, j)] = if spec.informative.contains(&j) {
                        rng.gen_range(-half_width..half_width)
                    } else {
                        normal.sample(&mut rng)
                    };
                }
                let s: f64 = spec.informative.iter().map(|&j| x[(i, j)]).sum::<f64>()
                    + spec.noise * normal.sample(&mut rng);
                labels.push(Some(if s > cut {
                    Class::Up
                } else if s < -cut {
                    Class::Down
                } else {
                    Class::Stationary
                }));
            }
            let by_h: BTreeMap<usize, Vec<Option<Class>>> =
                spec.horizons.iter().map(|&h| (h, labels.clone())).collect();
            Day::new(x, vec![false; n], by_h).expect("consistent shapes")
        })
        .collect()
}
