//! Brute-force re-implementations of the technical and quantitative
//! indicators. Written from the indicator definitions, with closed-form sums
//! in place of recursions wherever that is possible, and sharing no code with
//! the library beyond its data types.

use std::collections::VecDeque;

use lobfeat_core::config::{CriticalValueRow, QuantConfig, TechnicalConfig};
use lobfeat_core::features::quant::coint::DEFAULT_TABLE;
use lobfeat_core::features::quant::LogisticFeature;
use lobfeat_core::lob::{Block, LobSnapshot};
use nalgebra::{DMatrix, DVector};

const NAN: f64 = f64::NAN;

pub struct Bars {
    pub o: Vec<f64>,
    pub h: Vec<f64>,
    pub l: Vec<f64>,
    pub c: Vec<f64>,
    pub v: Vec<f64>,
    pub mids: Vec<[f64; 10]>,
}

fn window(x: &[f64], t: usize, n: usize) -> Option<&[f64]> {
    if n == 0 || t + 1 < n {
        return None;
    }
    let w = &x[t + 1 - n..=t];
    w.iter().all(|v| v.is_finite()).then_some(w)
}

fn mean(w: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in w {
        s += v;
    }
    s / w.len() as f64
}

fn sma(x: &[f64], n: usize) -> Vec<f64> {
    (0..x.len()).map(|t| window(x, t, n).map_or(NAN, mean)).collect()
}

fn wma(x: &[f64], n: usize) -> Vec<f64> {
    (0..x.len())
        .map(|t| {
            window(x, t, n).map_or(NAN, |w| {
                let (mut num, mut den) = (0.0, 0.0);
                for (i, v) in w.iter().enumerate() {
                    num += (i + 1) as f64 * v;
                    den += (i + 1) as f64;
                }
                num / den
            })
        })
        .collect()
}

fn first_full(x: &[f64], n: usize) -> Option<usize> {
    (0..x.len()).find(|&t| window(x, t, n).is_some())
}

fn ema(x: &[f64], n: usize) -> Vec<f64> {
    let a = 2.0 / (n as f64 + 1.0);
    ema_alpha(x, n, a)
}

fn ema_alpha(x: &[f64], n: usize, a: f64) -> Vec<f64> {
    let mut out = vec![NAN; x.len()];
    let Some(s) = first_full(x, n) else { return out };
    let seed = mean(&x[s + 1 - n..=s]);
    for t in s..x.len() {
        let mut v = seed * (1.0 - a).powi((t - s) as i32);
        for i in s + 1..=t {
            v += a * (1.0 - a).powi((t - i) as i32) * x[i];
        }
        out[t] = v;
    }
    out
}

fn wilder_avg(x: &[f64], n: usize) -> Vec<f64> {
    ema_alpha(x, n, 1.0 / n as f64)
}

/// `S_t = S_{t-1} (1 - 1/n) + x_t` as a sum.
fn wilder_sum(x: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![NAN; x.len()];
    let Some(s) = first_full(x, n) else { return out };
    let seed: f64 = x[s + 1 - n..=s].iter().sum();
    let k = 1.0 - 1.0 / n as f64;
    for t in s..x.len() {
        let mut v = seed * k.powi((t - s) as i32);
        for i in s + 1..=t {
            v += k.powi((t - i) as i32) * x[i];
        }
        out[t] = v;
    }
    out
}

fn sorted(w: &[f64]) -> Vec<f64> {
    let mut v = w.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn highest(x: &[f64], n: usize) -> Vec<f64> {
    (0..x.len()).map(|t| window(x, t, n).map_or(NAN, |w| *sorted(w).last().unwrap())).collect()
}

fn lowest(x: &[f64], n: usize) -> Vec<f64> {
    (0..x.len()).map(|t| window(x, t, n).map_or(NAN, |w| sorted(w)[0])).collect()
}

fn pop_std(x: &[f64], n: usize) -> Vec<f64> {
    (0..x.len())
        .map(|t| {
            window(x, t, n).map_or(NAN, |w| {
                let m = mean(w);
                (w.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / w.len() as f64).sqrt()
            })
        })
        .collect()
}

fn map2(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

/// `num / den` with NaN propagation and a fallback for a zero denominator.
fn div(num: f64, den: f64, zero: f64) -> f64 {
    if num.is_nan() || den.is_nan() {
        NAN
    } else if den == 0.0 {
        zero
    } else {
        num / den
    }
}

/// Least-squares line through `(i, y_i)` from the 2x2 normal equations
/// (Cramer's rule on values shifted by `y_0`): `(slope, intercept, r)`.
fn line(y: &[f64]) -> (f64, f64, f64) {
    let n = y.len() as f64;
    let y0 = y[0];
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let (x, v) = (i as f64, v - y0);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
        syy += v * v;
    }
    let dxx = n * sxx - sx * sx;
    let dxy = n * sxy - sx * sy;
    let dyy = n * syy - sy * sy;
    let slope = if dxx > 0.0 { dxy / dxx } else { 0.0 };
    let intercept = (sy - slope * sx) / n + y0;
    let r = if dxx > 0.0 && dyy > 0.0 { dxy / (dxx * dyy).sqrt() } else { 0.0 };
    (slope, intercept, r)
}

/// First `len` taps of the impulse response of `b / a`.
fn impulse(b: &[f64], a: &[f64], len: usize) -> Vec<f64> {
    let mut h = vec![0.0; len];
    for n in 0..len {
        let mut v = if n < b.len() { b[n] } else { 0.0 };
        for k in 1..a.len().min(n + 1) {
            v -= a[k] * h[n - k];
        }
        h[n] = v / a[0];
    }
    h
}

fn convolve(h: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|n| (0..=n).map(|k| h[k] * x[n - k]).sum()).collect()
}

fn zero_phase(b: &[f64], a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let pad = (3 * b.len().max(a.len())).min(n - 1);
    let mut ext: Vec<f64> = (1..=pad).rev().map(|i| 2.0 * x[0] - x[i]).collect();
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));
    let h = impulse(b, a, ext.len());
    let mut y = convolve(&h, &ext);
    y.reverse();
    let mut y = convolve(&h, &y);
    y.reverse();
    y[pad..pad + n].to_vec()
}

/// Value at the newest point of a least-squares polynomial over the window,
/// solved with an SVD of the Vandermonde matrix.
fn savgol(w: &[f64], degree: usize) -> f64 {
    let m = w.len();
    let v = DMatrix::from_fn(m, degree + 1, |i, k| (i as f64 - (m as f64 - 1.0)).powi(k as i32));
    let y = DVector::from_column_slice(w);
    let c = v.svd(true, true).solve(&y, 1e-14).unwrap();
    c[0]
}

fn sum_up_down(x: &[f64], t: usize, w: usize) -> (f64, f64) {
    let (mut up, mut down) = (0.0, 0.0);
    for i in t + 1 - w..=t {
        let d = x[i] - x[i - 1];
        up += d.max(0.0);
        down += (-d).max(0.0);
    }
    (up, down)
}

fn parabolic_sar(b: &Bars, step: f64, max: f64, ew: usize) -> Vec<f64> {
    struct State {
        long: bool,
        sar: f64,
        ep: f64,
        af: f64,
    }
    let n = b.c.len();
    let mut out = vec![NAN; n];
    if n < 2 {
        return out;
    }
    let ew = ew.max(1);
    let ext_high = |t: usize| sorted(&b.h[t.saturating_sub(ew - 1)..=t]).last().copied().unwrap();
    let ext_low = |t: usize| sorted(&b.l[t.saturating_sub(ew - 1)..=t])[0];
    let long = b.c[1] >= b.c[0];
    let mut s = State {
        long,
        sar: if long { b.l[0] } else { b.h[0] },
        ep: if long { ext_high(1) } else { ext_low(1) },
        af: step,
    };
    out[1] = s.sar;
    for t in 2..n {
        let raw = s.sar + s.af * (s.ep - s.sar);
        if s.long {
            let sar = raw.min(b.l[t - 1]).min(b.l[t - 2]);
            if b.l[t] < sar {
                s = State { long: false, sar: s.ep, ep: ext_low(t), af: step };
            } else {
                let e = ext_high(t);
                let af = if e > s.ep { (s.af + step).min(max) } else { s.af };
                s = State { long: true, sar, ep: e, af };
            }
        } else {
            let sar = raw.max(b.h[t - 1]).max(b.h[t - 2]);
            if b.h[t] > sar {
                s = State { long: true, sar: s.ep, ep: ext_high(t), af: step };
            } else {
                let e = ext_low(t);
                let af = if e < s.ep { (s.af + step).min(max) } else { s.af };
                s = State { long: false, sar, ep: e, af };
            }
        }
        out[t] = s.sar;
    }
    out
}

/// Adaptive average: `out_t = k_t c_t + (1 - k_t) out_{t-1}` unrolled as
/// `prod(1-k) seed + sum k_i c_i prod_{j>i}(1-k_j)`.
fn variable_ma(c: &[f64], w: usize) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![NAN; n];
    if w == 0 || n < w {
        return out;
    }
    let a = 2.0 / (w as f64 + 1.0);
    let k: Vec<f64> = (0..n)
        .map(|t| {
            if t < w {
                return NAN;
            }
            let dir = (c[t] - c[t - w]).abs();
            let vol: f64 = (t + 1 - w..=t).map(|i| (c[i] - c[i - 1]).abs()).sum();
            a * if vol == 0.0 { 0.0 } else { dir / vol }
        })
        .collect();
    for t in w - 1..n {
        let mut v = c[w - 1];
        for j in w..=t {
            v *= 1.0 - k[j];
        }
        for i in w..=t {
            let mut term = k[i] * c[i];
            for j in i + 1..=t {
                term *= 1.0 - k[j];
            }
            v += term;
        }
        out[t] = v;
    }
    out
}

/// The 83 technical columns, in library order.
pub fn technical(b: &Bars, cfg: &TechnicalConfig) -> Vec<Vec<f64>> {
    let n = b.c.len();
    let (o, h, l, c) = (&b.o[..], &b.h[..], &b.l[..], &b.c[..]);
    let m: Vec<f64> = (0..n).map(|t| (h[t] + l[t]) / 2.0).collect();
    let tr: Vec<f64> = (0..n)
        .map(|t| {
            if t == 0 {
                NAN
            } else {
                *sorted(&[h[t] - l[t], (h[t] - c[t - 1]).abs(), (l[t] - c[t - 1]).abs()]).last().unwrap()
            }
        })
        .collect();
    let mut cols: Vec<Vec<f64>> = Vec::new();

    let adl: Vec<f64> = (0..n)
        .map(|t| {
            (0..=t)
                .map(|i| {
                    let r = h[i] - l[i];
                    if r > 0.0 { (2.0 * c[i] - l[i] - h[i]) / r * b.v[i] } else { 0.0 }
                })
                .sum()
        })
        .collect();
    cols.push(adl.clone());
    let ao = map2(&sma(&m, cfg.ao_fast), &sma(&m, cfg.ao_slow), |x, y| x - y);
    cols.push(ao.clone());
    cols.push(map2(&ao, &sma(&ao, cfg.ac_window), |x, y| x - y));

    let w = cfg.adx_window;
    let mut pdm = vec![NAN; n];
    let mut mdm = vec![NAN; n];
    for t in 1..n {
        let up = h[t] - h[t - 1];
        let dn = l[t - 1] - l[t];
        pdm[t] = if up > 0.0 && up > dn { up } else { 0.0 };
        mdm[t] = if dn > 0.0 && dn > up { dn } else { 0.0 };
    }
    let (str_, sp, sm) = (wilder_sum(&tr, w), wilder_sum(&pdm, w), wilder_sum(&mdm, w));
    let dx: Vec<f64> = (0..n)
        .map(|t| {
            let p = 100.0 * div(sp[t], str_[t], 0.0);
            let q = 100.0 * div(sm[t], str_[t], 0.0);
            div(100.0 * (p - q).abs(), p + q, 0.0)
        })
        .collect();
    let adx = wilder_avg(&dx, w);
    cols.push(adx.clone());
    cols.push((0..n).map(|t| if t == 0 { NAN } else { (adx[t] + adx[t - 1]) / 2.0 }).collect());

    for p in cfg.alligator {
        cols.push(sma(&m, p));
    }
    cols.push(map2(&ema(&m, cfg.apo_fast), &ema(&m, cfg.apo_slow), |x, y| x - y));

    let aw = cfg.aroon_window;
    let mut up = vec![NAN; n];
    let mut dn = vec![NAN; n];
    for t in aw..n {
        let hmax = *sorted(&h[t - aw..=t]).last().unwrap();
        let lmin = sorted(&l[t - aw..=t])[0];
        // most recent extreme wins ties
        let hi = (t - aw..=t).filter(|&i| h[i] == hmax).next_back().unwrap();
        let lo = (t - aw..=t).filter(|&i| l[i] == lmin).next_back().unwrap();
        up[t] = 100.0 * (aw - (t - hi)) as f64 / aw as f64;
        dn[t] = 100.0 * (aw - (t - lo)) as f64 / aw as f64;
    }
    cols.push(up.clone());
    cols.push(dn.clone());
    cols.push(map2(&up, &dn, |x, y| x - y));

    let atr = wilder_avg(&tr, cfg.atr_window);
    cols.push(atr.clone());

    let bm = sma(c, cfg.bollinger_window);
    let bs = pop_std(c, cfg.bollinger_window);
    cols.push(bm.clone());
    cols.push(map2(&bm, &bs, |x, s| x + cfg.bollinger_width * s));
    cols.push(map2(&bm, &bs, |x, s| x - cfg.bollinger_width * s));

    let channel = |p: usize| map2(&highest(h, p), &lowest(l, p), |x, y| (x + y) / 2.0);
    let conv = channel(cfg.ichimoku[0]);
    let base = channel(cfg.ichimoku[1]);
    cols.push(conv.clone());
    cols.push(base.clone());
    cols.push(map2(&conv, &base, |x, y| (x + y) / 2.0));
    cols.push(channel(cfg.ichimoku[2]));
    cols.push((0..n).map(|t| if t >= cfg.ichimoku[1] { c[t - cfg.ichimoku[1]] } else { NAN }).collect());

    cols.push(
        (0..n)
            .map(|t| {
                if t < cfg.cmo_window {
                    return NAN;
                }
                let (g, s) = sum_up_down(c, t, cfg.cmo_window);
                100.0 * div(g - s, g + s, 0.0)
            })
            .collect(),
    );
    cols.push(map2(&ema(&adl, cfg.chaikin_fast), &ema(&adl, cfg.chaikin_slow), |x, y| x - y));

    let catr = wilder_avg(&tr, cfg.chandelier_window);
    let km = cfg.chandelier_multiplier;
    cols.push(map2(&highest(h, cfg.chandelier_window), &catr, |x, y| x - km * y));
    cols.push(map2(&lowest(l, cfg.chandelier_window), &catr, |x, y| x + km * y));

    let cw = cfg.cog_window;
    cols.push(
        (0..n)
            .map(|t| {
                if t + 1 < cw {
                    return NAN;
                }
                let win = &m[t + 1 - cw..=t];
                // newest price has weight 1
                let num: f64 = win.iter().rev().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
                -div(num, win.iter().sum(), 0.0)
            })
            .collect(),
    );

    let du = highest(h, cfg.donchian_window);
    let dl = lowest(l, cfg.donchian_window);
    cols.push(du.clone());
    cols.push(map2(&du, &dl, |x, y| (x + y) / 2.0));
    cols.push(dl.clone());

    let e = ema(&m, cfg.dema_window);
    cols.push(map2(&e, &ema(&e, cfg.dema_window), |x, y| 2.0 * x - y));

    let dw = cfg.dpo_window;
    let csma = sma(c, dw);
    if cfg.dpo_standard {
        let shift = dw / 2 + 1;
        cols.push((0..n).map(|t| if t >= shift { c[t - shift] - csma[t] } else { NAN }).collect());
    } else {
        cols.push(map2(&highest(h, dw), &csma, |x, y| x / (dw as f64 + 2.0) - y));
    }

    let mut ha = vec![vec![NAN; n]; 4];
    for t in 1..n {
        ha[0][t] = (o[t - 1] + c[t - 1]) / 2.0;
        ha[1][t] = *sorted(&[h[t], o[t - 1], c[t - 1]]).last().unwrap();
        ha[2][t] = sorted(&[l[t], o[t - 1], c[t - 1]])[0];
        ha[3][t] = (o[t] + h[t] + l[t] + c[t]) / 4.0;
    }
    cols.extend(ha);
    cols.push(du);
    cols.push(dl);

    let hw = cfg.hull_window;
    let raw = map2(&wma(&m, (hw / 2).max(1)), &wma(&m, hw), |x, y| 2.0 * x - y);
    cols.push(wma(&raw, ((hw as f64).sqrt().round() as usize).max(1)));

    cols.push((0..n).map(|t| div(c[t] - l[t], h[t] - l[t], 0.5)).collect());

    let kmid = ema(&m, cfg.keltner_window);
    let katr = wilder_avg(&tr, cfg.keltner_atr_window);
    cols.push(kmid.clone());
    cols.push(map2(&kmid, &katr, |x, y| x + cfg.keltner_multiplier * y));
    cols.push(map2(&kmid, &katr, |x, y| x - cfg.keltner_multiplier * y));

    let slow = ema(&m, cfg.macd_slow);
    let macd = map2(&ema(&m, cfg.macd_fast), &slow, |x, y| x - y);
    cols.push(macd.clone());
    cols.push(m.clone());
    cols.push((0..n).map(|t| if t >= 1 { c[t] - c[t - 1] } else { NAN }).collect());
    cols.push(variable_ma(c, cfg.vma_window));
    cols.push(map2(&atr, c, |x, y| 100.0 * x / y));
    cols.push(map2(&macd, &slow, |x, y| 100.0 * x / y));
    let rw = cfg.roc_window;
    cols.push((0..n).map(|t| if t >= rw { 100.0 * (c[t] / c[t - rw] - 1.0) } else { NAN }).collect());

    let rsi: Vec<f64> = (0..n)
        .map(|t| {
            if t < cfg.rsi_window {
                return NAN;
            }
            let (g, s) = sum_up_down(c, t, cfg.rsi_window);
            100.0 * div(g, g + s, 0.5)
        })
        .collect();
    cols.push(rsi.clone());
    cols.push(parabolic_sar(b, cfg.psar_step, cfg.psar_max, cfg.psar_extreme_window));

    cols.push(map2(c, &sma(c, cfg.stddev_window), |x, y| x - y));
    cols.push(pop_std(c, cfg.stddev_window));

    let sw = cfg.stoch_rsi_window;
    cols.push(
        (0..n)
            .map(|t| {
                window(&rsi, t, sw).map_or(NAN, |w| {
                    let s = sorted(w);
                    div(rsi[t] - s[0], s[s.len() - 1] - s[0], 0.5)
                })
            })
            .collect(),
    );

    let mut chain = vec![c.to_vec()];
    for _ in 0..6 {
        let next = ema(chain.last().unwrap(), cfg.t3_window);
        chain.push(next);
    }
    let a = cfg.t3_volume_factor;
    // GD(GD(GD(x))) expanded in the triple-smoothed EMAs
    let (c1, c2, c3, c4) = (-a.powi(3), 3.0 * a * a * (1.0 + a), -3.0 * a * (1.0 + a) * (1.0 + a), (1.0 + a).powi(3));
    cols.push((0..n).map(|t| c1 * chain[6][t] + c2 * chain[5][t] + c3 * chain[4][t] + c4 * chain[3][t]).collect());

    let e1 = ema(c, cfg.tema_window);
    let e2 = ema(&e1, cfg.tema_window);
    let e3 = ema(&e2, cfg.tema_window);
    cols.push((0..n).map(|t| 3.0 * (e1[t] - e2[t]) + e3[t]).collect());
    let tw = cfg.trima_window;
    cols.push(sma(&sma(&sma(c, tw), tw), tw));

    let x3 = ema(&ema(&ema(c, cfg.trix_window), cfg.trix_window), cfg.trix_window);
    cols.push((0..n).map(|t| if t >= 1 { 100.0 * (x3[t] / x3[t - 1] - 1.0) } else { NAN }).collect());

    let pc: Vec<f64> = (0..n).map(|t| if t >= 1 { c[t] - c[t - 1] } else { NAN }).collect();
    let apc: Vec<f64> = pc.iter().map(|v| v.abs()).collect();
    let num = ema(&ema(&pc, cfg.tsi_long), cfg.tsi_short);
    let den = ema(&ema(&apc, cfg.tsi_long), cfg.tsi_short);
    cols.push(map2(&num, &den, |x, y| 100.0 * div(x, y, 0.0)));

    let ws = cfg.uo_windows;
    let longest = *ws.iter().max().unwrap();
    cols.push(
        (0..n)
            .map(|t| {
                if t < longest.max(1) {
                    return NAN;
                }
                let avg = |p: usize| {
                    let (mut bp, mut r) = (0.0, 0.0);
                    for i in t + 1 - p..=t {
                        let lo = l[i].min(c[i - 1]);
                        bp += c[i] - lo;
                        r += h[i].max(c[i - 1]) - lo;
                    }
                    div(bp, r, 0.5)
                };
                100.0 * (4.0 * avg(ws[0]) + 2.0 * avg(ws[1]) + avg(ws[2])) / 7.0
            })
            .collect(),
    );
    cols.push((0..n).map(|t| (h[t] + l[t] + 2.0 * c[t]) / 4.0).collect());

    let ww = cfg.williams_window;
    let (hh, ll) = (highest(h, ww), lowest(l, ww));
    cols.push((0..n).map(|t| -100.0 * div(hh[t] - c[t], hh[t] - ll[t], 0.5)).collect());

    let lag = cfg.zlema_lag_n.saturating_sub(1) / 2;
    let adj: Vec<f64> = (0..n).map(|t| if t >= lag { c[t] + (c[t] - c[t - lag]) } else { NAN }).collect();
    cols.push(ema(&adj, cfg.zlema_window));

    for p in [o, h, l, c] {
        let mut buy = vec![NAN; n];
        let mut sell = vec![NAN; n];
        for t in 4..n {
            let centre = p[t - 2];
            let nb = [p[t - 4], p[t - 3], p[t - 1], p[t]];
            buy[t] = f64::from(u8::from(nb.iter().all(|v| centre > *v)));
            sell[t] = f64::from(u8::from(nb.iter().all(|v| centre < *v)));
        }
        cols.push(buy);
        cols.push(sell);
    }

    let rwin = cfg.regression_window;
    let mut lrl = vec![vec![NAN; n]; 5];
    let mut rtf = vec![NAN; n];
    let mut zp = vec![NAN; n];
    let mut off = vec![NAN; n];
    for t in rwin.saturating_sub(1)..n {
        let win = &c[t + 1 - rwin..=t];
        let (slope, icept, r) = line(win);
        lrl[0][t] = icept + slope * (rwin - 1) as f64;
        lrl[1][t] = slope;
        lrl[2][t] = icept;
        lrl[3][t] = r;
        lrl[4][t] = r * r;
        let imp = impulse(&cfg.filter_numerator, &cfg.filter_denominator, rwin);
        rtf[t] = (0..rwin).map(|k| imp[k] * win[rwin - 1 - k]).sum();
        if rwin >= 2 {
            zp[t] = *zero_phase(&cfg.filter_numerator, &cfg.filter_denominator, win).last().unwrap();
        }
        off[t] = c[t] - mean(win);
    }
    cols.extend(lrl);
    cols.push(rtf);
    let sg = cfg.savgol_window;
    cols.push((0..n).map(|t| if t + 1 >= sg { savgol(&c[t + 1 - sg..=t], cfg.savgol_degree) } else { NAN }).collect());
    cols.push(zp);
    cols.push(off);

    let mut ds = vec![NAN; n];
    let mut dr = vec![NAN; n];
    for t in 0..n {
        let (slope, icept, _) = line(&b.mids[t]);
        ds[t] = slope;
        dr[t] = b.mids[t][9] - (icept + 9.0 * slope);
    }
    cols.push(ds);
    cols.push(dr);

    let bw = cfg.beta_window;
    let av = sma(c, bw);
    let rel = |x: &[f64]| -> Vec<f64> { (0..n).map(|t| if t >= 1 { x[t] / x[t - 1] } else { NAN }).collect() };
    let (ic, ia) = (rel(c), rel(&av));
    let dc = map2(&ic, &sma(&ic, bw), |x, y| x - y);
    let da = map2(&ia, &sma(&ia, bw), |x, y| x - y);
    cols.push(
        (0..n)
            .map(|t| {
                let (Some(x), Some(y)) = (window(&dc, t, bw), window(&da, t, bw)) else { return NAN };
                let (mx, my) = (mean(x), mean(y));
                let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
                let var: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
                if var > 0.0 { cov / var } else { 0.0 }
            })
            .collect(),
    );
    cols
}

fn mid(s: &LobSnapshot) -> f64 {
    (s.best().ask_price + s.best().bid_price) as f64 / 2.0
}

fn acf(x: &[f64], lags: usize) -> Vec<f64> {
    let n = x.len();
    let mu = mean(x);
    (1..=lags)
        .map(|k| {
            if k >= n {
                return 0.0;
            }
            let a: Vec<f64> = x[..n - k].iter().map(|v| v - mu).collect();
            let b: Vec<f64> = x[k..].iter().map(|v| v - mu).collect();
            let num: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
            let ea: f64 = a.iter().map(|p| p * p).sum();
            let eb: f64 = b.iter().map(|q| q * q).sum();
            if ea > 0.0 && eb > 0.0 { (num / (ea * eb).sqrt()).clamp(-1.0, 1.0) } else { 0.0 }
        })
        .collect()
}

/// Last coefficient of the order-k Yule-Walker system, solved directly.
/// Orders whose prediction error `det R_k / det R_{k-1}` has dropped to 1e-12
/// (here or at a lower order) are reported as 0.
fn pacf(x: &[f64], lags: usize) -> Vec<f64> {
    let r = acf(x, lags);
    let rho = |k: usize| if k == 0 { 1.0 } else { r[k - 1] };
    let toeplitz = |k: usize| DMatrix::from_fn(k, k, |i, j| rho(i.abs_diff(j)));
    let det = |k: usize| if k == 0 { 1.0 } else { toeplitz(k).determinant() };
    let mut out = vec![0.0; lags];
    for k in 1..=lags {
        // prediction error of order k - 1
        if !(det(k) / det(k - 1) > 1e-12) {
            break;
        }
        let rhs = DVector::from_fn(k, |i, _| rho(i + 1));
        match toeplitz(k).lu().solve(&rhs) {
            Some(phi) => out[k - 1] = phi[k - 1],
            None => break,
        }
    }
    out
}

fn log_ret(x: &[f64]) -> Vec<f64> {
    (1..x.len()).map(|t| (x[t] / x[t - 1]).ln()).collect()
}

fn table_quantile(r: &CriticalValueRow, t: f64) -> f64 {
    r.tau_inf + r.c1 / t + r.c2 / (t * t)
}

fn adf(u: &[f64]) -> Option<f64> {
    // du_t on (u_{t-1}, du_{t-1}), no constant
    let du: Vec<f64> = (1..u.len()).map(|t| u[t] - u[t - 1]).collect();
    let rows = du.len() - 1;
    let x = DMatrix::from_fn(rows, 2, |i, j| if j == 0 { u[i + 1] } else { du[i] });
    let y = DVector::from_fn(rows, |i, _| du[i + 1]);
    let beta = x.clone().svd(true, true).solve(&y, 0.0).ok()?;
    let e = &y - &x * &beta;
    let s2 = e.norm_squared() / (rows - 2) as f64;
    let g = x.transpose() * &x;
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let var = s2 * g[(1, 1)] / det;
    Some(if var > 0.0 { beta[0] / var.sqrt() } else if beta[0] < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY })
}

fn engle_granger(a: &[f64], b: &[f64]) -> [f64; 3] {
    let n = a.len();
    let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { b[i] });
    let (ma, mb) = (mean(a), mean(b));
    let sbb: f64 = b.iter().map(|v| (v - mb) * (v - mb)).sum();
    let coef = if sbb > 0.0 {
        x.svd(true, true).solve(&DVector::from_column_slice(a), 0.0).unwrap()
    } else {
        DVector::from_vec(vec![ma, 0.0])
    };
    let u: Vec<f64> = (0..n).map(|i| a[i] - coef[0] - coef[1] * b[i]).collect();
    let energy: f64 = a.iter().map(|v| v * v).sum();
    let resid: f64 = u.iter().map(|v| v * v).sum();
    let stat = if resid <= 1e-24 * energy {
        f64::NEG_INFINITY
    } else {
        match adf(&u) {
            Some(s) => s,
            None => return [NAN; 3],
        }
    };
    let tn = n as f64;
    let cv = table_quantile(DEFAULT_TABLE.iter().find(|r| r.p == 0.05).unwrap(), tn);
    let q: Vec<(f64, f64)> = DEFAULT_TABLE.iter().map(|r| (table_quantile(r, tn), r.p)).collect();
    let p = if stat == f64::NEG_INFINITY {
        0.0
    } else if stat <= q[0].0 {
        q[0].1
    } else if stat > q[q.len() - 1].0 {
        q[q.len() - 1].1
    } else {
        let i = q.iter().position(|(qv, _)| stat <= *qv).unwrap();
        let ((q0, p0), (q1, p1)) = (q[i - 1], q[i]);
        p0 + (p1 - p0) * (stat - q0) / (q1 - q0)
    };
    [f64::from(u8::from(stat < cv)), p, stat]
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn cross_entropy(theta: &DVector<f64>, v: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let z = v * theta;
    let m = y.len() as f64;
    (0..y.len())
        .map(|i| {
            let zi = z[i];
            let log1pexp = if zi > 0.0 { zi + (-zi).exp().ln_1p() } else { zi.exp().ln_1p() };
            log1pexp - y[i] * zi
        })
        .sum::<f64>()
        / m
}

/// Checks one damped Newton update `before -> after` on `batch`.
///
/// The update is read back as `after = before - 2^-k d`; `d` must solve the
/// ridge-regularised Newton system to a backward error of 1e-9, the cost at
/// `after` must not exceed the cost at `before`, and every longer step along
/// `d` must have raised it. An unchanged `before` needs a vanishing gradient
/// or no improving step along the oracle's own direction. Returns the backward
/// error.
pub fn check_newton(
    before: &DVector<f64>,
    after: &DVector<f64>,
    batch: &[(Vec<f64>, f64)],
    ridge: f64,
    max_halvings: usize,
) -> Result<f64, String> {
    let d = before.len();
    let m = batch.len();
    let v = DMatrix::from_fn(m, d, |i, j| batch[i].0[j]);
    let y = DVector::from_fn(m, |i, _| batch[i].1);
    let p = (&v * before).map(sigmoid);
    let g = v.transpose() * (&p - &y) / m as f64;
    let wts = p.map(|q| q * (1.0 - q));
    let hess = v.transpose() * DMatrix::from_diagonal(&wts) * &v / m as f64 + DMatrix::identity(d, d) * ridge;
    let j0 = cross_entropy(before, &v, &y);
    let slack = 1e-9 * j0.abs().max(1e-300);
    let cost = |th: &DVector<f64>| cross_entropy(th, &v, &y);
    if after == before {
        if g.iter().all(|x| *x == 0.0) {
            return Ok(0.0);
        }
        let dir = hess.lu().solve(&g).ok_or("singular Newton system")?;
        for k in 0..=max_halvings {
            let j = cost(&(before - &dir * 0.5f64.powi(k as i32)));
            if j.is_finite() && j < j0 - slack {
                return Err(format!("rejected step although halving {k} lowers the cost ({j} < {j0})"));
            }
        }
        return Ok(0.0);
    }
    let delta = before - after;
    let hn = hess.norm();
    let (mut best_k, mut best_r, mut best_tol) = (0, f64::INFINITY, f64::MIN_POSITIVE);
    for k in 0..=max_halvings {
        let s = 0.5f64.powi(k as i32);
        let dir = &delta / s;
        let scale = hn * dir.norm() + g.norm();
        let r = (&hess * &dir - &g).norm() / scale;
        // plus the rounding of `before - after` when the step is small next to theta
        let tol = 1e-9 + 4.0 * f64::EPSILON * hn * before.norm().max(after.norm()) / s / scale;
        if r / tol < best_r / best_tol {
            (best_k, best_r, best_tol) = (k, r, tol);
        }
    }
    if best_r > best_tol {
        return Err(format!("update is not a Newton step (backward error {best_r:e})"));
    }
    let dir = &delta / 0.5f64.powi(best_k as i32);
    let j1 = cost(after);
    if !(j1.is_finite() && j1 <= j0 + slack) {
        return Err(format!("accepted step raises the cost ({j1} > {j0})"));
    }
    for k in 0..best_k {
        let j = cost(&(before - &dir * 0.5f64.powi(k as i32)));
        if j.is_finite() && j < j0 - slack {
            return Err(format!("halving {k} already lowered the cost but {best_k} was taken"));
        }
    }
    Ok(best_r)
}

fn level_ratios(theta: &DVector<f64>, levels: usize) -> (f64, f64) {
    let w = |k: usize| if k <= levels { theta[k].abs() + theta[levels + k].abs() } else { 0.0 };
    let r = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    (r(w(1), w(2) + w(3)), r(w(1) + w(2) + w(3), w(4) + w(5) + w(6)))
}

/// The window statistics and imbalances of every block (the quantitative
/// group without its logistic outputs).
pub fn quant(blocks: &[Block], cfg: &QuantConfig) -> Vec<Vec<f64>> {
    let (mut mids, mut asks, mut bids) = (Vec::new(), Vec::new(), Vec::new());
    let mut rows = Vec::new();
    for (t, blk) in blocks.iter().enumerate() {
        let last = blk.snapshots.last().unwrap();
        mids.push(mid(last));
        asks.push(last.best().ask_price as f64);
        bids.push(last.best().bid_price as f64);
        let from = (t + 1).saturating_sub(cfg.window.max(1));
        let (wm, wa, wb) = (&mids[from..], &asks[from..], &bids[from..]);
        let mut row = Vec::new();
        let n_window = 2 * cfg.acf_lags + cfg.pacf_mid_lags + cfg.pacf_return_lags + 3;
        if wm.len() < cfg.min_window.max(2) {
            row.extend(std::iter::repeat_n(NAN, n_window));
        } else {
            let r = log_ret(wm);
            row.extend(acf(wm, cfg.acf_lags));
            row.extend(acf(&r, cfg.acf_lags));
            row.extend(pacf(wm, cfg.pacf_mid_lags));
            row.extend(pacf(&r, cfg.pacf_return_lags));
            row.extend(engle_granger(wa, wb));
        }
        let lvls = last.levels();
        let imb = |b: f64, a: f64| if b + a > 0.0 { (b - a) / (b + a) } else { 0.0 };
        row.extend(lvls.iter().map(|x| imb(x.bid_volume as f64, x.ask_volume as f64)));
        let tb: f64 = lvls.iter().map(|x| x.bid_volume as f64).sum();
        let ta: f64 = lvls.iter().map(|x| x.ask_volume as f64).sum();
        row.push(imb(tb, ta));
        rows.push(row);
    }
    rows
}

/// Drives the library's logistic feature over `blocks`. Before every block
/// the outputs are recomputed from the library's current parameters and the
/// oracle's own regressors; after it, both parameter updates are checked
/// with [`check_newton`] on the oracle's own batches. Returns the largest
/// output gap and the largest backward error.
pub fn logistic(blocks: &[Block], cfg: &QuantConfig) -> Result<(f64, f64), String> {
    let lv = cfg.logistic_levels;
    let mut lf = LogisticFeature::new(cfg);
    let mut batches: [VecDeque<(Vec<f64>, f64)>; 2] = [VecDeque::new(), VecDeque::new()];
    let (mut gap, mut backward): (f64, f64) = (0.0, 0.0);
    for (t, blk) in blocks.iter().enumerate() {
        let before = [DVector::from_vec(lf.ask.theta.clone()), DVector::from_vec(lf.bid.theta.clone())];
        let out = lf.push(blk);
        let last = blk.snapshots.last().unwrap();
        let ninth = &blk.snapshots[blk.snapshots.len() - 2];
        let mut v = vec![1.0];
        v.extend(ninth.levels()[..lv].iter().map(|x| x.ask_volume as f64));
        v.extend(ninth.levels()[..lv].iter().map(|x| x.bid_volume as f64));
        let expected = if t == 0 {
            [NAN; 6]
        } else {
            let vv = DVector::from_column_slice(&v);
            let (la, ea) = level_ratios(&before[0], lv);
            let (lb, eb) = level_ratios(&before[1], lv);
            [sigmoid(before[0].dot(&vv)), sigmoid(before[1].dot(&vv)), la, ea, lb, eb]
        };
        for (k, (a, b)) in out.iter().zip(&expected).enumerate() {
            if a.is_nan() != b.is_nan() || (a - b).abs() > 1e-9 * 1f64.max(a.abs()) {
                return Err(format!("logistic output {k} at block {t}: library {a} vs oracle {b}"));
            }
            if a.is_finite() {
                gap = gap.max((a - b).abs() / 1f64.max(a.abs()));
            }
        }
        let y = [
            f64::from(u8::from(ninth.best().ask_price != last.best().ask_price)),
            f64::from(u8::from(ninth.best().bid_price != last.best().bid_price)),
        ];
        let after = [DVector::from_vec(lf.ask.theta.clone()), DVector::from_vec(lf.bid.theta.clone())];
        for side in 0..2 {
            let q = &mut batches[side];
            q.push_back((v.clone(), y[side]));
            while q.len() > cfg.logistic_batch.max(1) {
                q.pop_front();
            }
            let r = check_newton(&before[side], &after[side], q.make_contiguous(), cfg.logistic_ridge, cfg.logistic_max_halvings)
                .map_err(|e| format!("{} model at block {t}: {e}", ["ask", "bid"][side]))?;
            backward = backward.max(r);
        }
    }
    Ok((gap, backward))
}
