use alloc::vec;
use alloc::vec::Vec;

use super::series::{
    diff, ema, filtfilt, fit_line, lagged, lfilter, rolling_max, rolling_min, rolling_std, savgol_weights, sma,
    true_range, wilder_average, wilder_sum, wma, zip_with, Series,
};
use super::{BarSeries, TECHNICAL_FEATURES};
use crate::config::TechnicalConfig;
use crate::error::Result;
use crate::math;

const NAN: f64 = f64::NAN;

fn ratio_or(num: f64, den: f64, fallback: f64) -> f64 {
    if num.is_nan() || den.is_nan() {
        NAN
    } else if den == 0.0 {
        fallback
    } else {
        num / den
    }
}

/// Column for each of the 83 technical features, each as long as `bars`.
pub fn compute_all(bars: &BarSeries, c: &TechnicalConfig) -> Result<Vec<Series>> {
    bars.validate()?;
    let n = bars.len();
    let (o, h, l, cl) = (&bars.open[..], &bars.high[..], &bars.low[..], &bars.close[..]);
    let m = bars.median();
    let tr = true_range(h, l, cl);
    let mut out: Vec<Series> = Vec::with_capacity(TECHNICAL_FEATURES);

    // ADL and its oscillator
    let mut adl = vec![0.0; n];
    for t in 0..n {
        let range = h[t] - l[t];
        let mfm = if range > 0.0 { ((cl[t] - l[t]) - (h[t] - cl[t])) / range } else { 0.0 };
        adl[t] = if t > 0 { adl[t - 1] } else { 0.0 } + mfm * bars.volume[t];
    }
    out.push(adl.clone());

    let ao = zip_with(&sma(&m, c.ao_fast)?, &sma(&m, c.ao_slow)?, |a, b| a - b);
    let ac = zip_with(&ao, &sma(&ao, c.ac_window)?, |a, b| a - b);
    out.push(ao);
    out.push(ac);

    let (adx, adxr) = adx(h, l, &tr, c.adx_window)?;
    out.push(adx);
    out.push(adxr);

    for w in c.alligator {
        out.push(sma(&m, w)?);
    }
    out.push(zip_with(&ema(&m, c.apo_fast)?, &ema(&m, c.apo_slow)?, |a, b| a - b));

    let (up, down) = aroon(h, l, c.aroon_window);
    let osc = zip_with(&up, &down, |a, b| a - b);
    out.push(up);
    out.push(down);
    out.push(osc);

    let atr = wilder_average(&tr, c.atr_window)?;
    out.push(atr.clone());

    let bb_mid = sma(cl, c.bollinger_window)?;
    let bb_sd = rolling_std(cl, c.bollinger_window)?;
    out.push(bb_mid.clone());
    out.push(zip_with(&bb_mid, &bb_sd, |a, s| a + c.bollinger_width * s));
    out.push(zip_with(&bb_mid, &bb_sd, |a, s| a - c.bollinger_width * s));

    let mid_channel = |w: usize| -> Result<Series> {
        Ok(zip_with(&rolling_max(h, w)?, &rolling_min(l, w)?, |a, b| (a + b) / 2.0))
    };
    let conversion = mid_channel(c.ichimoku[0])?;
    let base = mid_channel(c.ichimoku[1])?;
    out.push(conversion.clone());
    out.push(base.clone());
    out.push(zip_with(&conversion, &base, |a, b| (a + b) / 2.0));
    out.push(mid_channel(c.ichimoku[2])?);
    out.push(lagged(cl, c.ichimoku[1]));

    out.push(cmo(cl, c.cmo_window));
    out.push(zip_with(&ema(&adl, c.chaikin_fast)?, &ema(&adl, c.chaikin_slow)?, |a, b| a - b));

    let atr_ce = wilder_average(&tr, c.chandelier_window)?;
    let k = c.chandelier_multiplier;
    out.push(zip_with(&rolling_max(h, c.chandelier_window)?, &atr_ce, |a, b| a - k * b));
    out.push(zip_with(&rolling_min(l, c.chandelier_window)?, &atr_ce, |a, b| a + k * b));

    out.push(center_of_gravity(&m, c.cog_window));

    let dc_up = rolling_max(h, c.donchian_window)?;
    let dc_low = rolling_min(l, c.donchian_window)?;
    out.push(dc_up.clone());
    out.push(zip_with(&dc_up, &dc_low, |a, b| (a + b) / 2.0));
    out.push(dc_low.clone());

    let e = ema(&m, c.dema_window)?;
    out.push(zip_with(&e, &ema(&e, c.dema_window)?, |a, b| 2.0 * a - b));

    let cl_sma = sma(cl, c.dpo_window)?;
    if c.dpo_standard {
        out.push(zip_with(&lagged(cl, c.dpo_window / 2 + 1), &cl_sma, |a, b| a - b));
    } else {
        let div = c.dpo_window as f64 + 2.0;
        out.push(zip_with(&rolling_max(h, c.dpo_window)?, &cl_sma, |a, b| a / div - b));
    }

    let [ha_o, ha_h, ha_l, ha_c] = heikin_ashi(o, h, l, cl);
    out.extend([ha_o, ha_h, ha_l, ha_c]);

    out.push(dc_up);
    out.push(dc_low);

    let half = wma(&m, (c.hull_window / 2).max(1))?;
    let full = wma(&m, c.hull_window)?;
    let raw = zip_with(&half, &full, |a, b| 2.0 * a - b);
    let sqrt_n = (math::round(math::sqrt(c.hull_window as f64)) as usize).max(1);
    out.push(wma(&raw, sqrt_n)?);

    out.push((0..n).map(|t| ratio_or(cl[t] - l[t], h[t] - l[t], 0.5)).collect());

    let kc_mid = ema(&m, c.keltner_window)?;
    let kc_atr = wilder_average(&tr, c.keltner_atr_window)?;
    let km = c.keltner_multiplier;
    out.push(kc_mid.clone());
    out.push(zip_with(&kc_mid, &kc_atr, |a, b| a + km * b));
    out.push(zip_with(&kc_mid, &kc_atr, |a, b| a - km * b));

    let slow = ema(&m, c.macd_slow)?;
    let macd = zip_with(&ema(&m, c.macd_fast)?, &slow, |a, b| a - b);
    out.push(macd.clone());
    out.push(m.clone());
    out.push(diff(cl, 1));
    out.push(vma(cl, c.vma_window));
    out.push(zip_with(&atr, cl, |a, b| a / b * 100.0));
    out.push(zip_with(&macd, &slow, |a, b| a / b * 100.0));
    let w = c.roc_window;
    out.push((0..n).map(|t| if t >= w { (cl[t] - cl[t - w]) / cl[t - w] * 100.0 } else { NAN }).collect());

    let rsi = rsi(cl, c.rsi_window);
    out.push(rsi.clone());
    out.push(psar(h, l, cl, c.psar_step, c.psar_max, c.psar_extreme_window)?);

    out.push(zip_with(cl, &sma(cl, c.stddev_window)?, |a, b| a - b));
    out.push(rolling_std(cl, c.stddev_window)?);

    let lo = rolling_min(&rsi, c.stoch_rsi_window)?;
    let hi = rolling_max(&rsi, c.stoch_rsi_window)?;
    out.push((0..n).map(|t| ratio_or(rsi[t] - lo[t], hi[t] - lo[t], 0.5)).collect());

    out.push(t3(cl, c.t3_window, c.t3_volume_factor)?);

    let e1 = ema(cl, c.tema_window)?;
    let e2 = ema(&e1, c.tema_window)?;
    let e3 = ema(&e2, c.tema_window)?;
    out.push((0..n).map(|t| 3.0 * e1[t] - 3.0 * e2[t] + e3[t]).collect());

    out.push(sma(&sma(&sma(cl, c.trima_window)?, c.trima_window)?, c.trima_window)?);

    let x1 = ema(cl, c.trix_window)?;
    let x3 = ema(&ema(&x1, c.trix_window)?, c.trix_window)?;
    out.push((0..n).map(|t| if t >= 1 { (x3[t] - x3[t - 1]) / x3[t - 1] * 100.0 } else { NAN }).collect());

    let pc = diff(cl, 1);
    let apc: Series = pc.iter().map(|v| math::abs(*v)).collect();
    let num = ema(&ema(&pc, c.tsi_long)?, c.tsi_short)?;
    let den = ema(&ema(&apc, c.tsi_long)?, c.tsi_short)?;
    out.push(zip_with(&num, &den, |a, b| 100.0 * ratio_or(a, b, 0.0)));

    out.push(ultimate_oscillator(h, l, cl, c.uo_windows));
    out.push((0..n).map(|t| (h[t] + l[t] + 2.0 * cl[t]) / 4.0).collect());

    let hh = rolling_max(h, c.williams_window)?;
    let ll = rolling_min(l, c.williams_window)?;
    out.push((0..n).map(|t| -100.0 * ratio_or(hh[t] - cl[t], hh[t] - ll[t], 0.5)).collect());

    let lag = c.zlema_lag_n.saturating_sub(1) / 2;
    let adjusted: Series = (0..n).map(|t| if t >= lag { 2.0 * cl[t] - cl[t - lag] } else { NAN }).collect();
    out.push(ema(&adjusted, c.zlema_window)?);

    for p in [o, h, l, cl] {
        let (buy, sell) = fractals(p);
        out.push(buy);
        out.push(sell);
    }

    regression_and_filters(bars, c, &mut out)?;

    debug_assert_eq!(out.len(), TECHNICAL_FEATURES);
    Ok(out)
}

fn adx(h: &[f64], l: &[f64], tr: &[f64], w: usize) -> Result<(Series, Series)> {
    let n = h.len();
    let mut pdm = vec![NAN; n];
    let mut mdm = vec![NAN; n];
    for t in 1..n {
        let up = h[t] - h[t - 1];
        let down = l[t - 1] - l[t];
        pdm[t] = if up > down && up > 0.0 { up } else { 0.0 };
        mdm[t] = if down > up && down > 0.0 { down } else { 0.0 };
    }
    let str_ = wilder_sum(tr, w)?;
    let sp = wilder_sum(&pdm, w)?;
    let sm = wilder_sum(&mdm, w)?;
    let dx: Series = (0..n)
        .map(|t| {
            let pdi = 100.0 * ratio_or(sp[t], str_[t], 0.0);
            let mdi = 100.0 * ratio_or(sm[t], str_[t], 0.0);
            ratio_or(100.0 * math::abs(pdi - mdi), pdi + mdi, 0.0)
        })
        .collect();
    let adx = wilder_average(&dx, w)?;
    let adxr = (0..n).map(|t| if t >= 1 { (adx[t] + adx[t - 1]) / 2.0 } else { NAN }).collect();
    Ok((adx, adxr))
}

fn aroon(h: &[f64], l: &[f64], w: usize) -> (Series, Series) {
    let n = h.len();
    let mut up = vec![NAN; n];
    let mut down = vec![NAN; n];
    for t in w..n {
        let (mut hi, mut lo) = (t - w, t - w);
        for i in t - w..=t {
            if h[i] >= h[hi] {
                hi = i;
            }
            if l[i] <= l[lo] {
                lo = i;
            }
        }
        up[t] = (w - (t - hi)) as f64 / w as f64 * 100.0;
        down[t] = (w - (t - lo)) as f64 / w as f64 * 100.0;
    }
    (up, down)
}

/// Sum of up-moves and down-moves over the last `w` one-bar differences.
fn gains_losses(x: &[f64], t: usize, w: usize) -> (f64, f64) {
    let (mut g, mut s) = (0.0, 0.0);
    for i in t + 1 - w..=t {
        let d = x[i] - x[i - 1];
        if d > 0.0 {
            g += d;
        } else {
            s -= d;
        }
    }
    (g, s)
}

fn cmo(cl: &[f64], w: usize) -> Series {
    (0..cl.len())
        .map(|t| {
            if t < w {
                return NAN;
            }
            let (g, s) = gains_losses(cl, t, w);
            100.0 * ratio_or(g - s, g + s, 0.0)
        })
        .collect()
}

fn rsi(cl: &[f64], w: usize) -> Series {
    (0..cl.len())
        .map(|t| {
            if t < w {
                return NAN;
            }
            match gains_losses(cl, t, w) {
                (g, s) if s == 0.0 => if g == 0.0 { 50.0 } else { 100.0 },
                (g, s) => 100.0 - 100.0 / (1.0 + g / s),
            }
        })
        .collect()
}

fn center_of_gravity(m: &[f64], w: usize) -> Series {
    (0..m.len())
        .map(|t| {
            if t + 1 < w {
                return NAN;
            }
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..w {
                num += (i + 1) as f64 * m[t - i];
                den += m[t - i];
            }
            -ratio_or(num, den, 0.0)
        })
        .collect()
}

fn heikin_ashi(o: &[f64], h: &[f64], l: &[f64], cl: &[f64]) -> [Series; 4] {
    let n = o.len();
    let mut r = [vec![NAN; n], vec![NAN; n], vec![NAN; n], vec![NAN; n]];
    for t in 1..n {
        r[0][t] = (o[t - 1] + cl[t - 1]) / 2.0;
        r[1][t] = h[t].max(o[t - 1]).max(cl[t - 1]);
        r[2][t] = l[t].min(o[t - 1]).min(cl[t - 1]);
        r[3][t] = (o[t] + h[t] + l[t] + cl[t]) / 4.0;
    }
    r
}

fn vma(cl: &[f64], w: usize) -> Series {
    let n = cl.len();
    let mut out = vec![NAN; n];
    if w == 0 || n < w {
        return out;
    }
    let alpha = 2.0 / (w as f64 + 1.0);
    out[w - 1] = cl[w - 1];
    for t in w..n {
        let direction = math::abs(cl[t] - cl[t - w]);
        let volatility: f64 = (t + 1 - w..=t).map(|i| math::abs(cl[i] - cl[i - 1])).sum();
        let er = ratio_or(direction, volatility, 0.0);
        out[t] = alpha * er * cl[t] + (1.0 - alpha * er) * out[t - 1];
    }
    out
}

fn psar(h: &[f64], l: &[f64], cl: &[f64], step: f64, max: f64, ew: usize) -> Result<Series> {
    let n = h.len();
    let mut out = vec![NAN; n];
    if n < 2 {
        return Ok(out);
    }
    // Extremes over the trailing window, clipped at the series start.
    let hi = |t: usize| h[t.saturating_sub(ew.max(1) - 1)..=t].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = |t: usize| l[t.saturating_sub(ew.max(1) - 1)..=t].iter().copied().fold(f64::INFINITY, f64::min);
    let mut rising = cl[1] >= cl[0];
    let mut sar = if rising { l[0] } else { h[0] };
    let mut ep = if rising { hi(1) } else { lo(1) };
    let mut af = step;
    out[1] = sar;
    for t in 2..n {
        let mut next = sar + af * (ep - sar);
        if rising {
            next = next.min(l[t - 1]).min(l[t - 2]);
            if l[t] < next {
                rising = false;
                next = ep;
                af = step;
                ep = lo(t);
            } else {
                let e = hi(t);
                if e > ep {
                    af = (af + step).min(max);
                }
                ep = e;
            }
        } else {
            next = next.max(h[t - 1]).max(h[t - 2]);
            if h[t] > next {
                rising = true;
                next = ep;
                af = step;
                ep = hi(t);
            } else {
                let e = lo(t);
                if e < ep {
                    af = (af + step).min(max);
                }
                ep = e;
            }
        }
        sar = next;
        out[t] = sar;
    }
    Ok(out)
}

fn t3(cl: &[f64], w: usize, a: f64) -> Result<Series> {
    let mut e = Vec::with_capacity(6);
    let mut prev = cl.to_vec();
    for _ in 0..6 {
        prev = ema(&prev, w)?;
        e.push(prev.clone());
    }
    let c1 = -a * a * a;
    let c2 = 3.0 * a * a + 3.0 * a * a * a;
    let c3 = -6.0 * a * a - 3.0 * a - 3.0 * a * a * a;
    let c4 = 1.0 + 3.0 * a + a * a * a + 3.0 * a * a;
    Ok((0..cl.len()).map(|t| c1 * e[5][t] + c2 * e[4][t] + c3 * e[3][t] + c4 * e[2][t]).collect())
}

fn ultimate_oscillator(h: &[f64], l: &[f64], cl: &[f64], ws: [usize; 3]) -> Series {
    let n = h.len();
    let mut bp = vec![NAN; n];
    let mut tr = vec![NAN; n];
    for t in 1..n {
        let lo = l[t].min(cl[t - 1]);
        bp[t] = cl[t] - lo;
        tr[t] = h[t].max(cl[t - 1]) - lo;
    }
    let longest = ws.iter().copied().max().unwrap_or(0);
    (0..n)
        .map(|t| {
            if t < longest.max(1) {
                return NAN;
            }
            let avg = |w: usize| {
                let b: f64 = bp[t + 1 - w..=t].iter().sum();
                let r: f64 = tr[t + 1 - w..=t].iter().sum();
                ratio_or(b, r, 0.5)
            };
            100.0 * (4.0 * avg(ws[0]) + 2.0 * avg(ws[1]) + avg(ws[2])) / 7.0
        })
        .collect()
}

/// Bill Williams fractals on a 5-bar pattern centred two bars back.
fn fractals(p: &[f64]) -> (Series, Series) {
    let n = p.len();
    let mut buy = vec![NAN; n];
    let mut sell = vec![NAN; n];
    for t in 4..n {
        let c = p[t - 2];
        let others = [p[t - 4], p[t - 3], p[t - 1], p[t]];
        buy[t] = if others.iter().all(|v| c > *v) { 1.0 } else { 0.0 };
        sell[t] = if others.iter().all(|v| c < *v) { 1.0 } else { 0.0 };
    }
    (buy, sell)
}

fn regression_and_filters(bars: &BarSeries, c: &TechnicalConfig, out: &mut Vec<Series>) -> Result<()> {
    let cl = &bars.close[..];
    let n = cl.len();
    let rw = c.regression_window;
    let mut lrl = [vec![NAN; n], vec![NAN; n], vec![NAN; n], vec![NAN; n], vec![NAN; n]];
    let mut rtf = vec![NAN; n];
    let mut zp = vec![NAN; n];
    let mut offset = vec![NAN; n];
    for t in rw.saturating_sub(1)..n {
        if rw == 0 {
            break;
        }
        let win = &cl[t + 1 - rw..=t];
        let fit = fit_line(win);
        lrl[0][t] = fit.at((rw - 1) as f64);
        lrl[1][t] = fit.slope;
        lrl[2][t] = fit.intercept;
        lrl[3][t] = fit.r;
        lrl[4][t] = fit.r * fit.r;
        rtf[t] = *lfilter(&c.filter_numerator, &c.filter_denominator, win)?.last().unwrap();
        if rw >= 2 {
            zp[t] = *filtfilt(&c.filter_numerator, &c.filter_denominator, win)?.last().unwrap();
        }
        offset[t] = cl[t] - math::mean(win);
    }
    out.extend(lrl);
    out.push(rtf);

    let sw = c.savgol_window;
    let xs: Vec<f64> = (0..sw).map(|i| i as f64 - (sw as f64 - 1.0)).collect();
    let weights = savgol_weights(&xs, &vec![1.0; sw], c.savgol_degree, 0.0)?;
    out.push(
        (0..n)
            .map(|t| if t + 1 >= sw { cl[t + 1 - sw..=t].iter().zip(&weights).map(|(y, w)| y * w).sum() } else { NAN })
            .collect(),
    );
    out.push(zp);
    out.push(offset);

    let mut slope = vec![NAN; n];
    let mut resid = vec![NAN; n];
    for (t, mids) in bars.block_mids.iter().enumerate() {
        let fit = fit_line(mids);
        slope[t] = fit.slope;
        resid[t] = mids[mids.len() - 1] - fit.at((mids.len() - 1) as f64);
    }
    out.push(slope);
    out.push(resid);

    out.push(beta(cl, c.beta_window)?);
    Ok(())
}

fn beta(cl: &[f64], w: usize) -> Result<Series> {
    let n = cl.len();
    let av = sma(cl, w)?;
    let idx_cl: Series = (0..n).map(|t| if t >= 1 { cl[t] / cl[t - 1] } else { NAN }).collect();
    let idx_av: Series = (0..n).map(|t| if t >= 1 { av[t] / av[t - 1] } else { NAN }).collect();
    let dev_cl = zip_with(&idx_cl, &sma(&idx_cl, w)?, |a, b| a - b);
    let dev_av = zip_with(&idx_av, &sma(&idx_av, w)?, |a, b| a - b);
    Ok((0..n)
        .map(|t| {
            if t + 1 < w {
                return NAN;
            }
            let x = &dev_cl[t + 1 - w..=t];
            let y = &dev_av[t + 1 - w..=t];
            if x.iter().chain(y).any(|v| v.is_nan()) {
                return NAN;
            }
            let (mx, my) = (math::mean(x), math::mean(y));
            let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / w as f64;
            let var: f64 = y.iter().map(|b| (b - my) * (b - my)).sum::<f64>() / w as f64;
            if var > 0.0 { cov / var } else { 0.0 }
        })
        .collect())
}
