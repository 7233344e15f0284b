//! Fractal, detrended-fluctuation, symbolic-dynamics and attention-entropy
//! indices of the RR series.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use libm::{log, sqrt};

use crate::error::{Error, Result, Warning};
use crate::stats::{linear_fit, mean, sd, sd_pop, shannon_entropy_counts};

/// Sevcik fractal dimension: the curve is mapped to the unit square and
/// `FD = 1 + ln L / ln(2(n − 1))` with `L` its length.
pub fn sevcik_fd(x: &[f64]) -> f64 {
    let n = x.len();
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if n < 2 || !(range > 0.0) {
        return 1.0;
    }
    let dx = 1.0 / (n - 1) as f64;
    let len: f64 = x
        .windows(2)
        .map(|w| {
            let dy = (w[1] - w[0]) / range;
            sqrt(dy * dy + dx * dx)
        })
        .sum();
    1.0 + log(len) / log(2.0 * (n - 1) as f64)
}

/// Hurst exponent by rescaled range over dyadic windows 8, 16, … ≤ n/2.
/// `None` when no window has spread.
pub fn hurst_rs(x: &[f64]) -> Option<f64> {
    let n = x.len();
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut w = 8;
    while w <= n / 2 {
        let mut acc = 0.0;
        let mut cnt = 0usize;
        for seg in x.chunks_exact(w) {
            let m = mean(seg);
            let s = sd_pop(seg);
            if s <= 0.0 {
                continue;
            }
            let (mut c, mut lo, mut hi) = (0.0, 0.0f64, 0.0f64);
            for v in seg {
                c += v - m;
                lo = lo.min(c);
                hi = hi.max(c);
            }
            acc += (hi - lo) / s;
            cnt += 1;
        }
        if cnt > 0 && acc > 0.0 {
            lx.push(log(w as f64));
            ly.push(log(acc / cnt as f64));
        }
        w *= 2;
    }
    if lx.len() < 2 {
        return None;
    }
    Some(linear_fit(&lx, &ly).0)
}

/// FracDim and HurstExp.
pub fn fractal_rr(x: &[f64], warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    if x.len() < 64 {
        return Err(Error::InsufficientData { what: "fractal indices (intervals)", needed: 64, got: x.len() });
    }
    let h = hurst_rs(x).unwrap_or_else(|| {
        warnings.push(Warning::new("fractal_rr", "constant series; Hurst exponent set to 0.5"));
        0.5
    });
    Ok(vec![sevcik_fd(x), h])
}

/// DFA fluctuation `F(s)` of the integrated, mean-centred series with linear
/// detrending in non-overlapping boxes of size `s`.
pub fn dfa_fluctuation(profile: &[f64], s: usize) -> f64 {
    let nbox = profile.len() / s;
    if nbox == 0 || s < 2 {
        return 0.0;
    }
    // centred abscissa: sum t = 0, so the slope is Σ t·y / Σ t²
    let c = (s as f64 - 1.0) / 2.0;
    let stt: f64 = (0..s).map(|t| (t as f64 - c) * (t as f64 - c)).sum();
    let mut ss = 0.0;
    for b in profile.chunks_exact(s).take(nbox) {
        let m = mean(b);
        let slope = b.iter().enumerate().map(|(t, y)| (t as f64 - c) * y).sum::<f64>() / stt;
        for (t, y) in b.iter().enumerate() {
            let r = y - m - slope * (t as f64 - c);
            ss += r * r;
        }
    }
    sqrt(ss / (nbox * s) as f64)
}

pub fn dfa_profile(x: &[f64]) -> Vec<f64> {
    let m = mean(x);
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            acc += v - m;
            acc
        })
        .collect()
}

/// Least-squares slope of `log F(s)` over all integer box sizes in `[lo, hi]`.
pub fn dfa_alpha(profile: &[f64], lo: usize, hi: usize) -> f64 {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for s in lo..=hi {
        let f = dfa_fluctuation(profile, s);
        if f > 0.0 {
            lx.push(log(s as f64));
            ly.push(log(f));
        }
    }
    if lx.len() < 2 {
        return f64::NAN;
    }
    linear_fit(&lx, &ly).0
}

/// DFA_alpha1 (short scales) and DFA_alpha2 (long scales, capped at n/4).
pub fn dfa_rr(x: &[f64], short: [usize; 2], long: [usize; 2]) -> Result<Vec<f64>> {
    if x.len() < 100 {
        return Err(Error::InsufficientData { what: "DFA (intervals)", needed: 100, got: x.len() });
    }
    let p = dfa_profile(x);
    let hi2 = long[1].min(x.len() / 4);
    Ok(vec![dfa_alpha(&p, short[0], short[1]), dfa_alpha(&p, long[0], hi2)])
}

/// Symbol of each interval on `levels` uniform bins spanning the series range.
pub fn uniform_symbols(x: &[f64], levels: usize) -> Vec<usize> {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    x.iter()
        .map(
            |v| {
                if range > 0.0 {
                    ((libm::floor((v - lo) / range * levels as f64)) as usize).min(levels - 1)
                } else {
                    0
                }
            },
        )
        .collect()
}

/// Four-symbol alphabet around the mean:
/// 0 = (μ, μ+aσ], 1 = above μ+aσ, 2 = (μ−aσ, μ], 3 = at or below μ−aσ.
pub fn sigma_symbols(x: &[f64], a: f64) -> Vec<u8> {
    let m = mean(x);
    let s = sd(x);
    x.iter()
        .map(|&v| {
            if v > m + a * s {
                1
            } else if v > m {
                0
            } else if v > m - a * s {
                2
            } else {
                3
            }
        })
        .collect()
}

/// v0 and v2 (percent of three-symbol words with zero and two level changes
/// on a six-level quantization), c1v and c3v (fraction of words made only of
/// the inner symbols {0, 2}, respectively only of the outer symbols {1, 3}).
pub fn symbolic_rr(x: &[f64], levels: usize, a: f64, warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    if x.len() < 30 {
        return Err(Error::InsufficientData { what: "symbolic dynamics (intervals)", needed: 30, got: x.len() });
    }
    if !(sd(x) > 0.0) {
        warnings.push(Warning::new("symbolic_rr", "constant series; c-statistics set to 0"));
        return Ok(vec![100.0, 0.0, 0.0, 0.0]);
    }
    let sym = uniform_symbols(x, levels);
    let words = sym.len() - 2;
    let mut zero = 0usize;
    let mut two = 0usize;
    for w in sym.windows(3) {
        let changes = (w[0] != w[1]) as usize + (w[1] != w[2]) as usize;
        match changes {
            0 => zero += 1,
            2 => two += 1,
            _ => {}
        }
    }
    let s4 = sigma_symbols(x, a);
    let mut inner = 0usize;
    let mut outer = 0usize;
    for w in s4.windows(3) {
        if w.iter().all(|s| *s == 0 || *s == 2) {
            inner += 1;
        }
        if w.iter().all(|s| *s == 1 || *s == 3) {
            outer += 1;
        }
    }
    let wf = words as f64;
    Ok(vec![100.0 * zero as f64 / wf, 100.0 * two as f64 / wf, inner as f64 / wf, outer as f64 / wf])
}

/// Strict local maxima and minima.
pub fn key_points(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        if x[i] > x[i - 1] && x[i] > x[i + 1] {
            maxima.push(i);
        } else if x[i] < x[i - 1] && x[i] < x[i + 1] {
            minima.push(i);
        }
    }
    (maxima, minima)
}

/// Intervals from each key point in `from` to the next key point in `to`.
pub fn key_intervals(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0;
    for &a in from {
        while j < to.len() && to[j] <= a {
            j += 1;
        }
        if j == to.len() {
            break;
        }
        out.push(to[j] - a);
    }
    out
}

fn interval_entropy(iv: &[usize]) -> f64 {
    let mut hist: BTreeMap<usize, f64> = BTreeMap::new();
    for &v in iv {
        *hist.entry(v).or_insert(0.0) += 1.0;
    }
    let counts: Vec<f64> = hist.into_values().collect();
    shannon_entropy_counts(&counts)
}

/// Attention entropy for max→max, min→min, max→min and min→max intervals,
/// then their mean.
pub fn attention_entropy_rr(x: &[f64], warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    if x.len() < 20 {
        return Err(Error::InsufficientData { what: "attention entropy (intervals)", needed: 20, got: x.len() });
    }
    let (mx, mn) = key_points(x);
    let pairs: [(&[usize], &[usize]); 4] = [(&mx, &mx), (&mn, &mn), (&mx, &mn), (&mn, &mx)];
    let mut out = Vec::with_capacity(5);
    let mut short = false;
    for (a, b) in pairs {
        let iv = key_intervals(a, b);
        if iv.is_empty() {
            short = true;
            out.push(0.0);
        } else {
            out.push(interval_entropy(&iv));
        }
    }
    if short {
        warnings.push(Warning::new("attention_entropy_rr", "too few key points; component set to 0"));
    }
    out.push(out.iter().sum::<f64>() / 4.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_dimension_near_one() {
        let x: Vec<f64> = (0..1024).map(|i| i as f64).collect();
        let fd = sevcik_fd(&x);
        assert!((1.0..=1.05).contains(&fd), "{fd}");
    }

    #[test]
    fn constant_series_defaults() {
        let mut w = Vec::new();
        assert_eq!(fractal_rr(&[5.0; 64], &mut w).unwrap(), vec![1.0, 0.5]);
        assert_eq!(symbolic_rr(&[5.0; 40], 6, 0.05, &mut w).unwrap(), vec![100.0, 0.0, 0.0, 0.0]);
        assert!(!w.is_empty());
    }

    #[test]
    fn level_change_every_beat_has_no_flat_words() {
        let x: Vec<f64> = (0..36).map(|i| (i % 6) as f64).collect();
        let f = symbolic_rr(&x, 6, 0.05, &mut Vec::new()).unwrap();
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], 100.0);
    }

    #[test]
    fn word_partition_sums_to_hundred() {
        let x: Vec<f64> = (0..100).map(|i| libm::sin(i as f64 * 0.7) * 50.0 + 800.0).collect();
        let f = symbolic_rr(&x, 6, 0.05, &mut Vec::new()).unwrap();
        let sym = uniform_symbols(&x, 6);
        let one = sym.windows(3).filter(|w| (w[0] != w[1]) as usize + (w[1] != w[2]) as usize == 1).count() as f64;
        let one_pct = 100.0 * one / (sym.len() - 2) as f64;
        assert!((f[0] + f[1] + one_pct - 100.0).abs() < 1e-9);
    }

    #[test]
    fn period_two_alternation_has_zero_attention_entropy() {
        let x: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 800.0 } else { 900.0 }).collect();
        let f = attention_entropy_rr(&x, &mut Vec::new()).unwrap();
        assert!(f.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_interval_values_give_ln_two() {
        assert!((interval_entropy(&[2, 3, 2, 3]) - libm::log(2.0)).abs() < 1e-12);
    }

    #[test]
    fn dfa_is_scale_invariant() {
        let x: Vec<f64> = (0..300).map(|i| libm::sin(i as f64 * 1.3) + libm::cos(i as f64 * 0.21)).collect();
        let y: Vec<f64> = x.iter().map(|v| v * 10.0).collect();
        let a = dfa_rr(&x, [4, 16], [16, 64]).unwrap();
        let b = dfa_rr(&y, [4, 16], [16, 64]).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
    }
}
