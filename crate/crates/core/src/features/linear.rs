//! Time-domain, geometric and spectral indices of the RR series, and the
//! EDA/RR spectral ratios.

use alloc::vec;
use alloc::vec::Vec;
use libm::{floor, sqrt};

use super::FeatureParams;
use crate::error::{Error, Result, Warning};
use crate::rr::{RrSeries, UniformSeries};
use crate::spectral::{welch, SpectralEstimate};
use crate::stats::{kurtosis, mean, sd, skewness};

fn diffs(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// meanRR, stdRR, SDSD, RMSSD, NN50, pNN50, meanDER1, stdDER1, meanDER2,
/// stdDER2, SkewRR, KurtRR.
pub fn temporal_rr(rr: &RrSeries) -> Result<Vec<f64>> {
    let x = &rr.intervals;
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { what: "temporal RR indices (intervals)", needed: 3, got: n });
    }
    let d1 = diffs(x);
    let d2 = diffs(&d1);
    let rmssd = sqrt(d1.iter().map(|v| v * v).sum::<f64>() / d1.len() as f64);
    let nn50 = d1.iter().filter(|v| v.abs() > 50.0).count() as f64;
    let (skew, kurt) = if sd(x) > 0.0 { (skewness(x), kurtosis(x)) } else { (0.0, 0.0) };
    Ok(vec![
        mean(x),
        sd(x),
        sd(&d1),
        rmssd,
        nn50,
        100.0 * nn50 / (n - 1) as f64,
        mean(&d1),
        sd(&d1),
        mean(&d2),
        sd(&d2),
        skew,
        kurt,
    ])
}

/// TriRR and TINN (ms) from the interval histogram.
///
/// TINN is the base `M − N` of the least-squares triangle whose apex sits on
/// the mode bin and whose zeros fall on bin edges; the minimal base is one
/// bin.
pub fn geometric_rr(rr: &RrSeries, bin_seconds: f64) -> Result<Vec<f64>> {
    let n = rr.len();
    if n < 20 {
        return Err(Error::InsufficientData { what: "geometric RR indices (intervals)", needed: 20, got: n });
    }
    let bw = bin_seconds * 1000.0;
    let counts = histogram_counts(&rr.intervals, bw);
    let (mode, peak) =
        counts.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, &c)| if c > bv { (i, c) } else { (bi, bv) });
    Ok(vec![n as f64 / peak, tinn_bins(&counts, mode) as f64 * bw])
}

/// Interval histogram with bins `[k·bw, (k+1)·bw)` from the bin of the minimum to that of the maximum.
pub fn histogram_counts(x: &[f64], bw: f64) -> Vec<f64> {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = floor(lo / bw) as i64;
    let last = floor(hi / bw) as i64;
    let mut counts = vec![0.0; (last - first + 1) as usize];
    for v in x {
        counts[(floor(v / bw) as i64 - first) as usize] += 1.0;
    }
    counts
}

/// Base width (in bins) of the best triangular fit to `counts` with apex at `mode`.
pub fn tinn_bins(counts: &[f64], mode: usize) -> usize {
    let nb = counts.len();
    let apex = counts[mode];
    let c_apex = mode as f64 + 0.5;
    let mut best = (f64::INFINITY, 1usize);
    // zeros at bin edges: left edge n_e in 0..=mode, right edge m_e in mode+1..=nb
    for n_e in 0..=mode {
        for m_e in mode + 1..=nb {
            let (nf, mf) = (n_e as f64, m_e as f64);
            let mut err = 0.0;
            for (j, &d) in counts.iter().enumerate() {
                let c = j as f64 + 0.5;
                let q = if c <= nf || c >= mf {
                    0.0
                } else if c <= c_apex {
                    apex * (c - nf) / (c_apex - nf)
                } else {
                    apex * (mf - c) / (mf - c_apex)
                };
                err += (d - q) * (d - q);
            }
            if err < best.0 {
                best = (err, m_e - n_e);
            }
        }
    }
    best.1
}

/// LF_power, HF_power, LF_perc, HF_perc, LF_nu, HF_nu, LF/HF, LF_peak, HF_peak.
///
/// Also returns the spectral estimate so the combined ratios can reuse HF.
pub fn spectral_rr(
    u: &UniformSeries,
    p: &FeatureParams,
    warnings: &mut Vec<Warning>,
) -> Result<(Vec<f64>, SpectralEstimate)> {
    if u.values.len() < 8 {
        return Err(Error::InsufficientData { what: "RR spectrum (samples)", needed: 8, got: u.values.len() });
    }
    let seg = libm::round(p.welch_segment * u.fs) as usize;
    let (est, fell_back) = welch(&u.values, u.fs, seg, p.welch_overlap);
    if fell_back {
        warnings.push(Warning::new("spectral_rr", "series shorter than one Welch segment; used a single periodogram"));
    }
    let lf = est.band_power(p.lf_band[0], p.lf_band[1]);
    let hf = est.band_power(p.hf_band[0], p.hf_band[1]);
    let total = est.band_power(p.total_band[0], p.total_band[1]);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
    let vals = vec![
        lf,
        hf,
        100.0 * ratio(lf, total).min(1.0),
        100.0 * ratio(hf, total).min(1.0),
        ratio(lf, lf + hf),
        ratio(hf, lf + hf),
        ratio(lf, hf),
        est.peak_frequency(p.lf_band[0], p.lf_band[1]).unwrap_or(f64::NAN),
        est.peak_frequency(p.hf_band[0], p.hf_band[1]).unwrap_or(f64::NAN),
    ];
    if !(lf + hf > 0.0) {
        warnings.push(Warning::new("spectral_rr", "zero LF+HF power; ratios undefined"));
    }
    Ok((vals, est))
}

/// EDASymp/HF and EDASymp_Welch/HF.
pub fn combined_ratios(edasymp: f64, edasymp_welch: f64, hf_power: f64) -> Result<Vec<f64>> {
    if !(hf_power > 0.0) {
        return Err(Error::DegenerateSignal("HF power is zero; EDASymp/HF undefined"));
    }
    Ok(vec![edasymp / hf_power, edasymp_welch / hf_power])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(ms: &[f64]) -> RrSeries {
        let mut t = 0.0;
        let beat_times = ms
            .iter()
            .map(|v| {
                t += v / 1000.0;
                t
            })
            .collect();
        RrSeries { intervals: ms.to_vec(), beat_times }
    }

    #[test]
    fn hand_evaluated_temporal_indices() {
        let f = temporal_rr(&series(&[800.0, 810.0, 790.0, 805.0, 815.0])).unwrap();
        assert!((f[0] - 804.0).abs() < 1e-9);
        assert!((f[3] - 206.25f64.sqrt()).abs() < 1e-9);
        assert_eq!(f[4], 0.0);
        assert_eq!(f[5], 0.0);
    }

    #[test]
    fn alternating_series_has_full_pnn50() {
        let x: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 800.0 } else { 900.0 }).collect();
        let f = temporal_rr(&series(&x)).unwrap();
        assert_eq!(f[4], 19.0);
        assert_eq!(f[5], 100.0);
    }

    #[test]
    fn constant_series_has_no_variability() {
        let f = temporal_rr(&series(&[900.0; 10])).unwrap();
        assert_eq!(f[1], 0.0);
        assert_eq!(f[3], 0.0);
        assert_eq!(f[5], 0.0);
    }

    #[test]
    fn short_series_is_rejected() {
        assert!(temporal_rr(&series(&[800.0, 810.0])).is_err());
    }

    #[test]
    fn single_bin_histogram() {
        let f = geometric_rr(&series(&[800.0; 25]), 1.0 / 128.0).unwrap();
        assert_eq!(f[0], 1.0);
        assert!((f[1] - 7.8125).abs() < 1e-12);
    }

    #[test]
    fn uniform_bins_give_tri_index_k() {
        // 4 bins with 6 intervals each
        let bw = 7.8125;
        let x: Vec<f64> = (0..24).map(|i| 800.0 + bw * ((i % 4) as f64 + 0.5)).collect();
        let f = geometric_rr(&series(&x), 1.0 / 128.0).unwrap();
        assert!((f[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn triangular_histogram_recovers_base() {
        // counts 1,2,3,4,3,2,1 over 7 bins: base spans 8 bin edges around the apex
        let heights = [1usize, 2, 3, 4, 3, 2, 1];
        let counts: Vec<f64> = heights.iter().map(|&h| h as f64).collect();
        let base = tinn_bins(&counts, 3);
        assert!((base as f64 - 8.0).abs() <= 1.0, "base {base}");
    }

    #[test]
    fn ratios_scale_with_numerator() {
        assert_eq!(combined_ratios(2.0, 1.0, 0.5).unwrap(), vec![4.0, 2.0]);
        assert_eq!(combined_ratios(0.0, 0.0, 0.5).unwrap(), vec![0.0, 0.0]);
        assert!(combined_ratios(1.0, 1.0, 0.0).is_err());
    }
}
