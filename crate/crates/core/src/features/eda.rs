//! Statistics of the decomposed electrodermal components and the EDA
//! sympathetic spectral index.

use alloc::vec;
use alloc::vec::Vec;

use super::FeatureParams;
use crate::error::{Error, Result};
use crate::rr::thin_by_distance;
use crate::spectral::{periodogram, welch, Window};
use crate::stats::{mad, mean, median, sd};

/// Local maxima with prominence at least `min_prominence`, thinned so that no
/// two peaks are closer than `min_distance` samples (higher peaks win).
/// Plateaus report their first sample.
pub fn find_peaks(x: &[f64], min_prominence: f64, min_distance: usize) -> Vec<usize> {
    let n = x.len();
    let mut cand = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                cand.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let prominent: Vec<usize> = cand.into_iter().filter(|&p| prominence(x, p) >= min_prominence).collect();
    thin_by_distance(&prominent, x, min_distance)
}

/// Topographic prominence of the peak at `p`.
pub fn prominence(x: &[f64], p: usize) -> f64 {
    let h = x[p];
    let mut left_min = h;
    for k in (0..p).rev() {
        if x[k] > h {
            break;
        }
        left_min = left_min.min(x[k]);
    }
    let mut right_min = h;
    for &v in &x[p + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn segments(x: &[f64], len: usize) -> impl Iterator<Item = &[f64]> {
    x.chunks_exact(len)
}

fn require_segments(x: &[f64], len: usize, what: &'static str) -> Result<()> {
    if len == 0 || x.len() < 2 * len {
        return Err(Error::InsufficientData { what, needed: 2 * len.max(1), got: x.len() });
    }
    Ok(())
}

fn four_stats(x: &[f64]) -> [f64; 4] {
    [mean(x), median(x), sd(x), mad(x)]
}

fn windowed_four(x: &[f64], len: usize) -> [f64; 4] {
    let mut acc = [0.0; 4];
    let mut k = 0.0;
    for s in segments(x, len) {
        for (a, v) in acc.iter_mut().zip(four_stats(s)) {
            *a += v;
        }
        k += 1.0;
    }
    acc.map(|a| a / k)
}

/// Whole-window mean, median, std, MAD, then their averages over
/// non-overlapping segments.
pub fn scl_features(scl: &[f64], fs: f64, p: &FeatureParams) -> Result<Vec<f64>> {
    let len = libm::round(p.scl_segment * fs) as usize;
    require_segments(scl, len, "SCL features (samples)")?;
    let mut out = four_stats(scl).to_vec();
    out.extend(windowed_four(scl, len));
    Ok(out)
}

/// Whole-window mean, median, std, MAD, Npeaks, MaxPeak, AmpSum, then the
/// segment averages of mean, median, std, MAD and AmpSum.
pub fn scr_features(scr: &[f64], fs: f64, p: &FeatureParams) -> Result<Vec<f64>> {
    let len = libm::round(p.scr_segment * fs) as usize;
    require_segments(scr, len, "SCR features (samples)")?;
    let peaks = find_peaks(scr, p.peak_prominence, min_distance(fs, p));
    let (npk, maxpk, ampsum) = peak_stats(scr, &peaks);
    let mut out = four_stats(scr).to_vec();
    out.extend([npk, maxpk, ampsum]);
    out.extend(windowed_four(scr, len));
    let nseg = scr.len() / len;
    let mut seg_sum = vec![0.0; nseg];
    for &pk in &peaks {
        if pk / len < nseg {
            seg_sum[pk / len] += scr[pk];
        }
    }
    out.push(mean(&seg_sum));
    Ok(out)
}

/// Mean, MaxPeak, Npeaks, AmpSum of the driver.
pub fn smna_features(smna: &[f64], fs: f64, p: &FeatureParams) -> Result<Vec<f64>> {
    if smna.len() < 3 {
        return Err(Error::InsufficientData { what: "SMNA features (samples)", needed: 3, got: smna.len() });
    }
    let peaks = find_peaks(smna, p.peak_prominence, min_distance(fs, p));
    let (npk, maxpk, ampsum) = peak_stats(smna, &peaks);
    Ok(vec![mean(smna), maxpk, npk, ampsum])
}

fn min_distance(fs: f64, p: &FeatureParams) -> usize {
    (libm::round(p.peak_separation * fs) as usize).max(1)
}

fn peak_stats(x: &[f64], peaks: &[usize]) -> (f64, f64, f64) {
    let amps: Vec<f64> = peaks.iter().map(|&i| x[i]).collect();
    let max = amps.iter().cloned().fold(0.0, f64::max);
    (amps.len() as f64, max, amps.iter().sum())
}

/// EDASymp, _db, _nu from a Hann-tapered periodogram, then the same three from Welch,
/// computed on `scl + scr`.
pub fn edasymp_features(scl: &[f64], scr: &[f64], fs: f64, p: &FeatureParams) -> Result<Vec<f64>> {
    if scl.len() != scr.len() {
        return Err(Error::Data(alloc::format!("SCL and SCR lengths differ ({} vs {})", scl.len(), scr.len())));
    }
    let s: Vec<f64> = scl.iter().zip(scr).map(|(a, b)| a + b).collect();
    let per = periodogram(&s, fs, Window::Hann);
    let seg = libm::round(p.welch_segment * fs) as usize;
    let (wel, _) = welch(&s, fs, seg, p.welch_overlap);
    let mut out = Vec::with_capacity(6);
    for est in [&per, &wel] {
        let band = est.band_power(p.edasymp_band[0], p.edasymp_band[1]);
        let norm = est.band_power(p.edasymp_norm_band[0], p.edasymp_norm_band[1]);
        if !(norm > 0.0) {
            return Err(Error::DegenerateSignal("EDA spectrum has zero power"));
        }
        out.extend([band, 10.0 * libm::log10(band), (band / norm).min(1.0)]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_scl() {
        let x = vec![3.0; 2000];
        let f = scl_features(&x, 50.0, &FeatureParams::default()).unwrap();
        assert_eq!(f, vec![3.0, 3.0, 0.0, 0.0, 3.0, 3.0, 0.0, 0.0]);
    }

    #[test]
    fn two_triangular_pulses() {
        let mut x = vec![0.0; 1000];
        for (centre, h) in [(200usize, 0.5), (600, 0.8)] {
            for k in 0..20 {
                let v = h * (1.0 - k as f64 / 20.0);
                x[centre + k] = v;
                x[centre - k] = v;
            }
        }
        let f = scr_features(&x, 50.0, &FeatureParams::default()).unwrap();
        assert_eq!(f[4], 2.0);
        assert_eq!(f[5], 0.8);
        assert!((f[6] - 1.3).abs() < 1e-12);
    }

    #[test]
    fn silent_driver() {
        let f = smna_features(&vec![0.0; 500], 50.0, &FeatureParams::default()).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn too_short_scl_is_rejected() {
        assert!(scl_features(&[1.0; 1500], 50.0, &FeatureParams::default()).is_err());
    }

    #[test]
    fn close_peaks_are_thinned() {
        let mut x = vec![0.0; 200];
        x[50] = 1.0;
        x[70] = 0.5;
        x[150] = 0.7;
        assert_eq!(find_peaks(&x, 0.01, 50), vec![50, 150]);
    }
}
