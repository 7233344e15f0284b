//! R-peak detection, RR interval series and uniform resampling.
//!
//! The detector follows the Pan-Tompkins pipeline: 5-15 Hz band-pass,
//! five-point derivative, squaring, 150 ms moving-window integration and
//! adaptive dual thresholds with search-back, a 200 ms refractory period and
//! T-wave discrimination inside 360 ms. All filtering is zero-phase so the
//! integrated envelope stays aligned with the QRS complexes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filter::{filtfilt, Biquad};

/// Beat-to-beat interval series.
///
/// `beat_times[i]` is the instant of the beat that closes `intervals[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrSeries {
    /// Milliseconds.
    pub intervals: Vec<f64>,
    /// Seconds.
    pub beat_times: Vec<f64>,
}

impl RrSeries {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn span(&self) -> f64 {
        match (self.beat_times.first(), self.beat_times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Uniformly sampled series.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    pub values: Vec<f64>,
    pub fs: f64,
    pub t0: f64,
}

impl UniformSeries {
    pub fn duration(&self) -> f64 {
        self.values.len() as f64 / self.fs
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.fs
    }
}

/// Tunables of the QRS detector.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub band_lo: f64,
    pub band_hi: f64,
    pub integration_window: f64,
    pub refractory: f64,
    pub t_wave_window: f64,
    /// Half-width of the window searched for the R apex around an envelope peak.
    pub apex_search: f64,
    /// Reject an interval deviating more than 20% from the previous accepted one.
    pub ectopic_filter: bool,
    pub ectopic_tolerance: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            band_lo: 5.0,
            band_hi: 15.0,
            integration_window: 0.150,
            refractory: 0.200,
            t_wave_window: 0.360,
            apex_search: 0.075,
            ectopic_filter: false,
            ectopic_tolerance: 0.20,
        }
    }
}

/// Detects R-peak instants (seconds from the first sample).
pub fn detect_r_peaks(ecg: &[f64], fs: f64, cfg: &DetectorConfig) -> Result<Vec<f64>> {
    if fs < 100.0 {
        return Err(Error::Config(format!("ECG sampling rate {fs} Hz is below 100 Hz")));
    }
    let n = ecg.len();
    if (n as f64) < 2.0 * fs {
        return Err(Error::InsufficientData {
            what: "R-peak detection (samples)",
            needed: (2.0 * fs) as usize,
            got: n,
        });
    }

    let bp = filtfilt(&[Biquad::butter_highpass(cfg.band_lo, fs), Biquad::butter_lowpass(cfg.band_hi, fs)], ecg);
    // five-point derivative
    let mut deriv = vec![0.0; n];
    for i in 2..n.saturating_sub(2) {
        deriv[i] = (2.0 * bp[i + 2] + bp[i + 1] - bp[i - 1] - 2.0 * bp[i - 2]) * fs / 8.0;
    }
    let squared: Vec<f64> = deriv.iter().map(|d| d * d).collect();
    let mwi = centred_moving_average(&squared, (libm::round(cfg.integration_window * fs) as usize).max(1));

    let refractory = libm::round(cfg.refractory * fs) as usize;
    let t_wave = libm::round(cfg.t_wave_window * fs) as usize;
    let slope_half = (libm::round(cfg.apex_search * fs) as usize).max(1);

    // candidate envelope peaks: local maxima separated by at least the refractory period
    let candidates = local_maxima_min_distance(&mwi, refractory);
    if candidates.is_empty() {
        return Err(Error::SignalQuality("no QRS energy in the ECG".into()));
    }

    let train = ((2.0 * fs) as usize).min(n);
    let train_max = mwi[..train].iter().cloned().fold(0.0, f64::max);
    let train_mean = mwi[..train].iter().sum::<f64>() / train as f64;
    if !(train_max > 0.0) {
        return Err(Error::SignalQuality("flat ECG: no QRS energy".into()));
    }
    let mut spki = train_max / 3.0;
    let mut npki = train_mean / 2.0;
    let mut thr1 = npki + 0.25 * (spki - npki);

    let max_slope = |c: usize| -> f64 {
        let lo = c.saturating_sub(slope_half);
        let hi = (c + slope_half).min(n - 1);
        deriv[lo..=hi].iter().fold(0.0, |m, d| m.max(d.abs()))
    };

    let mut qrs: Vec<usize> = Vec::new();
    let mut qrs_slopes: Vec<f64> = Vec::new();
    let mut skipped: Vec<usize> = Vec::new();
    let mut rr_recent: Vec<usize> = Vec::new();

    for &c in &candidates {
        let pk = mwi[c];
        // search-back for a missed beat before considering this candidate
        if let Some(&last) = qrs.last() {
            if rr_recent.len() >= 2 {
                let avg = rr_recent.iter().sum::<usize>() as f64 / rr_recent.len() as f64;
                if (c - last) as f64 > 1.66 * avg {
                    let thr2 = 0.5 * thr1;
                    let best = skipped
                        .iter()
                        .copied()
                        .filter(|&s| s > last + refractory && s + refractory < c && mwi[s] > thr2)
                        .max_by(|&a, &b| mwi[a].total_cmp(&mwi[b]));
                    if let Some(s) = best {
                        spki = 0.25 * mwi[s] + 0.75 * spki;
                        push_rr(&mut rr_recent, s - last);
                        qrs.push(s);
                        qrs_slopes.push(max_slope(s));
                        skipped.clear();
                        thr1 = npki + 0.25 * (spki - npki);
                    }
                }
            }
        }

        if pk > thr1 {
            let mut is_qrs = true;
            if let Some(&last) = qrs.last() {
                if c - last < refractory {
                    is_qrs = false;
                } else if c - last < t_wave {
                    let prev = *qrs_slopes.last().unwrap_or(&0.0);
                    if max_slope(c) < 0.5 * prev {
                        is_qrs = false;
                    }
                }
            }
            if is_qrs {
                spki = 0.125 * pk + 0.875 * spki;
                if let Some(&last) = qrs.last() {
                    push_rr(&mut rr_recent, c - last);
                }
                qrs.push(c);
                qrs_slopes.push(max_slope(c));
                skipped.clear();
            } else {
                npki = 0.125 * pk + 0.875 * npki;
            }
        } else {
            npki = 0.125 * pk + 0.875 * npki;
            skipped.push(c);
        }
        thr1 = npki + 0.25 * (spki - npki);
    }

    // locate the R apex on the raw trace near each envelope peak
    let mut times: Vec<f64> = Vec::with_capacity(qrs.len());
    let mut last_idx: Option<usize> = None;
    for &c in &qrs {
        let lo = c.saturating_sub(slope_half);
        let hi = (c + slope_half).min(n - 1);
        let mut best = lo;
        for i in lo..=hi {
            if ecg[i] > ecg[best] {
                best = i;
            }
        }
        if let Some(prev) = last_idx {
            if best <= prev || best - prev < refractory {
                continue;
            }
        }
        last_idx = Some(best);
        times.push((best as f64 + parabolic_offset(ecg, best)) / fs);
    }

    if cfg.ectopic_filter {
        times = drop_ectopic(&times, cfg.ectopic_tolerance);
    }

    if times.len() < 3 {
        return Err(Error::SignalQuality(format!("only {} QRS complexes detected", times.len())));
    }
    Ok(times)
}

fn push_rr(buf: &mut Vec<usize>, rr: usize) {
    buf.push(rr);
    if buf.len() > 8 {
        buf.remove(0);
    }
}

fn parabolic_offset(x: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return 0.0;
    }
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let den = a - 2.0 * b + c;
    if den >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / den).clamp(-0.5, 0.5)
}

fn centred_moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    let before = width / 2;
    let after = width - before;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Strict-rise local maxima; among maxima closer than `min_dist`, the larger wins.
fn local_maxima_min_distance(x: &[f64], min_dist: usize) -> Vec<usize> {
    let n = x.len();
    let mut peaks: Vec<usize> = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            // walk over a plateau
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                peaks.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    thin_by_distance(&peaks, x, min_dist)
}

/// Keeps the highest peaks first and drops any neighbour within `min_dist`.
pub(crate) fn thin_by_distance(peaks: &[usize], x: &[f64], min_dist: usize) -> Vec<usize> {
    if min_dist <= 1 {
        return peaks.to_vec();
    }
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| x[peaks[b]].total_cmp(&x[peaks[a]]).then(a.cmp(&b)));
    let mut keep = vec![true; peaks.len()];
    for &k in &order {
        if !keep[k] {
            continue;
        }
        let pk = peaks[k];
        let mut j = k;
        while j > 0 && pk - peaks[j - 1] < min_dist {
            j -= 1;
            keep[j] = false;
        }
        let mut j = k + 1;
        while j < peaks.len() && peaks[j] - pk < min_dist {
            keep[j] = false;
            j += 1;
        }
    }
    peaks.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}

fn drop_ectopic(times: &[f64], tol: f64) -> Vec<f64> {
    if times.len() < 3 {
        return times.to_vec();
    }
    let mut out = vec![times[0], times[1]];
    let mut prev_rr = times[1] - times[0];
    for &t in &times[2..] {
        let rr = t - out[out.len() - 1];
        if (rr - prev_rr).abs() <= tol * prev_rr {
            out.push(t);
            prev_rr = rr;
        }
    }
    out
}

/// Converts beat instants into an RR series.
pub fn build_rr(beat_times: &[f64]) -> Result<RrSeries> {
    if beat_times.len() < 3 {
        return Err(Error::InsufficientData { what: "RR series (beats)", needed: 3, got: beat_times.len() });
    }
    let mut intervals = Vec::with_capacity(beat_times.len() - 1);
    for (i, w) in beat_times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Data(format!("beat times not strictly increasing at index {}", i + 1)));
        }
        intervals.push((w[1] - w[0]) * 1000.0);
    }
    Ok(RrSeries { intervals, beat_times: beat_times[1..].to_vec() })
}

/// Resamples the RR series on a uniform grid with a shape-preserving
/// piecewise-cubic Hermite interpolant. The grid runs from the first to the
/// last beat time, never extrapolating.
pub fn resample_rr(rr: &RrSeries, fs: f64) -> Result<UniformSeries> {
    if rr.len() < 2 || rr.span() < 2.0 / fs {
        return Err(Error::Data(format!("RR series spans {:.3} s, shorter than two samples at {fs} Hz", rr.span())));
    }
    let interp = Pchip::new(&rr.beat_times, &rr.intervals);
    let t0 = rr.beat_times[0];
    let count = libm::floor(rr.span() * fs + 1e-9) as usize + 1;
    let values = (0..count).map(|i| interp.eval(t0 + i as f64 / fs)).collect();
    Ok(UniformSeries { values, fs, t0 })
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
        } else {
            for k in 1..n - 1 {
                if del[k - 1] * del[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], del[0], del[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        Pchip { x: x.to_vec(), y: y.to_vec(), d }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return self.y[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() || del0 == 0.0 {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > (3.0 * del0).abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_rr_from_three_beats() {
        let rr = build_rr(&[0.0, 0.8, 1.7]).unwrap();
        assert!((rr.intervals[0] - 800.0).abs() < 1e-9);
        assert!((rr.intervals[1] - 900.0).abs() < 1e-9);
        assert_eq!(rr.beat_times, vec![0.8, 1.7]);
    }

    #[test]
    fn build_rr_rejects_repeated_time() {
        assert!(matches!(build_rr(&[0.0, 1.0, 1.0]), Err(Error::Data(_))));
    }

    #[test]
    fn build_rr_at_one_hertz() {
        let t: Vec<f64> = (0..117).map(|i| i as f64).collect();
        let rr = build_rr(&t).unwrap();
        assert_eq!(rr.len(), 116);
        assert!(rr.intervals.iter().all(|v| (*v - 1000.0).abs() < 1e-9));
    }

    #[test]
    fn resample_constant_and_linear() {
        let rr = RrSeries { intervals: vec![1000.0; 10], beat_times: (1..=10).map(|i| i as f64).collect() };
        let u = resample_rr(&rr, 4.0).unwrap();
        assert!(u.values.iter().all(|v| (*v - 1000.0).abs() < 1e-12));
        assert_eq!(u.values.len(), 37);

        let two = RrSeries { intervals: vec![800.0, 900.0], beat_times: vec![1.0, 1.9] };
        let u = resample_rr(&two, 4.0).unwrap();
        for (i, v) in u.values.iter().enumerate() {
            let t = u.time(i);
            let lin = 800.0 + (t - 1.0) / 0.9 * 100.0;
            assert!((v - lin).abs() < 1e-9);
        }
    }

    #[test]
    fn resample_rejects_short_span() {
        let rr = RrSeries { intervals: vec![800.0, 900.0], beat_times: vec![1.0, 1.2] };
        assert!(resample_rr(&rr, 4.0).is_err());
    }

    #[test]
    fn ectopic_filter_drops_outlier() {
        let t = [0.0, 1.0, 2.0, 2.3, 3.0, 4.0];
        let kept = drop_ectopic(&t, 0.2);
        assert_eq!(kept, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }
}
