//! One-sided power spectral density estimates.
//!
//! Densities are normalized so that integrating the PSD over frequency gives
//! the signal power. Band powers use the trapezoidal rule over the grid
//! points that fall inside the band, which keeps periodogram and Welch band
//! powers comparable.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::cos;

use crate::fft::Fft;
use crate::stats::mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Periodogram,
    Welch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub freqs: Vec<f64>,
    pub psd: Vec<f64>,
    pub method: SpectralMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    /// Periodic Hann window.
    Hann,
}

impl Window {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n).map(|i| 0.5 - 0.5 * cos(2.0 * PI * i as f64 / n as f64)).collect(),
        }
    }
}

/// Single-segment periodogram with mean removal.
pub fn periodogram(x: &[f64], fs: f64, window: Window) -> SpectralEstimate {
    let n = x.len();
    let w = window.coefficients(n);
    let fft = Fft::new(n);
    let psd = segment_psd(x, &w, &fft, fs);
    SpectralEstimate { freqs: one_sided_freqs(n, fs), psd, method: SpectralMethod::Periodogram }
}

/// Welch estimate with Hann segments of `seg_len` samples and fractional
/// `overlap`. Falls back to a single periodogram (flagged by the second
/// return value) when the signal is shorter than one segment.
pub fn welch(x: &[f64], fs: f64, seg_len: usize, overlap: f64) -> (SpectralEstimate, bool) {
    let n = x.len();
    if seg_len == 0 || n < seg_len {
        return (periodogram(x, fs, Window::Hann), true);
    }
    let step = libm::round(seg_len as f64 * (1.0 - overlap)).max(1.0) as usize;
    let w = Window::Hann.coefficients(seg_len);
    let fft = Fft::new(seg_len);
    let mut acc = vec![0.0; seg_len / 2 + 1];
    let mut count = 0usize;
    let mut start = 0;
    while start + seg_len <= n {
        let p = segment_psd(&x[start..start + seg_len], &w, &fft, fs);
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
        count += 1;
        start += step;
    }
    for a in acc.iter_mut() {
        *a /= count as f64;
    }
    (SpectralEstimate { freqs: one_sided_freqs(seg_len, fs), psd: acc, method: SpectralMethod::Welch }, false)
}

fn one_sided_freqs(n: usize, fs: f64) -> Vec<f64> {
    (0..n / 2 + 1).map(|k| k as f64 * fs / n as f64).collect()
}

fn segment_psd(seg: &[f64], w: &[f64], fft: &Fft, fs: f64) -> Vec<f64> {
    let n = seg.len();
    let m = mean(seg);
    let windowed: Vec<f64> = seg.iter().zip(w).map(|(v, c)| (v - m) * c).collect();
    let spec = fft.forward_real(&windowed);
    let s2: f64 = w.iter().map(|c| c * c).sum();
    let scale = 1.0 / (fs * s2);
    let nf = n / 2 + 1;
    let mut psd: Vec<f64> = spec[..nf].iter().map(|c| c.norm_sqr() * scale).collect();
    let last = if n.is_multiple_of(2) { nf - 1 } else { nf };
    for v in psd.iter_mut().take(last).skip(1) {
        *v *= 2.0;
    }
    psd
}

impl SpectralEstimate {
    pub fn resolution(&self) -> f64 {
        if self.freqs.len() > 1 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }

    /// Trapezoidal power between `lo` and `hi` (inclusive grid points).
    /// A band containing a single grid point contributes `psd · Δf`.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let idx: Vec<usize> = (0..self.freqs.len()).filter(|&k| self.freqs[k] >= lo && self.freqs[k] <= hi).collect();
        match idx.len() {
            0 => 0.0,
            1 => self.psd[idx[0]] * self.resolution(),
            _ => {
                let mut p = 0.0;
                for w in idx.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    p += 0.5 * (self.psd[a] + self.psd[b]) * (self.freqs[b] - self.freqs[a]);
                }
                p
            }
        }
    }

    /// Frequency of the PSD maximum inside `[lo, hi]`, or `None` for an empty band.
    pub fn peak_frequency(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for (f, p) in self.freqs.iter().zip(&self.psd) {
            if *f >= lo && *f <= hi && best.is_none_or(|(_, bp)| *p > bp) {
                best = Some((*f, *p));
            }
        }
        best.map(|(f, _)| f)
    }

    /// Total power over the whole grid.
    pub fn total_power(&self) -> f64 {
        self.band_power(0.0, f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::sin;

    #[test]
    fn periodogram_of_sinusoid_integrates_to_its_power() {
        let fs = 4.0;
        let x: Vec<f64> = (0..480).map(|i| 2.0 * sin(2.0 * PI * 0.25 * i as f64 / fs)).collect();
        let p = periodogram(&x, fs, Window::Rectangular);
        // amplitude 2 sinusoid has power 2
        assert!((p.total_power() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn welch_falls_back_for_short_signals() {
        let x = [1.0, 2.0, 1.0, 0.0];
        let (_, fell_back) = welch(&x, 4.0, 120, 0.75);
        assert!(fell_back);
    }
}
