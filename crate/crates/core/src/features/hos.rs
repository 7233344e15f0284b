//! Bispectral descriptors of the resampled RR series.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::log;

use super::FeatureParams;
use crate::error::{Error, Result};
use crate::fft::{Complex, Fft};
use crate::rr::UniformSeries;
use crate::spectral::Window;
use crate::stats::{mean, sd, shannon_entropy_counts};

/// Direct (segment-averaged) bispectrum on the non-redundant triangle
/// `1 ≤ k2 ≤ k1 ≤ kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bispectrum {
    pub kmax: usize,
    /// Bin spacing (Hz).
    pub df: f64,
    /// Values in row order `(k1, k2)`, `k2 = 1..=k1`.
    pub values: Vec<Complex>,
}

impl Bispectrum {
    pub fn index(k1: usize, k2: usize) -> usize {
        k1 * (k1 - 1) / 2 + (k2 - 1)
    }

    pub fn at(&self, k1: usize, k2: usize) -> Complex {
        self.values[Self::index(k1, k2)]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.kmax).flat_map(|k1| (1..=k1).map(move |k2| (k1, k2)))
    }
}

/// Averages `X(k1) X(k2) X*(k1+k2)` over mean-detrended Hann segments.
pub fn bispectrum(x: &[f64], fs: f64, seg_len: usize, overlap: f64, fmax: f64) -> Result<Bispectrum> {
    if seg_len < 4 || x.len() < seg_len {
        return Err(Error::InsufficientData { what: "bispectrum (samples)", needed: seg_len.max(4), got: x.len() });
    }
    let df = fs / seg_len as f64;
    let kmax = (libm::floor(fmax / df + 1e-9) as usize).min((seg_len - 1) / 2);
    if kmax < 1 {
        return Err(Error::Config(alloc::format!("bispectrum band up to {fmax} Hz holds no bins at {df} Hz spacing")));
    }
    let step = (libm::round(seg_len as f64 * (1.0 - overlap)) as usize).max(1);
    let w = Window::Hann.coefficients(seg_len);
    let fft = Fft::new(seg_len);
    let npairs = kmax * (kmax + 1) / 2;
    let mut acc = vec![Complex::new(0.0, 0.0); npairs];
    let mut count = 0;
    let mut start = 0;
    while start + seg_len <= x.len() {
        let seg = &x[start..start + seg_len];
        let m = mean(seg);
        let xs: Vec<f64> = seg.iter().zip(&w).map(|(v, c)| (v - m) * c).collect();
        let spec = fft.forward_real(&xs);
        for k1 in 1..=kmax {
            for k2 in 1..=k1 {
                acc[Bispectrum::index(k1, k2)] =
                    acc[Bispectrum::index(k1, k2)] + spec[k1] * spec[k2] * spec[k1 + k2].conj();
            }
        }
        count += 1;
        start += step;
    }
    let inv = 1.0 / count as f64;
    Ok(Bispectrum { kmax, df, values: acc.into_iter().map(|c| c.scale(inv)).collect() })
}

fn normalized_entropy(w: &[f64]) -> f64 {
    if w.len() < 2 {
        return 0.0;
    }
    shannon_entropy_counts(w) / log(w.len() as f64)
}

/// Phase_Entr, Mean_Magn, Mean_P, std_P, N_Bis_Ent, N_Bis_Sq_Ent,
/// Sum_log_Amp, LL_RR, LH_RR, HH_RR.
pub fn bispectral_rr(u: &UniformSeries, p: &FeatureParams) -> Result<Vec<f64>> {
    let seg = libm::round(p.welch_segment * u.fs) as usize;
    let b = bispectrum(&u.values, u.fs, seg, p.welch_overlap, p.bispectrum_fmax)?;
    bispectral_descriptors(&b, p)
}

pub fn bispectral_descriptors(b: &Bispectrum, p: &FeatureParams) -> Result<Vec<f64>> {
    let mag: Vec<f64> = b.values.iter().map(|c| c.abs()).collect();
    if !mag.iter().any(|m| *m > 0.0) {
        return Err(Error::DegenerateSignal("bispectrum is identically zero"));
    }
    let pow: Vec<f64> = mag.iter().map(|m| m * m).collect();
    let nb = p.phase_bins.max(1);
    let mut phase_hist = vec![0.0; nb];
    for c in &b.values {
        if c.abs() > 0.0 {
            // (−π, π] mapped onto [0, nb)
            let t = (c.arg() + PI) / (2.0 * PI);
            let k = ((libm::ceil(t * nb as f64) as isize - 1).max(0) as usize).min(nb - 1);
            phase_hist[k] += 1.0;
        }
    }
    let band_mean = |lo1: [f64; 2], lo2: [f64; 2]| -> f64 {
        let mut s = 0.0;
        let mut n = 0usize;
        for (k1, k2) in b.pairs() {
            let (f1, f2) = (k1 as f64 * b.df, k2 as f64 * b.df);
            if f1 >= lo1[0] && f1 < lo1[1] && f2 >= lo2[0] && f2 < lo2[1] {
                s += b.at(k1, k2).abs();
                n += 1;
            }
        }
        if n == 0 {
            f64::NAN
        } else {
            s / n as f64
        }
    };
    let hf_closed = [p.hf_band[0], p.hf_band[1] + 1e-9];
    let sum_log: f64 = mag.iter().map(|m| log(m.max(f64::MIN_POSITIVE))).sum();
    Ok(vec![
        shannon_entropy_counts(&phase_hist),
        mean(&mag),
        mean(&pow),
        sd(&pow),
        normalized_entropy(&mag),
        normalized_entropy(&pow),
        sum_log,
        band_mean(p.lf_band, p.lf_band),
        band_mean(hf_closed, p.lf_band),
        band_mean(hf_closed, hf_closed),
    ])
}
