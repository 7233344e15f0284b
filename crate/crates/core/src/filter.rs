//! Digital filters: zero-phase biquad cascades and decimating FIR low-pass.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{cos, sin, sqrt, tan};

/// Second-order IIR section, `a0` normalized to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Second-order Butterworth low-pass via the bilinear transform.
    pub fn butter_lowpass(cutoff: f64, fs: f64) -> Self {
        let k = tan(PI * cutoff / fs);
        let q = core::f64::consts::FRAC_1_SQRT_2;
        let norm = 1.0 / (1.0 + k / q + k * k);
        let b0 = k * k * norm;
        Biquad { b: [b0, 2.0 * b0, b0], a: [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm] }
    }

    /// Second-order Butterworth high-pass via the bilinear transform.
    pub fn butter_highpass(cutoff: f64, fs: f64) -> Self {
        let k = tan(PI * cutoff / fs);
        let q = core::f64::consts::FRAC_1_SQRT_2;
        let norm = 1.0 / (1.0 + k / q + k * k);
        Biquad { b: [norm, -2.0 * norm, norm], a: [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm] }
    }

    /// Magnitude response at `f` Hz.
    pub fn gain(&self, f: f64, fs: f64) -> f64 {
        let w = 2.0 * PI * f / fs;
        let (c1, s1, c2, s2) = (cos(w), sin(w), cos(2.0 * w), sin(2.0 * w));
        let nr = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let ni = -(self.b[1] * s1 + self.b[2] * s2);
        let dr = 1.0 + self.a[0] * c1 + self.a[1] * c2;
        let di = -(self.a[0] * s1 + self.a[1] * s2);
        sqrt((nr * nr + ni * ni) / (dr * dr + di * di))
    }

    fn run(&self, x: &mut [f64]) {
        // transposed direct form II
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let input = *v;
            let out = self.b[0] * input + z1;
            z1 = self.b[1] * input - self.a[0] * out + z2;
            z2 = self.b[2] * input - self.a[1] * out;
            *v = out;
        }
    }
}

/// Forward-backward application of a biquad cascade with odd-reflection
/// padding at both ends. The result has zero phase distortion.
pub fn filtfilt(sections: &[Biquad], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return x.to_vec();
    }
    let pad = (n - 1).min(300);
    let mut buf = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        buf.push(2.0 * x[0] - x[i]);
    }
    buf.extend_from_slice(x);
    for i in 1..=pad {
        buf.push(2.0 * x[n - 1] - x[n - 1 - i]);
    }
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    buf[pad..pad + n].to_vec()
}

/// Blackman-windowed sinc low-pass FIR with `taps` coefficients (odd) and
/// cutoff given as a fraction of the sampling rate. Unit DC gain.
pub fn fir_lowpass(taps: usize, cutoff: f64) -> Vec<f64> {
    assert!(taps % 2 == 1, "linear-phase FIR needs an odd tap count");
    let m = (taps - 1) as f64;
    let mid = (taps / 2) as isize;
    let mut h: Vec<f64> = (0..taps)
        .map(|i| {
            let k = i as isize - mid;
            let sinc = if k == 0 { 2.0 * cutoff } else { sin(2.0 * PI * cutoff * k as f64) / (PI * k as f64) };
            let w = 0.42 - 0.5 * cos(2.0 * PI * i as f64 / m) + 0.08 * cos(4.0 * PI * i as f64 / m);
            sinc * w
        })
        .collect();
    let s: f64 = h.iter().sum();
    for v in h.iter_mut() {
        *v /= s;
    }
    h
}

/// Zero-phase filtering with a symmetric FIR (group delay removed), evaluated
/// only at every `factor`-th output sample. Edges use even reflection.
pub fn fir_decimate(x: &[f64], h: &[f64], factor: usize) -> Vec<f64> {
    let n = x.len();
    let half = (h.len() / 2) as isize;
    let at = |i: isize| -> f64 {
        let n = n as isize;
        let mut j = i;
        // reflect (without repeating the edge sample) until in range
        loop {
            if j < 0 {
                j = -j;
            } else if j >= n {
                j = 2 * (n - 1) - j;
            } else {
                break;
            }
            if n == 1 {
                return x[0];
            }
        }
        x[j as usize]
    };
    let out_len = n / factor;
    let mut out = vec![0.0; out_len];
    for (m, o) in out.iter_mut().enumerate() {
        let c = (m * factor) as isize;
        let mut acc = 0.0;
        for (k, hk) in h.iter().enumerate() {
            acc += hk * at(c + half - k as isize);
        }
        *o = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn butterworth_gain_at_cutoff_is_minus_3db() {
        let lp = Biquad::butter_lowpass(15.0, 1000.0);
        assert!((lp.gain(15.0, 1000.0) - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((lp.gain(0.0, 1000.0) - 1.0).abs() < 1e-12);
        let hp = Biquad::butter_highpass(5.0, 1000.0);
        assert!(hp.gain(0.0, 1000.0) < 1e-12);
    }

    #[test]
    fn filtfilt_preserves_constant_through_lowpass() {
        let x = vec![3.0; 500];
        let y = filtfilt(&[Biquad::butter_lowpass(10.0, 100.0)], &x);
        assert!(y.iter().all(|v| (v - 3.0).abs() < 1e-9));
    }

    #[test]
    fn fir_has_unit_dc_gain_and_decimates() {
        let h = fir_lowpass(121, 0.1);
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let y = fir_decimate(&[2.0; 100], &h, 4);
        assert_eq!(y.len(), 25);
        assert!(y.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }
}
