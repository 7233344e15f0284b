//! Discrete Fourier transform of arbitrary length.
//!
//! Power-of-two sizes use an iterative radix-2 kernel; every other size goes
//! through Bluestein's chirp-z reduction onto a power-of-two convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};
use libm::{atan2, cos, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(self) -> f64 {
        sqrt(self.norm_sqr())
    }

    #[inline]
    pub fn arg(self) -> f64 {
        atan2(self.im, self.re)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Complex::new(self.re * s, self.im * s)
    }

    #[inline]
    fn cis(theta: f64) -> Self {
        Complex::new(cos(theta), sin(theta))
    }
}

impl Add for Complex {
    type Output = Complex;
    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// Precomputed forward DFT plan for a fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2 { twiddles: Vec<Complex> },
    Bluestein { m: usize, chirp: Vec<Complex>, kernel_fft: Vec<Complex>, inner: Vec<Complex> },
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        if n.is_power_of_two() {
            return Fft { n, kind: Kind::Radix2 { twiddles: radix2_twiddles(n) } };
        }
        let m = (2 * n - 1).next_power_of_two();
        // chirp[k] = exp(-i pi k^2 / n); k^2 is reduced mod 2n to keep the angle small.
        let chirp: Vec<Complex> = (0..n)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
                Complex::cis(-PI * k2 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex::ZERO; m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        let inner = radix2_twiddles(m);
        radix2(&mut kernel, &inner);
        Fft { n, kind: Kind::Bluestein { m, chirp, kernel_fft: kernel, inner } }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place forward transform, `X[k] = Σ x[t] e^{-2πi k t / n}`.
    pub fn forward(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.n);
        match &self.kind {
            Kind::Radix2 { twiddles } => radix2(buf, twiddles),
            Kind::Bluestein { m, chirp, kernel_fft, inner } => {
                let mut a = vec![Complex::ZERO; *m];
                for k in 0..self.n {
                    a[k] = buf[k] * chirp[k];
                }
                radix2(&mut a, inner);
                for (v, k) in a.iter_mut().zip(kernel_fft) {
                    *v = *v * *k;
                }
                // inverse via conjugation
                for v in a.iter_mut() {
                    *v = v.conj();
                }
                radix2(&mut a, inner);
                let s = 1.0 / *m as f64;
                for k in 0..self.n {
                    buf[k] = a[k].conj().scale(s) * chirp[k];
                }
            }
        }
    }

    /// Forward transform of a real sequence.
    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex> {
        let mut buf: Vec<Complex> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }
}

fn radix2_twiddles(n: usize) -> Vec<Complex> {
    (0..n / 2).map(|k| Complex::cis(-2.0 * PI * k as f64 / n as f64)).collect()
}

fn radix2(buf: &mut [Complex], twiddles: &[Complex]) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[f64]) -> Vec<Complex> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex::ZERO;
                for (t, &v) in x.iter().enumerate() {
                    let th = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                    acc = acc + Complex::cis(th).scale(v);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in [1usize, 2, 3, 5, 8, 12, 29, 64, 100, 120] {
            let x: Vec<f64> = (0..n).map(|i| libm::sin(0.37 * i as f64) + 0.1 * i as f64).collect();
            let fast = Fft::new(n).forward_real(&x);
            let slow = naive_dft(&x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((*a - *b).abs() < 1e-9 * (1.0 + b.abs()), "n = {n}");
            }
        }
    }
}
