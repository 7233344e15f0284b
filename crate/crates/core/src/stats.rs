//! Descriptive statistics shared by the extractors and the selectors.
//!
//! Conventions: `var`/`sd` use the `n - 1` denominator, higher moments are
//! the standardized population moments (normal kurtosis is 3), MAD is the
//! unscaled median absolute deviation.

use alloc::vec::Vec;
use libm::sqrt;

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance; zero for fewer than two values.
pub fn var(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub fn sd(x: &[f64]) -> f64 {
    sqrt(var(x))
}

/// Population standard deviation (`n` denominator).
pub fn sd_pop(x: &[f64]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let m = mean(x);
    sqrt(x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64)
}

pub fn median(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mut v: Vec<f64> = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median absolute deviation around the median, without the normal-consistency factor.
pub fn mad(x: &[f64]) -> f64 {
    let m = median(x);
    let dev: Vec<f64> = x.iter().map(|v| (v - m).abs()).collect();
    median(&dev)
}

/// Standardized third central moment.
pub fn skewness(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    let m3 = x.iter().map(|v| (v - m) * (v - m) * (v - m)).sum::<f64>() / n;
    m3 / (m2 * sqrt(m2))
}

/// Standardized fourth central moment (a normal sample gives about 3).
pub fn kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    let m4 = x.iter().map(|v| {
        let d = (v - m) * (v - m);
        d * d
    });
    m4.sum::<f64>() / n / (m2 * m2)
}

/// Pearson correlation; `None` if either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some(sab / sqrt(saa * sbb))
}

/// Ordinary least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Z-scores `x` in place with the sample standard deviation. Returns
/// `false` (and leaves the data centred) when the standard deviation is zero.
pub fn zscore_in_place(x: &mut [f64]) -> bool {
    let m = mean(x);
    let s = sd(x);
    for v in x.iter_mut() {
        *v -= m;
    }
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    for v in x.iter_mut() {
        *v /= s;
    }
    true
}

/// Trapezoidal integral of equally spaced samples.
pub fn trapezoid(y: &[f64], dx: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let inner: f64 = y[1..y.len() - 1].iter().sum();
    dx * (inner + 0.5 * (y[0] + y[y.len() - 1]))
}

/// Shannon entropy (natural log) of a vector of nonnegative counts.
pub fn shannon_entropy_counts(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0.0 {
            let p = c / total;
            h -= p * libm::log(p);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_simple_vectors() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&x), 2.5);
        assert!((var(&x) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&x), 2.5);
        assert_eq!(mad(&[1.0, 1.0, 2.0, 2.0, 4.0, 6.0, 9.0]), 1.0);
        assert!(skewness(&x).abs() < 1e-15);
        // population kurtosis of 1..4: m4 / m2^2 = 2.5625 / 1.5625
        assert!((kurtosis(&x) - 1.64).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_spread() {
        let x = [7.0; 9];
        assert_eq!(sd(&x), 0.0);
        assert_eq!(mad(&x), 0.0);
        assert_eq!(skewness(&x), 0.0);
        assert!(pearson(&x, &x).is_none());
    }

    #[test]
    fn trapezoid_of_constant() {
        assert_eq!(trapezoid(&[3.0; 10], 1.0), 27.0);
    }

    #[test]
    fn entropy_of_uniform_two_bins() {
        let h = shannon_entropy_counts(&[5.0, 0.0, 5.0]);
        assert!((h - core::f64::consts::LN_2).abs() < 1e-15);
    }
}
