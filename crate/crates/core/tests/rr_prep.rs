use physiosel_core::rr::{build_rr, detect_r_peaks, resample_rr, DetectorConfig, RrSeries};
use physiosel_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Sum-of-Gaussians P-QRS-T complex: (offset s, amplitude mV, width s).
const WAVES: [(f64, f64, f64); 5] =
    [(-0.20, 0.15, 0.025), (-0.03, -0.10, 0.010), (0.00, 1.00, 0.008), (0.03, -0.25, 0.010), (0.25, 0.30, 0.040)];

fn synthetic_ecg(beats: &[f64], secs: f64, fs: f64, noise: f64, seed: u64) -> Vec<f64> {
    let n = (secs * fs) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            0.1 * (2.0 * std::f64::consts::PI * 0.25 * t).sin() + noise * rng.random_range(-1.0..1.0)
        })
        .collect();
    for &b in beats {
        let lo = ((b - 0.4) * fs).max(0.0) as usize;
        let hi = (((b + 0.5) * fs) as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(hi).skip(lo) {
            let t = i as f64 / fs - b;
            for (o, a, w) in WAVES {
                *v += a * (-0.5 * ((t - o) / w).powi(2)).exp();
            }
        }
    }
    x
}

fn beats_from_intervals(start: f64, rr_ms: impl Iterator<Item = f64>, end: f64) -> Vec<f64> {
    let mut t = start;
    let mut out = vec![t];
    for rr in rr_ms {
        t += rr / 1000.0;
        if t > end {
            break;
        }
        out.push(t);
    }
    out
}

#[test]
fn one_hertz_train_gives_116_peaks() {
    let fs = 1000.0;
    let beats: Vec<f64> = (0..116).map(|k| 0.5 + k as f64).collect();
    let ecg = synthetic_ecg(&beats, 116.0, fs, 0.01, 1);
    let found = detect_r_peaks(&ecg, fs, &DetectorConfig::default()).unwrap();
    assert_eq!(found.len(), 116);
    for w in found.windows(2) {
        assert!(((w[1] - w[0]) * 1000.0 - 1000.0).abs() <= 5.0);
    }
}

#[test]
fn flat_signal_is_a_quality_error() {
    let ecg = vec![0.0; 10_000];
    assert!(matches!(detect_r_peaks(&ecg, 1000.0, &DetectorConfig::default()), Err(Error::SignalQuality(_))));
}

#[test]
fn alternating_rhythm_is_recovered() {
    let fs = 1000.0;
    let beats = beats_from_intervals(0.6, (0..).map(|k| if k % 2 == 0 { 800.0 } else { 900.0 }), 59.4);
    let ecg = synthetic_ecg(&beats, 60.0, fs, 0.01, 2);
    let found = detect_r_peaks(&ecg, fs, &DetectorConfig::default()).unwrap();
    assert_eq!(found.len(), beats.len());
    let rr = build_rr(&found).unwrap();
    for (i, v) in rr.intervals.iter().enumerate() {
        let want = if i % 2 == 0 { 800.0 } else { 900.0 };
        assert!((v - want).abs() <= 5.0, "interval {i}: {v}");
    }
}

#[test]
fn detected_peaks_respect_the_refractory_period() {
    let fs = 500.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let beats = beats_from_intervals(0.5, (0..).map(|_| rng.random_range(550.0..1100.0)), 89.5);
    let ecg = synthetic_ecg(&beats, 90.0, fs, 0.03, 3);
    let found = detect_r_peaks(&ecg, fs, &DetectorConfig::default()).unwrap();
    for w in found.windows(2) {
        assert!(w[1] - w[0] >= 0.2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn round_trip_within_one_sample(seed in 0u64..1000) {
        let fs = 250.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = beats_from_intervals(0.7, (0..).map(|_| rng.random_range(600.0..1000.0)), 59.3);
        let ecg = synthetic_ecg(&truth, 60.0, fs, 0.01, seed);
        let found = detect_r_peaks(&ecg, fs, &DetectorConfig::default()).unwrap();
        prop_assert_eq!(found.len(), truth.len());
        let a = build_rr(&found).unwrap();
        let b = build_rr(&truth).unwrap();
        for (x, y) in a.intervals.iter().zip(&b.intervals) {
            prop_assert!((x - y).abs() <= 1000.0 / fs + 1e-9, "{} vs {}", x, y);
        }
    }
}

// Independent Fritsch-Carlson interpolant evaluated densely.
fn hermite_oracle(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|k| x[k + 1] - x[k]).collect();
    let s: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if s[k - 1] * s[k] > 0.0 {
            let (a, b) = (2.0 * h[k] + h[k - 1], h[k] + 2.0 * h[k - 1]);
            d[k] = (a + b) / (a / s[k - 1] + b / s[k]);
        }
    }
    let edge = |h0: f64, h1: f64, s0: f64, s1: f64| {
        let v = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if s0 == 0.0 || v * s0 <= 0.0 {
            0.0
        } else if s0 * s1 < 0.0 && v.abs() > 3.0 * s0.abs() {
            3.0 * s0
        } else {
            v
        }
    };
    if n == 2 {
        d = vec![s[0], s[0]];
    } else {
        d[0] = edge(h[0], h[1], s[0], s[1]);
        d[n - 1] = edge(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }
    let k = (0..n - 1).rev().find(|&k| x[k] <= t).unwrap_or(0);
    let u = (t - x[k]) / h[k];
    let (u2, u3) = (u * u, u * u * u);
    (2.0 * u3 - 3.0 * u2 + 1.0) * y[k]
        + (u3 - 2.0 * u2 + u) * h[k] * d[k]
        + (-2.0 * u3 + 3.0 * u2) * y[k + 1]
        + (u3 - u2) * h[k] * d[k + 1]
}

fn series(intervals: Vec<f64>) -> RrSeries {
    let mut t = 0.0;
    let mut times = vec![0.0];
    for v in &intervals {
        t += v / 1000.0;
        times.push(t);
    }
    build_rr(&times).unwrap()
}

#[test]
fn alternating_series_stays_within_extremes_densely() {
    let rr = series((0..60).map(|k| if k % 2 == 0 { 800.0 } else { 900.0 }).collect());
    let u = resample_rr(&rr, 4.0).unwrap();
    // intervals are differences of cumulative times, so allow roundoff
    let (lo, hi) = (800.0 - 1e-6, 900.0 + 1e-6);
    for (i, v) in u.values.iter().enumerate() {
        let o = hermite_oracle(&rr.beat_times, &rr.intervals, u.time(i));
        assert!((v - o).abs() < 1e-9);
        assert!((lo..=hi).contains(v));
    }
    let (a, b) = (rr.beat_times[0], *rr.beat_times.last().unwrap());
    for k in 0..=20_000 {
        let t = a + (b - a) * k as f64 / 20_000.0;
        let o = hermite_oracle(&rr.beat_times, &rr.intervals, t);
        assert!((lo..=hi).contains(&o));
    }
}

#[test]
fn resampling_examples() {
    let u = resample_rr(&series(vec![1000.0; 30]), 4.0).unwrap();
    assert!(u.values.iter().all(|v| (v - 1000.0).abs() < 1e-12));
    // two beats: Hermite reduces to a line between the knots
    let rr = RrSeries { intervals: vec![800.0, 1000.0], beat_times: vec![0.8, 1.8] };
    let u = resample_rr(&rr, 4.0).unwrap();
    assert_eq!(u.values.len(), 5);
    for (i, v) in u.values.iter().enumerate() {
        assert!((v - (800.0 + 200.0 * (u.time(i) - 0.8))).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn resampled_values_are_bounded_and_aligned(iv in prop::collection::vec(300.0f64..1500.0, 3..80)) {
        let rr = series(iv);
        let u = resample_rr(&rr, 4.0).unwrap();
        let lo = rr.intervals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rr.intervals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in &u.values {
            prop_assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
        }
        prop_assert!(u.time(u.values.len() - 1) <= rr.beat_times[rr.beat_times.len() - 1] + 1e-9);
    }
}
