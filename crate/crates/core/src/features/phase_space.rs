//! Phase-space reconstructions: recurrence quantification and the entropy
//! family (sample, fuzzy, distribution, and the multiscale EDA variant).

use alloc::vec;
use alloc::vec::Vec;
use libm::{exp, log, pow, sqrt};

use super::{ComEdaParams, RqaParams};
use crate::error::{Error, Result, Warning};
use crate::stats::{median, sd, shannon_entropy_counts};

/// Delay embedding stored row-major (`points × m`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceEmbedding {
    pub m: usize,
    pub tau: usize,
    pub points: Vec<f64>,
}

impl PhaseSpaceEmbedding {
    pub fn new(x: &[f64], m: usize, tau: usize) -> Result<Self> {
        if m == 0 || tau == 0 {
            return Err(Error::Config(alloc::format!("embedding needs m, tau >= 1 (got {m}, {tau})")));
        }
        let span = (m - 1) * tau;
        if x.len() <= span {
            return Err(Error::InsufficientData {
                what: "phase-space embedding (samples)",
                needed: span + 1,
                got: x.len(),
            });
        }
        let n = x.len() - span;
        let mut points = Vec::with_capacity(n * m);
        for i in 0..n {
            for k in 0..m {
                points.push(x[i + k * tau]);
            }
        }
        Ok(PhaseSpaceEmbedding { m, tau, points })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.m..(i + 1) * self.m]
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum())
}

fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (u, v)| acc.max((u - v).abs()))
}

/// Binary recurrence matrix (row-major, symmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrencePlot {
    pub n: usize,
    pub cells: Vec<bool>,
    pub epsilon: f64,
    pub theiler: usize,
}

impl RecurrencePlot {
    /// Euclidean recurrences `d ≤ ε` with ε a fraction of the largest distance.
    pub fn new(emb: &PhaseSpaceEmbedding, eps_fraction: f64, theiler: usize) -> Self {
        let n = emb.len();
        let mut dist = vec![0.0; n * n];
        let mut dmax = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let d = euclidean(emb.point(i), emb.point(j));
                dist[i * n + j] = d;
                dist[j * n + i] = d;
                dmax = dmax.max(d);
            }
        }
        let epsilon = eps_fraction * dmax;
        let cells = dist.iter().map(|d| *d <= epsilon).collect();
        RecurrencePlot { n, cells, epsilon, theiler }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    fn admissible(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) >= self.theiler
    }
}

/// rec_rate, det, avg_diag, ratio, ent, lam, trap_time, max_len, mean_rec_time.
///
/// Diagonal statistics use the upper triangle (the plot is symmetric);
/// vertical statistics and recurrence times use every column. Cells inside
/// the Theiler window are excluded and break lines.
pub fn rqa_measures(rp: &RecurrencePlot, l_min: usize, v_min: usize) -> Option<[f64; 9]> {
    let n = rp.n;
    let w = rp.theiler.max(1);
    let mut upper_cells = 0usize;
    let mut upper_rec = 0usize;
    let mut diag_lengths: Vec<usize> = Vec::new();
    for k in w..n {
        let mut run = 0usize;
        for i in 0..n - k {
            upper_cells += 1;
            if rp.get(i, i + k) {
                upper_rec += 1;
                run += 1;
            } else if run > 0 {
                diag_lengths.push(run);
                run = 0;
            }
        }
        if run > 0 {
            diag_lengths.push(run);
        }
    }
    if upper_rec == 0 {
        return None;
    }
    let mut vert_lengths: Vec<usize> = Vec::new();
    let mut gaps: Vec<usize> = Vec::new();
    let mut full_rec = 0usize;
    for j in 0..n {
        let mut run = 0usize;
        let mut last: Option<usize> = None;
        for i in 0..n {
            let hit = rp.admissible(i, j) && rp.get(i, j);
            if hit {
                full_rec += 1;
                run += 1;
                if let Some(l) = last {
                    gaps.push(i - l);
                }
                last = Some(i);
            } else if run > 0 {
                vert_lengths.push(run);
                run = 0;
            }
        }
        if run > 0 {
            vert_lengths.push(run);
        }
    }
    let rec_rate = upper_rec as f64 / upper_cells as f64;
    let long_diag: Vec<usize> = diag_lengths.iter().copied().filter(|&l| l >= l_min).collect();
    let det = long_diag.iter().sum::<usize>() as f64 / upper_rec as f64;
    let avg_diag = mean_len(&long_diag);
    let max_len = diag_lengths.iter().copied().max().unwrap_or(0) as f64;
    let ent = {
        let longest = long_diag.iter().copied().max().unwrap_or(0);
        let mut hist = vec![0.0; longest + 1];
        for &l in &long_diag {
            hist[l] += 1.0;
        }
        shannon_entropy_counts(&hist)
    };
    let long_vert: Vec<usize> = vert_lengths.iter().copied().filter(|&l| l >= v_min).collect();
    let lam = long_vert.iter().sum::<usize>() as f64 / full_rec as f64;
    let trap_time = mean_len(&long_vert);
    let mean_rec_time = mean_len(&gaps);
    Some([rec_rate, det, avg_diag, det / rec_rate, ent, lam, trap_time, max_len, mean_rec_time])
}

fn mean_len(v: &[usize]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<usize>() as f64 / v.len() as f64
    }
}

pub fn rqa_rr(x: &[f64], p: &RqaParams, warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    let emb = PhaseSpaceEmbedding::new(x, p.m, p.tau)?;
    if emb.len() < 50 {
        return Err(Error::InsufficientData { what: "RQA (phase-space points)", needed: 50, got: emb.len() });
    }
    let rp = RecurrencePlot::new(&emb, p.eps_fraction, p.theiler);
    match rqa_measures(&rp, p.l_min, p.v_min) {
        Some(v) => Ok(v.to_vec()),
        None => {
            warnings.push(Warning::new("rqa_rr", "no recurrences; all measures set to 0"));
            Ok(vec![0.0; 9])
        }
    }
}

/// Matching template pairs `(B, A)` for lengths `m` and `m + 1`, both over
/// the first `n − m` templates, Chebyshev distance `≤ r`.
pub fn sample_entropy_counts(x: &[f64], m: usize, r: f64) -> (u64, u64) {
    let n = x.len();
    let nt = n - m;
    let (mut b, mut a) = (0u64, 0u64);
    for i in 0..nt {
        for j in i + 1..nt {
            let mut d = 0.0f64;
            for k in 0..m {
                d = d.max((x[i + k] - x[j + k]).abs());
                if d > r {
                    break;
                }
            }
            if d <= r {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    (b, a)
}

/// `−ln(A/B)`; `None` when either count is zero.
pub fn sample_entropy(x: &[f64], m: usize, r: f64) -> Option<f64> {
    let (b, a) = sample_entropy_counts(x, m, r);
    if a == 0 || b == 0 {
        None
    } else {
        Some(-log(a as f64 / b as f64))
    }
}

/// Fuzzy entropy with baseline-removed templates and membership
/// `exp(−dⁿ / r)`.
pub fn fuzzy_entropy(x: &[f64], m: usize, r: f64, gradient: f64) -> f64 {
    let phi = |len: usize| -> f64 {
        let nt = x.len() - m;
        let templates: Vec<Vec<f64>> = (0..nt)
            .map(|i| {
                let s = &x[i..i + len];
                let mu = s.iter().sum::<f64>() / len as f64;
                s.iter().map(|v| v - mu).collect()
            })
            .collect();
        let mut total = 0.0;
        for i in 0..nt {
            let mut row = 0.0;
            for j in 0..nt {
                if i == j {
                    continue;
                }
                let d = chebyshev(&templates[i], &templates[j]);
                row += if r > 0.0 {
                    exp(-pow(d, gradient) / r)
                } else if d == 0.0 {
                    1.0
                } else {
                    0.0
                };
            }
            total += row / (nt - 1) as f64;
        }
        total / nt as f64
    };
    let (pm, pm1) = (phi(m), phi(m + 1));
    if pm <= 0.0 || pm1 <= 0.0 {
        return 0.0;
    }
    log(pm) - log(pm1)
}

/// Normalized Shannon entropy of the histogram of all pairwise Chebyshev
/// distances between embedded vectors. Zero when all distances coincide.
pub fn distribution_entropy(emb: &PhaseSpaceEmbedding, bins: usize) -> f64 {
    let n = emb.len();
    if n < 2 || bins < 2 {
        return 0.0;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let d = chebyshev(emb.point(i), emb.point(j));
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if !(hi > lo) {
        return 0.0;
    }
    let mut hist = vec![0.0; bins];
    let scale = bins as f64 / (hi - lo);
    for i in 0..n {
        for j in i + 1..n {
            let d = chebyshev(emb.point(i), emb.point(j));
            let k = (((d - lo) * scale) as usize).min(bins - 1);
            hist[k] += 1.0;
        }
    }
    shannon_entropy_counts(&hist) / log(bins as f64)
}

/// SampEn, FuzzyEn and DistEn with `r` a fraction of the sample SD.
pub fn entropy_rr(
    x: &[f64],
    m: usize,
    r_fraction: f64,
    gradient: f64,
    bins: usize,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<f64>> {
    if x.len() < 100 {
        return Err(Error::InsufficientData { what: "entropy indices (intervals)", needed: 100, got: x.len() });
    }
    let r = r_fraction * sd(x);
    let samp = sample_entropy(x, m, r).unwrap_or_else(|| {
        warnings.push(Warning::new("entropy_rr", "no matching templates; SampEn set to its upper bound"));
        let nt = (x.len() - m) as f64;
        log(nt * (nt - 1.0) / 2.0)
    });
    let emb = PhaseSpaceEmbedding::new(x, m, 1)?;
    Ok(vec![samp, fuzzy_entropy(x, m, r, gradient), distribution_entropy(&emb, bins)])
}

/// Histogram estimate of the mutual information between `x_t` and `x_{t+lag}`.
pub fn auto_mutual_information(x: &[f64], lag: usize, bins: usize) -> f64 {
    let n = x.len() - lag;
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) || n == 0 {
        return 0.0;
    }
    let bin = |v: f64| (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    let mut joint = vec![0.0; bins * bins];
    let mut pa = vec![0.0; bins];
    let mut pb = vec![0.0; bins];
    for t in 0..n {
        let (a, b) = (bin(x[t]), bin(x[t + lag]));
        joint[a * bins + b] += 1.0;
        pa[a] += 1.0;
        pb[b] += 1.0;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            if c > 0.0 {
                mi += c / nf * log(c * nf / (pa[a] * pb[b]));
            }
        }
    }
    mi
}

/// First local minimum of the auto-mutual information over lags `1..=max_lag`,
/// or `max_lag` when there is none.
pub fn first_ami_minimum(x: &[f64], max_lag: usize, bins: usize) -> usize {
    let max_lag = max_lag.min(x.len().saturating_sub(2)).max(1);
    let ami: Vec<f64> = (0..=max_lag + 1)
        .map(|l| if l < x.len() { auto_mutual_information(x, l, bins) } else { f64::INFINITY })
        .collect();
    for l in 1..=max_lag {
        if ami[l] < ami[l - 1] && ami[l] <= ami[l + 1] {
            return l;
        }
    }
    max_lag
}

/// Non-overlapping averages of `scale` consecutive samples.
pub fn coarse_grain(x: &[f64], scale: usize) -> Vec<f64> {
    x.chunks_exact(scale).map(|c| c.iter().sum::<f64>() / scale as f64).collect()
}

fn comeda_at(x: &[f64], fs: f64, p: &ComEdaParams) -> Result<f64> {
    let max_lag = (libm::round(p.max_delay * fs) as usize).max(1);
    let tau = first_ami_minimum(x, max_lag, p.ami_bins);
    let emb = PhaseSpaceEmbedding::new(x, p.m, tau)?;
    Ok(distribution_entropy(&emb, p.bins))
}

/// ComEDA (scale 1) and MComEDA (median over scales 1..=scales).
pub fn comeda(scr: &[f64], fs: f64, p: &ComEdaParams, warnings: &mut Vec<Warning>) -> Result<Vec<f64>> {
    if (scr.len() as f64) < 60.0 * fs {
        return Err(Error::InsufficientData {
            what: "ComEDA (samples)",
            needed: libm::ceil(60.0 * fs) as usize,
            got: scr.len(),
        });
    }
    if !(sd(scr) > 0.0) {
        warnings.push(Warning::new("comeda", "constant SCR; ComEDA set to 0"));
        return Ok(vec![0.0, 0.0]);
    }
    let mut per_scale = Vec::with_capacity(p.scales);
    for s in 1..=p.scales.max(1) {
        let y = if s == 1 { scr.to_vec() } else { coarse_grain(scr, s) };
        per_scale.push(comeda_at(&y, fs / s as f64, p)?);
    }
    Ok(vec![per_scale[0], median(&per_scale)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_fully_recurrent() {
        let emb = PhaseSpaceEmbedding::new(&[1.0; 80], 10, 1).unwrap();
        let rp = RecurrencePlot::new(&emb, 0.15, 1);
        let m = rqa_measures(&rp, 2, 2).unwrap();
        assert_eq!(m[0], 1.0);
    }

    #[test]
    fn constant_series_has_zero_sample_entropy() {
        assert_eq!(sample_entropy(&[3.0; 120], 2, 0.0), Some(0.0));
    }

    #[test]
    fn distribution_entropy_is_normalized() {
        let x: Vec<f64> = (0..300).map(|i| libm::sin(i as f64 * 0.37) + libm::cos(i as f64 * 1.1)).collect();
        let emb = PhaseSpaceEmbedding::new(&x, 2, 1).unwrap();
        let d = distribution_entropy(&emb, 512);
        assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn constant_scr_comeda_is_zero() {
        let mut w = Vec::new();
        assert_eq!(comeda(&[0.5; 3000], 50.0, &ComEdaParams::default(), &mut w).unwrap(), vec![0.0, 0.0]);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn single_scale_multiscale_equals_comeda() {
        let x: Vec<f64> = (0..3000).map(|i| libm::sin(i as f64 * 0.05) + 0.3 * libm::sin(i as f64 * 0.31)).collect();
        let p = ComEdaParams { scales: 1, ..ComEdaParams::default() };
        let f = comeda(&x, 50.0, &p, &mut Vec::new()).unwrap();
        assert_eq!(f[0], f[1]);
        assert!((0.0..=1.0).contains(&f[0]));
    }
}
