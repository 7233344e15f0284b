//! Relative occurrences, deflation, neighbour penalization and FDP estimates.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::RandomExperimentResult;
use crate::error::{Error, Result};

/// Occurrences of real and dummy columns at one dummy budget `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeOccurrences {
    pub t: usize,
    pub k: usize,
    pub phi: Vec<f64>,
    pub phi_dummy: Vec<f64>,
}

/// Occurrences for every budget `1..=t_max` from one set of experiments.
#[derive(Debug, Clone)]
pub struct OccurrenceTable {
    p: usize,
    l: usize,
    phi: Vec<Vec<f64>>,
    phi_dummy: Vec<Vec<f64>>,
    /// Largest dummy count reached by any experiment, if all paths ended.
    exhausted_at: Option<usize>,
}

impl OccurrenceTable {
    pub fn new(results: &[RandomExperimentResult], p: usize, l: usize, t_max: usize) -> Self {
        let k = results.len().max(1) as f64;
        let mut real = vec![vec![0u32; p]; t_max + 1];
        let mut dummy = vec![vec![0u32; l]; t_max + 1];
        let mut all_exhausted = true;
        let mut max_dummies = 0;
        for r in results {
            let mut seen = 0usize;
            for &j in &r.order {
                if j >= p {
                    seen += 1;
                    if seen <= t_max {
                        dummy[seen][j - p] += 1;
                    }
                } else if seen < t_max {
                    real[seen + 1][j] += 1;
                }
            }
            all_exhausted &= r.exhausted;
            max_dummies = max_dummies.max(seen);
        }
        let cumulate = |rows: Vec<Vec<u32>>| {
            let mut out = Vec::with_capacity(t_max);
            let mut acc = vec![0u32; rows[0].len()];
            for row in rows.iter().skip(1) {
                for (a, c) in acc.iter_mut().zip(row) {
                    *a += c;
                }
                out.push(acc.iter().map(|&c| c as f64 / k).collect::<Vec<f64>>());
            }
            out
        };
        OccurrenceTable {
            p,
            l,
            phi: cumulate(real),
            phi_dummy: cumulate(dummy),
            exhausted_at: all_exhausted.then_some(max_dummies),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn t_max(&self) -> usize {
        self.phi.len()
    }

    /// `Φ_t` for real columns.
    pub fn phi(&self, t: usize) -> &[f64] {
        &self.phi[t - 1]
    }

    pub fn phi_dummy(&self, t: usize) -> &[f64] {
        &self.phi_dummy[t - 1]
    }

    /// True when no larger budget can change the occurrences.
    pub fn saturated(&self, t: usize) -> bool {
        self.exhausted_at.is_some_and(|m| m <= t)
    }
}

/// `Φ_T` from recorded experiments.
pub fn relative_occurrences(results: &[RandomExperimentResult], p: usize, l: usize, t: usize) -> RelativeOccurrences {
    let table = OccurrenceTable::new(results, p, l, t);
    RelativeOccurrences { t, k: results.len(), phi: table.phi(t).to_vec(), phi_dummy: table.phi_dummy(t).to_vec() }
}

/// Occurrences with the expected share of null entries removed step by step.
///
/// Between the `(t-1)`-th and `t`-th dummy, on average
/// `(p - ΣΦ_t) / (L - t + 1)` null variables enter per experiment; each
/// real variable's increment `ΔΦ_t(j)` is scaled by the fraction of that
/// step's entries not explained by nulls.
pub fn deflated_occurrences(table: &OccurrenceTable, t_max: usize) -> Vec<f64> {
    let p = table.p;
    let l = table.l as f64;
    let mut out = vec![0.0; p];
    let zero = vec![0.0; p];
    for t in 1..=t_max {
        let cur = table.phi(t);
        let prev: &[f64] = if t == 1 { &zero } else { table.phi(t - 1) };
        let total: f64 = cur.iter().sum();
        let delta: f64 = cur.iter().zip(prev).map(|(a, b)| a - b).sum();
        if delta <= 0.0 {
            continue;
        }
        let nulls = (p as f64 - total) / (l - t as f64 + 1.0);
        let scale = (1.0 - nulls / delta).clamp(0.0, 1.0);
        for ((o, a), b) in out.iter_mut().zip(cur).zip(prev) {
            *o += scale * (a - b);
        }
    }
    out
}

/// FDP estimate from deflated occurrences of the variables above `v`.
pub fn deflated_fdp(phi: &[f64], deflated: &[f64], v: f64) -> f64 {
    let mut r = 0usize;
    let mut vhat = 0.0;
    for (a, d) in phi.iter().zip(deflated) {
        if *a > v {
            r += 1;
            vhat += 1.0 - d.clamp(0.0, 1.0);
        }
    }
    if r == 0 {
        0.0
    } else {
        vhat / r as f64
    }
}

/// Dummy plug-in estimate `(p/L)·#{Φ_dummy > v} / max(1, #{Φ > v})`.
pub fn estimate_fdp(phi_real: &[f64], phi_dummy: &[f64], v: f64, p: usize, l: usize) -> f64 {
    let above_d = phi_dummy.iter().filter(|&&d| d > v).count() as f64;
    let above_r = phi_real.iter().filter(|&&r| r > v).count().max(1) as f64;
    (p as f64 / l as f64) * above_d / above_r
}

fn check_correlation(phi: &[f64], c: &[f64]) -> Result<usize> {
    let p = phi.len();
    if c.len() != p * p {
        return Err(Error::Contract("correlation matrix size does not match occurrences"));
    }
    for i in 0..p {
        for j in i + 1..p {
            if (c[i * p + j] - c[j * p + i]).abs() > 1e-12 {
                return Err(Error::Contract("correlation matrix is not symmetric"));
            }
        }
    }
    Ok(p)
}

/// Multiplicative penalties `1 - max_{|C_ij| ≥ ρ} |C_ij|·(1 - |Φ_j - Φ_i|)`.
pub fn da_nn_factors(phi: &[f64], c: &[f64], rho: f64) -> Result<Vec<f64>> {
    let p = check_correlation(phi, c)?;
    Ok((0..p)
        .map(|j| {
            let mut worst: f64 = 0.0;
            for i in 0..p {
                let cij = c[i * p + j].abs();
                if i != j && cij >= rho {
                    worst = worst.max(cij * (1.0 - (phi[j] - phi[i]).abs()));
                }
            }
            (1.0 - worst).clamp(0.0, 1.0)
        })
        .collect())
}

/// Dependency-aware occurrences `Φ'_j = Φ_j · penalty_j`.
pub fn da_nn_penalize(phi: &[f64], c: &[f64], rho: f64) -> Result<Vec<f64>> {
    let f = da_nn_factors(phi, c, rho)?;
    Ok(phi.iter().zip(f).map(|(a, b)| a * b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(order: &[usize], exhausted: bool) -> RandomExperimentResult {
        RandomExperimentResult { k: 0, order: order.to_vec(), termination: order.len(), exhausted }
    }

    #[test]
    fn occurrence_counts_entries_before_tth_dummy() {
        // p = 3, L = 2: dummies are 3 and 4
        let runs = [exp(&[0, 3, 1, 4], false), exp(&[1, 0, 4, 2, 3], false)];
        let r1 = relative_occurrences(&runs, 3, 2, 1);
        assert_eq!(r1.phi, vec![1.0, 0.5, 0.0]);
        assert_eq!(r1.phi_dummy, vec![0.5, 0.5]);
        let r2 = relative_occurrences(&runs, 3, 2, 2);
        assert_eq!(r2.phi, vec![1.0, 1.0, 0.5]);
        assert_eq!(r2.phi_dummy, vec![1.0, 1.0]);
    }

    #[test]
    fn plugin_examples() {
        let real = [0.9; 8];
        assert_eq!(estimate_fdp(&real, &[0.1, 0.2], 0.5, 8, 2), 0.0);
        assert_eq!(estimate_fdp(&[0.1, 0.2], &[0.9, 0.1], 0.5, 2, 2), 1.0);
        let dummies = [0.9, 0.8, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((estimate_fdp(&real, &dummies, 0.5, 8, 8) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn penalty_examples() {
        let id = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(da_nn_penalize(&[0.3, 0.8], &id, 0.5).unwrap(), vec![0.3, 0.8]);
        let dup = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(da_nn_penalize(&[0.7, 0.7], &dup, 0.5).unwrap(), vec![0.0, 0.0]);
        let c = [1.0, 0.9, 0.9, 1.0];
        let out = da_nn_penalize(&[0.6, 0.6], &c, 0.5).unwrap();
        assert!((out[0] - 0.06).abs() < 1e-12 && (out[1] - 0.06).abs() < 1e-12);
        let asym = [1.0, 0.9, 0.8, 1.0];
        assert!(matches!(da_nn_penalize(&[0.6, 0.6], &asym, 0.5), Err(Error::Contract(_))));
    }

    #[test]
    fn deflation_removes_expected_null_entries() {
        // one real always first, nothing else: ΣΦ_1 = 1, nulls = (p - 1)/L
        let runs = [exp(&[0, 4], false), exp(&[0, 5], false)];
        let table = OccurrenceTable::new(&runs, 4, 4, 1);
        let d = deflated_occurrences(&table, 1);
        assert!((d[0] - (1.0 - 3.0 / 4.0)).abs() < 1e-15);
        assert_eq!(&d[1..], &[0.0, 0.0, 0.0]);
        assert!((deflated_fdp(table.phi(1), &d, 0.5) - 0.75).abs() < 1e-15);
        assert_eq!(deflated_fdp(table.phi(1), &d, 1.0), 0.0);
    }
}
