//! Terminating random experiments selector with dependency-aware
//! nearest-neighbour penalization.
//!
//! Each random experiment appends `L` standard-normal dummy columns to the
//! design, follows a least-angle path and stops as soon as `T` dummies have
//! entered. Real variables that keep entering before the `T`-th dummy across
//! the `K` experiments are selected, with `(v, T, L)` calibrated so that an
//! estimate of the false discovery proportion stays below the target.

mod lars;
mod occurrence;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::{correlation_matrix, Matrix};

pub use lars::{lars_path, PathRecord};
pub use occurrence::{
    da_nn_factors, da_nn_penalize, deflated_fdp, deflated_occurrences, estimate_fdp, relative_occurrences,
    OccurrenceTable, RelativeOccurrences,
};

/// Which occurrence vector the threshold is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Plain,
    DaNn,
}

/// False discovery proportion estimator used during calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdpEstimator {
    /// Selected variables weighted by one minus their deflated occurrence.
    Deflated,
    /// `(p / L)` times the number of dummies above the threshold.
    DummyPlugin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrexParams {
    pub k: usize,
    pub seed: u64,
    pub variant: Variant,
    pub estimator: FdpEstimator,
    pub rho_grid: Vec<f64>,
    /// Largest dummy budget as a multiple of `p` (doubling from 1).
    pub max_l_factor: usize,
    pub alpha_grid: Vec<f64>,
}

impl Default for TrexParams {
    fn default() -> Self {
        TrexParams {
            k: 100,
            seed: 0,
            variant: Variant::DaNn,
            estimator: FdpEstimator::Deflated,
            rho_grid: vec![0.5, 0.7, 0.9],
            max_l_factor: 8,
            alpha_grid: vec![0.05, 0.10, 0.15, 0.20, 0.25],
        }
    }
}

/// One random experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomExperimentResult {
    pub k: usize,
    /// Column indices in entry order; indices `>= p` are dummies.
    pub order: Vec<usize>,
    /// Number of entries up to and including the last recorded dummy.
    pub termination: usize,
    /// The path ended before the dummy budget was spent.
    pub exhausted: bool,
}

/// Calibrated selection at one target level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub selected: Vec<usize>,
    pub v: f64,
    pub t: usize,
    pub l: usize,
    pub rho: Option<f64>,
    pub fdp_hat: f64,
    pub selected_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub alpha: f64,
    pub k: usize,
    pub seed: u64,
    pub variant: Variant,
    pub estimator: FdpEstimator,
    pub selected: Vec<usize>,
    /// Relative occurrences at the calibrated `(T, L)`.
    pub phi: Vec<f64>,
    /// Penalized occurrences the threshold was applied to.
    pub phi_penalized: Vec<f64>,
    pub v: f64,
    pub t: usize,
    pub l: usize,
    pub rho: Option<f64>,
    pub fdp_hat: f64,
    pub sweep: Vec<Calibration>,
}

/// Standard-normal `n × l` dummy block for experiment `k`, columns centred
/// and scaled to unit sample variance. Column `j` depends only on
/// `(seed, k, j)`, so smaller budgets are prefixes of larger ones.
pub fn generate_dummies(n: usize, l: usize, seed: u64, k: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let mut data = Vec::with_capacity(n * l);
    for _ in 0..l {
        let start = data.len();
        for _ in 0..n {
            data.push(rng.sample::<f64, _>(StandardNormal));
        }
        standardize(&mut data[start..]);
    }
    Matrix::from_col_major(n, l, data)
}

fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter_mut().for_each(|v| *v -= m);
    let ss = x.iter().map(|v| v * v).sum::<f64>();
    if ss > 0.0 && n > 1.0 {
        let s = sqrt(ss / (n - 1.0));
        x.iter_mut().for_each(|v| *v /= s);
    }
}

/// Runs one experiment: the design augmented by `dummies`, stopped at the
/// `stop_t`-th dummy.
pub fn forward_path(
    x: &Matrix,
    dummies: &Matrix,
    y: &[f64],
    stop_t: usize,
    k: usize,
) -> Result<RandomExperimentResult> {
    let n = x.nrows();
    if dummies.nrows() != n || y.len() != n {
        return Err(Error::Data("design, dummies and response differ in length".into()));
    }
    if stop_t == 0 || stop_t > dummies.ncols() {
        return Err(Error::Config("dummy budget must lie in 1..=L".into()));
    }
    let mut data = Vec::with_capacity(n * (x.ncols() + dummies.ncols()));
    data.extend_from_slice(x.as_slice());
    data.extend_from_slice(dummies.as_slice());
    let aug = Matrix::from_col_major(n, x.ncols() + dummies.ncols(), data);
    let path = lars_path(&aug, y, x.ncols(), stop_t)?;
    Ok(RandomExperimentResult { k, termination: path.order.len(), order: path.order, exhausted: path.exhausted })
}

struct Experiments {
    l: usize,
    budget: usize,
    results: Vec<RandomExperimentResult>,
}

/// Calibration state: the standardized problem plus cached experiments for
/// every dummy budget visited so far.
pub struct Selector<'a, E: Executor> {
    x: Matrix,
    y: Vec<f64>,
    corr: Option<Vec<f64>>,
    params: TrexParams,
    exec: &'a E,
    cache: BTreeMap<usize, Experiments>,
}

#[derive(Clone)]
struct Candidate {
    selected: Vec<usize>,
    v: f64,
    t: usize,
    l: usize,
    rho: Option<f64>,
    fdp_hat: f64,
}

impl<'a, E: Executor> Selector<'a, E> {
    pub fn new(x: &Matrix, y: &[f64], params: TrexParams, exec: &'a E) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        if y.len() != n {
            return Err(Error::Data("response length differs from design rows".into()));
        }
        if p == 0 || n < 3 {
            return Err(Error::InsufficientData { what: "selection design", needed: 3, got: n });
        }
        if params.k == 0 || params.max_l_factor == 0 {
            return Err(Error::Config("K and the dummy budget factor must be positive".into()));
        }
        if params.rho_grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::Config("neighbour thresholds must lie in (0, 1]".into()));
        }
        if x.as_slice().iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value in design or response".into()));
        }
        let mut y = y.to_vec();
        if y.iter().all(|v| *v == y[0]) {
            return Err(Error::DegenerateSignal("constant response: no path to follow"));
        }
        standardize(&mut y);
        let mut data = x.as_slice().to_vec();
        for j in 0..p {
            standardize(&mut data[j * n..(j + 1) * n]);
        }
        let x = Matrix::from_col_major(n, p, data);
        Ok(Selector { x, y, corr: None, params, exec, cache: BTreeMap::new() })
    }

    fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Makes sure every experiment at budget `l` has run to at least `t`
    /// dummies (or to the end of its path).
    fn ensure(&mut self, l: usize, t: usize) -> Result<()> {
        let (need, previous) = match self.cache.get(&l) {
            Some(e) if e.budget >= t => return Ok(()),
            Some(e) => ((2 * e.budget).max(t).min(l), Some(e)),
            None => (t.max(4).min(l), None),
        };
        let rerun: Vec<usize> = match previous {
            Some(e) => e.results.iter().filter(|r| !r.exhausted).map(|r| r.k).collect(),
            None => (0..self.params.k).collect(),
        };
        let x = &self.x;
        let y = &self.y;
        let seed = self.params.seed;
        let fresh = self.exec.map(rerun.len(), |i| {
            let k = rerun[i];
            let d = generate_dummies(x.nrows(), l, seed, k);
            forward_path(x, &d, y, need, k)
        });
        let entry = self.cache.entry(l).or_insert(Experiments { l, budget: 0, results: Vec::new() });
        if entry.results.is_empty() {
            entry.results = fresh.into_iter().collect::<Result<Vec<_>>>()?;
        } else {
            for r in fresh {
                let r = r?;
                let k = r.k;
                entry.results[k] = r;
            }
        }
        debug_assert_eq!(entry.l, l);
        entry.budget = need;
        Ok(())
    }

    fn table(&mut self, l: usize, t: usize) -> Result<OccurrenceTable> {
        self.ensure(l, t)?;
        let e = &self.cache[&l];
        Ok(OccurrenceTable::new(&e.results, self.p(), l, t))
    }

    fn factors(&self, phi: &[f64], rho: Option<f64>) -> Result<Vec<f64>> {
        match (rho, &self.corr) {
            (Some(r), Some(c)) => da_nn_factors(phi, c, r),
            _ => Ok(vec![1.0; phi.len()]),
        }
    }

    /// Best feasible threshold at `(T, L)` for one penalty setting.
    fn scan(
        &self,
        table: &OccurrenceTable,
        t: usize,
        alpha: f64,
        rho: Option<f64>,
    ) -> Result<(Option<Candidate>, Vec<f64>, Vec<f64>)> {
        let p = self.p();
        let phi = table.phi(t);
        let pi = self.factors(phi, rho)?;
        let pen: Vec<f64> = phi.iter().zip(&pi).map(|(a, b)| a * b).collect();
        let defl: Vec<f64> = deflated_occurrences(table, t).iter().zip(&pi).map(|(a, b)| a * b).collect();
        let k = self.params.k;
        let mut best: Option<Candidate> = None;
        for v in voting_grid(k) {
            let fdp = self.fdp(table, t, &pen, &defl, v);
            if fdp > alpha {
                continue;
            }
            let selected: Vec<usize> = (0..p).filter(|&j| pen[j] > v).collect();
            let c = Candidate { selected, v, t, l: table.l(), rho, fdp_hat: fdp };
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                best = Some(c);
            }
        }
        Ok((best, phi.to_vec(), pen))
    }

    fn fdp(&self, table: &OccurrenceTable, t: usize, pen: &[f64], defl: &[f64], v: f64) -> f64 {
        match self.params.estimator {
            FdpEstimator::Deflated => deflated_fdp(pen, defl, v),
            FdpEstimator::DummyPlugin => estimate_fdp(pen, table.phi_dummy(t), v, self.p(), table.l()),
        }
    }

    /// Calibrates `(v, T, L)` for one target level and penalty setting.
    fn calibrate_one(&mut self, alpha: f64, rho: Option<f64>) -> Result<Candidate> {
        let p = self.p();
        let mut l = p;
        let mut factor = 1;
        loop {
            let table = self.table(l, 1)?;
            let phi = table.phi(1);
            let pi = self.factors(phi, rho)?;
            let pen: Vec<f64> = phi.iter().zip(&pi).map(|(a, b)| a * b).collect();
            let defl: Vec<f64> = deflated_occurrences(&table, 1).iter().zip(&pi).map(|(a, b)| a * b).collect();
            if self.fdp(&table, 1, &pen, &defl, 0.75) <= alpha || factor * 2 > self.params.max_l_factor {
                break;
            }
            factor *= 2;
            l = factor * p;
        }
        let mut best: Option<Candidate> = None;
        let mut best_size: isize = -1;
        let mut stale = 0;
        for t in 1..=l {
            let table = self.table(l, t)?;
            let (cand, _, _) = self.scan(&table, t, alpha, rho)?;
            let size = cand.as_ref().map_or(-1, |c| c.selected.len() as isize);
            if let Some(c) = cand {
                if best.as_ref().is_none_or(|b| better(&c, b)) {
                    best = Some(c);
                }
            }
            if size > best_size {
                best_size = size;
                stale = 0;
            } else {
                stale += 1;
                if stale >= 2 {
                    break;
                }
            }
            if table.saturated(t) {
                break;
            }
        }
        Ok(best.unwrap_or(Candidate { selected: Vec::new(), v: 1.0, t: 1, l, rho, fdp_hat: 0.0 }))
    }

    /// Calibration at `alpha` for the configured variant.
    pub fn calibrate(&mut self, alpha: f64) -> Result<Calibration> {
        self.calibrate_variant(alpha, self.params.variant)
    }

    /// Calibration at `alpha`, including the neighbour-threshold sweep for
    /// the dependency-aware variant. Experiments are shared between variants.
    pub fn calibrate_variant(&mut self, alpha: f64, variant: Variant) -> Result<Calibration> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config("target FDR must lie in (0, 1)".into()));
        }
        let rhos: Vec<Option<f64>> = match variant {
            Variant::Plain => vec![None],
            Variant::DaNn => {
                if self.corr.is_none() {
                    self.corr = Some(correlation_matrix(&self.x));
                }
                self.params.rho_grid.iter().map(|r| Some(*r)).collect()
            }
        };
        let mut chosen: Option<Candidate> = None;
        for rho in rhos {
            let c = self.calibrate_one(alpha, rho)?;
            if chosen.as_ref().is_none_or(|b| more_conservative(&c, b)) {
                chosen = Some(c);
            }
        }
        let c = chosen.expect("at least one penalty setting");
        Ok(Calibration {
            alpha,
            selected_pct: 100.0 * c.selected.len() as f64 / self.p() as f64,
            selected: c.selected,
            v: c.v,
            t: c.t,
            l: c.l,
            rho: c.rho,
            fdp_hat: c.fdp_hat,
        })
    }

    /// Full selection at `alpha` plus the sweep over the configured grid.
    pub fn select(&mut self, alpha: f64) -> Result<SelectionResult> {
        let main = self.calibrate(alpha)?;
        let grid = self.params.alpha_grid.clone();
        let mut sweep = Vec::with_capacity(grid.len());
        for a in grid {
            if a == alpha {
                sweep.push(main.clone());
            } else {
                sweep.push(self.calibrate(a)?);
            }
        }
        let table = self.table(main.l, main.t)?;
        let phi = table.phi(main.t).to_vec();
        let pi = self.factors(&phi, main.rho)?;
        let pen = phi.iter().zip(&pi).map(|(a, b)| a * b).collect();
        Ok(SelectionResult {
            alpha,
            k: self.params.k,
            seed: self.params.seed,
            variant: self.params.variant,
            estimator: self.params.estimator,
            selected: main.selected,
            phi,
            phi_penalized: pen,
            v: main.v,
            t: main.t,
            l: main.l,
            rho: main.rho,
            fdp_hat: main.fdp_hat,
            sweep,
        })
    }
}

/// Voting thresholds `0.5, 0.5 + 1/K, ..., 1 - 1/K`.
pub fn voting_grid(k: usize) -> Vec<f64> {
    let lo = k.div_ceil(2);
    (lo..k).map(|i| i as f64 / k as f64).collect()
}

fn better(c: &Candidate, b: &Candidate) -> bool {
    if c.selected.len() != b.selected.len() {
        return c.selected.len() > b.selected.len();
    }
    if c.fdp_hat != b.fdp_hat {
        return c.fdp_hat < b.fdp_hat;
    }
    c.v > b.v && c.t == b.t
}

fn more_conservative(c: &Candidate, b: &Candidate) -> bool {
    if c.selected.len() != b.selected.len() {
        return c.selected.len() < b.selected.len();
    }
    c.fdp_hat < b.fdp_hat
}

/// Selection with default parameters apart from those given.
pub fn calibrate_and_select<E: Executor>(
    x: &Matrix,
    y: &[f64],
    alpha: f64,
    params: &TrexParams,
    exec: &E,
) -> Result<SelectionResult> {
    Selector::new(x, y, params.clone(), exec)?.select(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn voting_grid_spans_majority_to_one_minus_step() {
        let g = voting_grid(100);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.5);
        assert!((g[49] - 0.99).abs() < 1e-12);
        assert_eq!(voting_grid(5), vec![0.6, 0.8]);
    }

    #[test]
    fn dummies_are_reproducible_and_stream_separated() {
        let a = generate_dummies(30, 4, 7, 0);
        let b = generate_dummies(30, 4, 7, 0);
        let c = generate_dummies(30, 4, 7, 1);
        assert_eq!(a, b);
        assert_ne!(a, c);
        for j in 0..4 {
            let m: f64 = a.col(j).iter().sum::<f64>() / 30.0;
            assert!(m.abs() < 1e-9);
        }
        let wide = generate_dummies(30, 8, 7, 0);
        assert_eq!(wide.col(3), a.col(3));
    }

    #[test]
    fn forward_path_halts_at_budget() {
        let x = generate_dummies(40, 6, 1, 99);
        let y: Vec<f64> = x.col(2).to_vec();
        let d = generate_dummies(40, 6, 1, 0);
        let r = forward_path(&x, &d, &y, 2, 0).unwrap();
        assert_eq!(r.order[0], 2);
        if !r.exhausted {
            assert_eq!(r.order.iter().filter(|&&j| j >= 6).count(), 2);
            assert!(*r.order.last().unwrap() >= 6);
        }
    }

    #[test]
    fn invalid_alpha_is_config_error() {
        let x = generate_dummies(20, 3, 0, 5);
        let y = x.col(0).to_vec();
        let mut s = Selector::new(&x, &y, TrexParams { k: 4, ..Default::default() }, &Sequential).unwrap();
        assert!(matches!(s.calibrate(1.5), Err(Error::Config(_))));
    }
}
