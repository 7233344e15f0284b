//! Synthetic designs with known support and the empirical FDR benchmark.

use alloc::string::String;
use alloc::vec::Vec;
use libm::sqrt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::linalg::Matrix;
use crate::trex::{Selector, TrexParams, Variant};

/// Column dependence of the generated design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Correlation {
    Independent,
    /// `corr(x_j, x_{j+m}) = ρ^m`.
    Ar1 {
        rho: f64,
    },
    /// Consecutive blocks of `block` near-copies of one latent column. With
    /// `twins_of_support` false, true columns are drawn on their own so only
    /// null columns have near-copies.
    Duplicated {
        block: usize,
        #[serde(default)]
        twins_of_support: bool,
    },
}

impl Correlation {
    pub fn label(&self) -> String {
        match self {
            Correlation::Independent => "independent".into(),
            Correlation::Ar1 { rho } => alloc::format!("ar1-{rho}"),
            Correlation::Duplicated { block, twins_of_support: true } => alloc::format!("duplicated-{block}-twins"),
            Correlation::Duplicated { block, twins_of_support: false } => alloc::format!("duplicated-{block}"),
        }
    }
}

/// Noise added to each copy of a duplicated latent column.
pub const DUPLICATE_NOISE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub count: usize,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub p: usize,
    /// True columns and their coefficients.
    pub support: Vec<(usize, f64)>,
    pub correlation: Correlation,
    pub noise_sd: f64,
    pub groups: Option<GroupSpec>,
    pub seed: u64,
}

impl SynthSpec {
    /// `s` evenly spaced true columns with coefficient `effect` each, noise
    /// chosen so that `var(y) = 1` under independent unit-variance columns.
    /// With duplicated blocks the true columns are block leaders, so with
    /// `twins_of_support` each has correlated null twins.
    pub fn planted(n: usize, p: usize, s: usize, effect: f64, correlation: Correlation, seed: u64) -> Self {
        let block = match correlation {
            Correlation::Duplicated { block, .. } => block.max(1),
            _ => 1,
        };
        let support = (0..s)
            .map(|i| {
                let j = i * p / s.max(1);
                (j - j % block, effect)
            })
            .collect();
        let explained = s as f64 * effect * effect;
        let noise_sd = if explained < 0.9 { sqrt(1.0 - explained) } else { 0.3 };
        SynthSpec { n, p, support, correlation, noise_sd, groups: None, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.p == 0 {
            return Err(Error::Config("synthetic design needs n >= 3 and p >= 1".into()));
        }
        if self.support.len() >= self.p || self.support.iter().any(|(j, _)| *j >= self.p) {
            return Err(Error::Config("support must be a proper subset of the columns".into()));
        }
        if !(self.noise_sd > 0.0) {
            return Err(Error::Config("noise_sd must be positive".into()));
        }
        match self.correlation {
            Correlation::Ar1 { rho } if !(0.0..1.0).contains(&rho) => {
                Err(Error::Config("AR(1) coefficient must lie in [0, 1)".into()))
            }
            Correlation::Duplicated { block: 0, .. } => Err(Error::Config("block size must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// Standardized design.
    pub x: Matrix,
    /// Standardized response.
    pub y: Vec<f64>,
    /// Sorted true support.
    pub truth: Vec<usize>,
    pub groups: Option<Vec<usize>>,
}

/// Draws one dataset from `spec` using substream `stream` of its seed.
pub fn generate_stream(spec: &SynthSpec, stream: u64) -> Result<SynthData> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let mut x = Matrix::zeros(n, p);
    match spec.correlation {
        Correlation::Independent => {
            for j in 0..p {
                for i in 0..n {
                    x.set(i, j, gauss());
                }
            }
        }
        Correlation::Ar1 { rho } => {
            let innov = sqrt(1.0 - rho * rho);
            for i in 0..n {
                let mut prev = gauss();
                x.set(i, 0, prev);
                for j in 1..p {
                    prev = rho * prev + innov * gauss();
                    x.set(i, j, prev);
                }
            }
        }
        Correlation::Duplicated { block, twins_of_support } => {
            for start in (0..p).step_by(block) {
                let latent: Vec<f64> = (0..n).map(|_| gauss()).collect();
                for j in start..(start + block).min(p) {
                    let alone = !twins_of_support && spec.support.iter().any(|(s, _)| *s == j);
                    for (i, z) in latent.iter().enumerate() {
                        let v = if alone { gauss() } else { z + DUPLICATE_NOISE * gauss() };
                        x.set(i, j, v);
                    }
                }
            }
        }
    }
    let mut y: Vec<f64> = (0..n).map(|i| spec.support.iter().map(|(j, b)| b * x.get(i, *j)).sum::<f64>()).collect();
    let groups = spec.groups.as_ref().map(|g| {
        let count = g.count.clamp(1, n);
        let ids: Vec<usize> = (0..n).map(|i| i * count / n).collect();
        let u: Vec<f64> = (0..count).map(|_| g.sd * gauss()).collect();
        for (yi, gi) in y.iter_mut().zip(&ids) {
            *yi += u[*gi];
        }
        ids
    });
    for yi in y.iter_mut() {
        *yi += spec.noise_sd * gauss();
    }
    for j in 0..p {
        standardize(x.col_mut(j));
    }
    standardize(&mut y);
    let mut truth: Vec<usize> = spec.support.iter().map(|(j, _)| *j).collect();
    truth.sort_unstable();
    truth.dedup();
    Ok(SynthData { x, y, truth, groups })
}

/// Draws the dataset for `spec.seed` itself (substream 0).
pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    generate_stream(spec, 0)
}

fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter_mut().for_each(|v| *v -= m);
    let s = sqrt(x.iter().map(|v| v * v).sum::<f64>() / (n - 1.0));
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

/// False discovery and true positive proportions of one selection.
pub fn proportions(selected: &[usize], truth: &[usize]) -> (f64, f64) {
    let hits = selected.iter().filter(|j| truth.binary_search(j).is_ok()).count();
    let fdp = if selected.is_empty() { 0.0 } else { (selected.len() - hits) as f64 / selected.len() as f64 };
    let tpp = if truth.is_empty() { f64::NAN } else { hits as f64 / truth.len() as f64 };
    (fdp, tpp)
}

/// Outcome of one repetition for one (variant, α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepOutcome {
    pub rep: usize,
    pub variant: Variant,
    pub alpha: f64,
    pub fdp: f64,
    pub tpp: f64,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrRow {
    pub design: String,
    pub variant: Variant,
    pub alpha: f64,
    pub reps: usize,
    pub fdr: f64,
    pub fdr_se: f64,
    pub tpr: f64,
    pub tpr_se: f64,
    pub mean_selected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdrReport {
    pub rows: Vec<FdrRow>,
    pub outcomes: Vec<RepOutcome>,
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let v: Vec<f64> = x.iter().copied().filter(|a| a.is_finite()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let var = v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    (m, sqrt(var / n))
}

/// Repeats generation and selection `reps` times for every variant and α.
/// Repetition `r` uses data substream `r` and selector seed
/// `params.seed + r`, so variants are compared on identical data.
pub fn run_fdr_experiment<E: Executor>(
    spec: &SynthSpec,
    alphas: &[f64],
    variants: &[Variant],
    reps: usize,
    params: &TrexParams,
    exec: &E,
) -> Result<FdrReport> {
    if reps < 50 {
        return Err(Error::Config("the FDR benchmark needs at least 50 repetitions".into()));
    }
    spec.validate()?;
    let per_rep = exec.map(reps, |r| -> Result<Vec<RepOutcome>> {
        let data = generate_stream(spec, r as u64)?;
        let mut out = Vec::with_capacity(alphas.len() * variants.len());
        let prm = TrexParams { seed: params.seed.wrapping_add(r as u64), ..params.clone() };
        let mut sel = Selector::new(&data.x, &data.y, prm, &Sequential)?;
        for &variant in variants {
            for &alpha in alphas {
                let c = sel.calibrate_variant(alpha, variant)?;
                let (fdp, tpp) = proportions(&c.selected, &data.truth);
                out.push(RepOutcome { rep: r, variant, alpha, fdp, tpp, selected: c.selected.len() });
            }
        }
        Ok(out)
    });
    let mut outcomes = Vec::new();
    for r in per_rep {
        outcomes.extend(r?);
    }
    let design = spec.correlation.label();
    let mut rows = Vec::new();
    for &variant in variants {
        for &alpha in alphas {
            let sel: Vec<&RepOutcome> = outcomes.iter().filter(|o| o.variant == variant && o.alpha == alpha).collect();
            let (fdr, fdr_se) = mean_se(&sel.iter().map(|o| o.fdp).collect::<Vec<_>>());
            let (tpr, tpr_se) = mean_se(&sel.iter().map(|o| o.tpp).collect::<Vec<_>>());
            let mean_selected = sel.iter().map(|o| o.selected as f64).sum::<f64>() / sel.len() as f64;
            rows.push(FdrRow { design: design.clone(), variant, alpha, reps, fdr, fdr_se, tpr, tpr_se, mean_selected });
        }
    }
    Ok(FdrReport { rows, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pearson;
    use alloc::vec;

    #[test]
    fn planted_support_uses_block_leaders() {
        let s = SynthSpec::planted(100, 164, 3, 0.3, Correlation::Duplicated { block: 2, twins_of_support: true }, 1);
        assert_eq!(s.support.iter().map(|t| t.0).collect::<Vec<_>>(), vec![0, 54, 108]);
        assert!((s.noise_sd - sqrt(0.73)).abs() < 1e-12);
    }

    #[test]
    fn duplicated_blocks_are_near_copies() {
        let twins = Correlation::Duplicated { block: 2, twins_of_support: true };
        let d = generate(&SynthSpec::planted(300, 10, 1, 0.3, twins, 3)).unwrap();
        let r = pearson(d.x.col(4), d.x.col(5)).unwrap();
        assert!(r > 0.97, "{r}");
        assert!(pearson(d.x.col(3), d.x.col(4)).unwrap().abs() < 0.3);
        assert!(pearson(d.x.col(0), d.x.col(1)).unwrap() > 0.97);
        let nulls_only = Correlation::Duplicated { block: 2, twins_of_support: false };
        let d = generate(&SynthSpec::planted(300, 10, 1, 0.3, nulls_only, 3)).unwrap();
        assert!(pearson(d.x.col(0), d.x.col(1)).unwrap().abs() < 0.3);
        assert!(pearson(d.x.col(2), d.x.col(3)).unwrap() > 0.97);
    }

    #[test]
    fn proportions_count_false_and_true_hits() {
        assert_eq!(proportions(&[1, 2, 5, 7], &[2, 7, 9]), (0.5, 2.0 / 3.0));
        assert_eq!(proportions(&[], &[1]), (0.0, 0.0));
        assert!(proportions(&[3], &[]).1.is_nan());
    }

    #[test]
    fn too_few_repetitions_rejected() {
        let s = SynthSpec::planted(50, 5, 1, 0.3, Correlation::Independent, 0);
        let e = run_fdr_experiment(&s, &[0.1], &[Variant::Plain], 10, &TrexParams::default(), &Sequential);
        assert!(matches!(e, Err(Error::Config(_))));
    }
}
