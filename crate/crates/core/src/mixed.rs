//! Random-intercept linear mixed models.
//!
//! `y = Xβ + Zu + ε` with one intercept per group, `u ~ N(0, σ_u²)` and
//! `ε ~ N(0, σ_e²)`. The REML criterion is profiled over
//! `λ = σ_u²/σ_e²`, which leaves a one-dimensional search. The robust fit
//! reweights observations with Huber weights and repeats the weighted REML
//! fit until the coefficients settle.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use libm::{exp, log, sqrt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_inverse, cholesky_solve, Matrix};
use crate::special::t_two_sided_p;
use crate::stats::{mad, mean, var};

/// Bounds of the `ln λ` search.
pub const LOG_LAMBDA_RANGE: (f64, f64) = (-12.0, 12.0);
const GOLDEN_TOL: f64 = 1e-10;
const BRACKET_POINTS: usize = 49;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub t: f64,
    pub df: f64,
    pub p_raw: f64,
    pub p_adj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedModelFit {
    /// Intercept first, then one entry per fixed-effect column.
    pub coefficients: Vec<Coefficient>,
    pub lambda: f64,
    pub sigma_u: f64,
    pub sigma_e: f64,
    /// REML log-likelihood at the optimum.
    pub reml_loglik: f64,
    pub marginal_r2: f64,
    pub conditional_r2: f64,
    pub aic: f64,
    pub bic: f64,
    pub icc: f64,
    pub rmse: f64,
    pub n_obs: usize,
    pub n_groups: usize,
    pub robust: bool,
    /// Final Huber weights (robust fit only).
    pub weights: Option<Vec<f64>>,
    pub iterations: usize,
}

impl MixedModelFit {
    pub fn beta(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn se(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.se).collect()
    }
}

/// Table-style summary of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub marginal_r2: f64,
    pub conditional_r2: f64,
    pub aic: f64,
    pub bic: f64,
    pub icc: f64,
    pub rmse: f64,
    pub sigma_u: f64,
    pub sigma_e: f64,
    pub n_obs: usize,
    pub n_groups: usize,
}

pub fn model_summary(fit: &MixedModelFit) -> ModelSummary {
    ModelSummary {
        marginal_r2: fit.marginal_r2,
        conditional_r2: fit.conditional_r2,
        aic: fit.aic,
        bic: fit.bic,
        icc: fit.icc,
        rmse: fit.rmse,
        sigma_u: fit.sigma_u,
        sigma_e: fit.sigma_e,
        n_obs: fit.n_obs,
        n_groups: fit.n_groups,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobustParams {
    /// Huber tuning constant in units of the robust residual scale.
    pub k: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RobustParams {
    fn default() -> Self {
        RobustParams { k: 1.345, tol: 1e-8, max_iter: 100 }
    }
}

/// Fixed-effect design with intercept and contiguous group labels.
#[derive(Debug, Clone)]
pub struct Problem {
    y: Vec<f64>,
    /// `N × (s + 1)`, intercept in column 0.
    x: Matrix,
    groups: Vec<usize>,
    n_groups: usize,
    names: Vec<String>,
}

impl Problem {
    pub fn new(y: &[f64], x_sel: &Matrix, names: &[String], group_ids: &[usize]) -> Result<Self> {
        let n = y.len();
        let s = x_sel.ncols();
        if x_sel.nrows() != n || group_ids.len() != n {
            return Err(Error::Data("response, design and group ids differ in length".into()));
        }
        if names.len() != s {
            return Err(Error::Data("one name per fixed-effect column is required".into()));
        }
        if n <= s + 2 {
            return Err(Error::InsufficientData { what: "mixed model observations", needed: s + 3, got: n });
        }
        if y.iter().chain(x_sel.as_slice()).any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value in mixed-model input".into()));
        }
        let mut labels: Vec<usize> = group_ids.to_vec();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() < 2 {
            return Err(Error::InsufficientData { what: "random-intercept groups", needed: 2, got: labels.len() });
        }
        let groups = group_ids.iter().map(|g| labels.binary_search(g).unwrap()).collect();
        let mut data = vec![1.0; n];
        data.extend_from_slice(x_sel.as_slice());
        let x = Matrix::from_col_major(n, s + 1, data);
        let mut all_names = vec![String::from("(Intercept)")];
        all_names.extend(names.iter().cloned());
        check_rank(&x, &all_names)?;
        Ok(Problem { y: y.to_vec(), x, groups, n_groups: labels.len(), names: all_names })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn n_fixed(&self) -> usize {
        self.x.ncols()
    }
}

fn check_rank(x: &Matrix, names: &[String]) -> Result<()> {
    let p = x.ncols();
    // scale columns so the pivot test is relative
    let norms: Vec<f64> = (0..p).map(|j| sqrt(x.col(j).iter().map(|v| v * v).sum::<f64>())).collect();
    for (j, nm) in norms.iter().enumerate() {
        if *nm == 0.0 {
            return Err(Error::Rank(format!("column '{}' is identically zero", names[j])));
        }
    }
    let mut g = x.gram();
    for i in 0..p {
        for j in 0..p {
            g[i * p + j] /= norms[i] * norms[j];
        }
    }
    for m in 1..=p {
        let sub: Vec<f64> = (0..m * m).map(|idx| g[(idx / m) * p + idx % m]).collect();
        if cholesky(&sub, m).is_err() || min_pivot(&sub, m) < 1e-10 {
            let partners: Vec<&str> = (0..m - 1).map(|j| names[j].as_str()).collect();
            return Err(Error::Rank(format!("column '{}' is collinear with [{}]", names[m - 1], partners.join(", "))));
        }
    }
    Ok(())
}

fn min_pivot(a: &[f64], n: usize) -> f64 {
    match cholesky(a, n) {
        Ok(l) => (0..n).map(|i| l[i * n + i] * l[i * n + i]).fold(f64::INFINITY, f64::min),
        Err(_) => 0.0,
    }
}

/// Criterion value and the GLS quantities at one `λ`.
#[derive(Debug, Clone)]
pub struct RemlEval {
    pub lambda: f64,
    /// `-2` times the restricted log-likelihood.
    pub deviance: f64,
    pub beta: Vec<f64>,
    pub sigma2: f64,
    /// `(XᵀH⁻¹X)⁻¹`, row-major.
    pub xthx_inv: Vec<f64>,
}

/// Applies `H_g⁻¹` for `H_g = W_g⁻¹ + λ11ᵀ` group by group.
struct Precision<'a> {
    groups: &'a [usize],
    w: &'a [f64],
    c: Vec<f64>,
}

impl<'a> Precision<'a> {
    fn new(groups: &'a [usize], n_groups: usize, w: &'a [f64], lambda: f64) -> (Self, f64) {
        let mut wsum = vec![0.0; n_groups];
        for (g, wi) in groups.iter().zip(w) {
            wsum[*g] += wi;
        }
        let logdet = wsum.iter().map(|s| log(1.0 + lambda * s)).sum::<f64>() - w.iter().map(|v| log(*v)).sum::<f64>();
        let c = wsum.iter().map(|s| lambda / (1.0 + lambda * s)).collect();
        (Precision { groups, w, c }, logdet)
    }

    /// `aᵀH⁻¹b`
    fn inner(&self, a: &[f64], b: &[f64], n_groups: usize) -> f64 {
        let mut wa = vec![0.0; n_groups];
        let mut wb = vec![0.0; n_groups];
        let mut diag = 0.0;
        for i in 0..a.len() {
            let g = self.groups[i];
            let wi = self.w[i];
            diag += wi * a[i] * b[i];
            wa[g] += wi * a[i];
            wb[g] += wi * b[i];
        }
        diag - (0..n_groups).map(|g| self.c[g] * wa[g] * wb[g]).sum::<f64>()
    }
}

/// REML deviance and GLS solution for weights `w` (all ones for the
/// classical model).
pub fn reml_eval(prob: &Problem, w: &[f64], lambda: f64) -> Result<RemlEval> {
    let n = prob.n();
    let p = prob.n_fixed();
    let ng = prob.n_groups;
    let (h, logdet_h) = Precision::new(&prob.groups, ng, w, lambda);
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for i in 0..p {
        for j in 0..=i {
            let v = h.inner(prob.x.col(i), prob.x.col(j), ng);
            a[i * p + j] = v;
            a[j * p + i] = v;
        }
        b[i] = h.inner(prob.x.col(i), &prob.y, ng);
    }
    let l = cholesky(&a, p).map_err(|_| Error::Rank("GLS normal equations are singular".into()))?;
    let mut beta = b;
    cholesky_solve(&l, p, &mut beta);
    let fitted = prob.x.matvec(&beta);
    let r: Vec<f64> = prob.y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = h.inner(&r, &r, ng);
    let dof = (n - p) as f64;
    let sigma2 = rss / dof;
    if !(sigma2 > 0.0) {
        return Err(Error::Numeric { what: "REML residual variance", residual: sigma2 });
    }
    let logdet_a: f64 = (0..p).map(|i| 2.0 * log(l[i * p + i])).sum();
    let deviance = dof * (1.0 + log(2.0 * core::f64::consts::PI * sigma2)) + logdet_h + logdet_a;
    Ok(RemlEval { lambda, deviance, beta, sigma2, xthx_inv: cholesky_inverse(&l, p) })
}

/// Minimizes the REML deviance over `λ`: a log-spaced scan brackets the
/// minimum, golden-section search refines it, and `λ = 0` is checked as a
/// boundary candidate.
pub fn optimize_lambda(prob: &Problem, w: &[f64]) -> Result<RemlEval> {
    let (lo, hi) = LOG_LAMBDA_RANGE;
    let f = |t: f64| reml_eval(prob, w, exp(t)).map(|e| e.deviance);
    let step = (hi - lo) / (BRACKET_POINTS - 1) as f64;
    let mut vals = Vec::with_capacity(BRACKET_POINTS);
    for i in 0..BRACKET_POINTS {
        vals.push(f(lo + step * i as f64)?);
    }
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[best] {
            best = i;
        }
    }
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(BRACKET_POINTS - 1) as f64;
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    let interior = reml_eval(prob, w, exp(t))?;
    let boundary = reml_eval(prob, w, 0.0)?;
    Ok(if boundary.deviance <= interior.deviance { boundary } else { interior })
}

/// Per-group conditional modes of the random intercepts.
fn blups(prob: &Problem, w: &[f64], lambda: f64, beta: &[f64]) -> Vec<f64> {
    let fitted = prob.x.matvec(beta);
    let mut wr = vec![0.0; prob.n_groups];
    let mut ws = vec![0.0; prob.n_groups];
    for i in 0..prob.n() {
        let g = prob.groups[i];
        wr[g] += w[i] * (prob.y[i] - fitted[i]);
        ws[g] += w[i];
    }
    (0..prob.n_groups).map(|g| lambda * wr[g] / (1.0 + lambda * ws[g])).collect()
}

fn assemble(prob: &Problem, eval: &RemlEval, w: &[f64], df: f64, robust: bool, iterations: usize) -> MixedModelFit {
    let p = prob.n_fixed();
    let n = prob.n();
    let p_raw: Vec<f64> = (0..p)
        .map(|i| {
            let se = sqrt(eval.sigma2 * eval.xthx_inv[i * p + i]);
            t_two_sided_p(eval.beta[i] / se, df)
        })
        .collect();
    let p_adj = bh_adjust(&p_raw).expect("t-test p-values lie in [0, 1]");
    let coefficients = (0..p)
        .map(|i| {
            let se = sqrt(eval.sigma2 * eval.xthx_inv[i * p + i]);
            Coefficient {
                name: prob.names[i].clone(),
                estimate: eval.beta[i],
                se,
                t: eval.beta[i] / se,
                df,
                p_raw: p_raw[i],
                p_adj: p_adj[i],
            }
        })
        .collect();
    let sigma_e2 = eval.sigma2;
    let sigma_u2 = eval.lambda * eval.sigma2;
    let fixed = prob.x.matvec(&eval.beta);
    // variance of the slope part; the intercept carries none
    let mut slopes = eval.beta.clone();
    slopes[0] = 0.0;
    let var_f = if p > 1 { var(&prob.x.matvec(&slopes)).max(0.0) } else { 0.0 };
    let total = var_f + sigma_u2 + sigma_e2;
    let u = blups(prob, w, eval.lambda, &eval.beta);
    let sse: f64 = (0..n)
        .map(|i| {
            let e = prob.y[i] - fixed[i] - u[prob.groups[i]];
            e * e
        })
        .sum();
    let k = (p + 2) as f64;
    let reml_loglik = -0.5 * eval.deviance;
    MixedModelFit {
        coefficients,
        lambda: eval.lambda,
        sigma_u: sqrt(sigma_u2),
        sigma_e: sqrt(sigma_e2),
        reml_loglik,
        marginal_r2: var_f / total,
        conditional_r2: (var_f + sigma_u2) / total,
        aic: eval.deviance + 2.0 * k,
        bic: eval.deviance + k * log(n as f64),
        icc: sigma_u2 / (sigma_u2 + sigma_e2),
        rmse: sqrt(sse / n as f64),
        n_obs: n,
        n_groups: prob.n_groups,
        robust,
        weights: robust.then(|| w.to_vec()),
        iterations,
    }
}

/// Residual degrees of freedom `N - s - 2`.
pub fn residual_df(prob: &Problem) -> f64 {
    (prob.n() - prob.n_fixed() - 1) as f64
}

/// Classical REML fit.
pub fn fit_lmer(y: &[f64], x_sel: &Matrix, names: &[String], group_ids: &[usize]) -> Result<MixedModelFit> {
    let prob = Problem::new(y, x_sel, names, group_ids)?;
    let w = vec![1.0; prob.n()];
    let eval = optimize_lambda(&prob, &w)?;
    Ok(assemble(&prob, &eval, &w, residual_df(&prob), false, 1))
}

/// Huber weights for residuals `e` at scale `s`.
pub fn huber_weights(e: &[f64], s: f64, k: f64) -> Vec<f64> {
    e.iter()
        .map(|v| {
            let a = v.abs();
            if a <= k * s || a == 0.0 {
                1.0
            } else {
                k * s / a
            }
        })
        .collect()
}

/// Robust fit by iteratively reweighted REML with Huber weights on the
/// conditional residuals, scale from their median absolute deviation.
pub fn fit_rlmer(
    y: &[f64],
    x_sel: &Matrix,
    names: &[String],
    group_ids: &[usize],
    params: &RobustParams,
) -> Result<MixedModelFit> {
    let prob = Problem::new(y, x_sel, names, group_ids)?;
    let n = prob.n();
    let mut w = vec![1.0; n];
    let mut eval = optimize_lambda(&prob, &w)?;
    let mut change = f64::INFINITY;
    for it in 1..=params.max_iter {
        let fixed = prob.x.matvec(&eval.beta);
        let u = blups(&prob, &w, eval.lambda, &eval.beta);
        let e: Vec<f64> = (0..n).map(|i| prob.y[i] - fixed[i] - u[prob.groups[i]]).collect();
        let scale = 1.482_602_218_505_602 * mad(&e);
        if !(scale > 0.0) {
            return Err(Error::Numeric { what: "robust residual scale", residual: scale });
        }
        w = huber_weights(&e, scale, params.k);
        let next = optimize_lambda(&prob, &w)?;
        change = next.beta.iter().zip(&eval.beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eval = next;
        if change < params.tol {
            return Ok(assemble(&prob, &eval, &w, residual_df(&prob), true, it));
        }
    }
    Err(Error::Numeric { what: "robust mixed-model reweighting", residual: change })
}

/// Benjamini-Hochberg step-up adjusted p-values.
pub fn bh_adjust(p: &[f64]) -> Result<Vec<f64>> {
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Contract("p-values must lie in [0, 1]"));
    }
    let m = p.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|a, b| p[*a].total_cmp(&p[*b]).then(a.cmp(b)));
    let mut out = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (0..m).rev() {
        let i = idx[rank];
        running = running.min(p[i] * m as f64 / (rank + 1) as f64);
        // guard against `p·m/m` rounding one ulp below `p`
        out[i] = running.min(1.0).max(p[i]);
    }
    Ok(out)
}

/// Mean of `y`, used by the null-model summary.
pub fn grand_mean(y: &[f64]) -> f64 {
    mean(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bh_hand_cases() {
        let out = bh_adjust(&[0.01, 0.02, 0.04]).unwrap();
        for (a, b) in out.iter().zip([0.03, 0.03, 0.04]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(bh_adjust(&[0.3]).unwrap(), vec![0.3]);
        assert_eq!(bh_adjust(&[0.2; 4]).unwrap(), vec![0.2; 4]);
        assert!(matches!(bh_adjust(&[0.2, 1.2]), Err(Error::Contract(_))));
    }

    #[test]
    fn collinear_column_is_named() {
        let a: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 1.0).collect();
        let x = Matrix::from_columns(12, &[a, b]);
        let y: Vec<f64> = (0..12).map(|i| (i % 5) as f64).collect();
        let g: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let err = fit_lmer(&y, &x, &["a".into(), "b".into()], &g).unwrap_err();
        match err {
            Error::Rank(m) => assert!(m.contains("'b'") && m.contains("a"), "{m}"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let x = Matrix::from_columns(4, &[vec![0.0, 1.0, 2.0, 4.0]]);
        let y = [1.0, 2.0, 0.5, 3.0];
        assert!(fit_lmer(&y, &x, &["a".into()], &[0, 0, 0, 0]).is_err());
        let x3 = Matrix::from_columns(3, &[vec![0.0, 1.0, 2.0]]);
        assert!(fit_lmer(&y[..3], &x3, &["a".into()], &[0, 1, 0]).is_err());
    }

    #[test]
    fn huber_weights_downweight_large_residuals() {
        let w = huber_weights(&[0.5, -1.0, 4.0], 1.0, 1.345);
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 1.0);
        assert!((w[2] - 1.345 / 4.0).abs() < 1e-15);
    }
}
