//! Electrodermal preprocessing and convex tonic/phasic decomposition.
//!
//! The decomposition solves the convex model
//!
//! ```text
//! minimize   ½‖M q + C d + B l − y‖² + α·1ᵀ(A q) + ½γ‖l‖²
//! subject to A q ≥ 0
//! ```
//!
//! where `A q` is the sudomotor driver (the biexponential Bateman response
//! written as a second-order autoregressive filter), `M q` the phasic
//! response, `B l` a cubic B-spline tonic baseline with knots every
//! `delta_knot` seconds and `C d` an offset plus linear drift. Because the
//! driver is constrained nonnegative, its ℓ1 norm is the linear term
//! `α·1ᵀ(A q)`.
//!
//! The QP is solved with a Mehrotra predictor-corrector interior-point
//! method. Every Newton system has a pentadiagonal block in `q` bordered by
//! the few drift and spline columns, so each iteration costs `O(n·k²)` with
//! `k` the number of border columns.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::{Error, Result};
use crate::filter::{fir_decimate, fir_lowpass};
use crate::linalg::{cholesky, cholesky_solve};
use crate::stats::{mean, sd};

/// Decomposition output, all sequences at `fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdaComponents {
    /// Tonic level: spline baseline plus offset and drift.
    pub scl: Vec<f64>,
    /// Phasic response.
    pub scr: Vec<f64>,
    /// Sudomotor nerve activity (driver), nonnegative.
    pub smna: Vec<f64>,
    pub residual: Vec<f64>,
    pub fs: f64,
    /// Spline coefficients of the tonic baseline.
    pub spline_coeffs: Vec<f64>,
    /// Offset and slope of the drift term.
    pub drift: [f64; 2],
    pub objective: f64,
    /// Relative KKT residual at termination.
    pub kkt_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CvxEdaParams {
    /// Slow time constant of the Bateman response (s).
    pub tau0: f64,
    /// Fast time constant (s).
    pub tau1: f64,
    /// Spline knot spacing (s).
    pub delta_knot: f64,
    /// Sparsity weight on the driver.
    pub alpha: f64,
    /// Ridge weight on the spline coefficients.
    pub gamma: f64,
    pub max_iter: usize,
    /// Acceptance bound on the relative KKT residual.
    pub tol: f64,
}

impl Default for CvxEdaParams {
    fn default() -> Self {
        CvxEdaParams { tau0: 2.0, tau1: 0.7, delta_knot: 10.0, alpha: 8e-4, gamma: 1e-2, max_iter: 200, tol: 1e-6 }
    }
}

/// Z-scores the raw trace and decimates it by `fs_in / fs_out` in stages of
/// 5, 4, 3 or 2. Each stage applies a zero-phase Blackman-sinc low-pass with
/// cutoff at 80% of the new Nyquist frequency.
pub fn normalize_and_decimate(raw: &[f64], fs_in: f64, fs_out: f64) -> Result<Vec<f64>> {
    if (raw.len() as f64) < fs_in {
        return Err(Error::InsufficientData {
            what: "EDA decimation (samples)",
            needed: fs_in as usize,
            got: raw.len(),
        });
    }
    let ratio = fs_in / fs_out;
    let r = libm::round(ratio) as usize;
    if r == 0 || (ratio - r as f64).abs() > 1e-9 {
        return Err(Error::Config(format!("decimation needs an integer rate ratio, got {fs_in}/{fs_out}")));
    }
    let m = mean(raw);
    let s = sd(raw);
    if !(s > 0.0) {
        return Err(Error::DegenerateSignal("constant EDA trace: z-score undefined"));
    }
    let mut x: Vec<f64> = raw.iter().map(|v| (v - m) / s).collect();
    for factor in decimation_stages(r)? {
        x = decimate_stage(&x, factor);
    }
    Ok(x)
}

/// Splits an integer decimation ratio into stage factors from {5, 4, 3, 2}.
pub fn decimation_stages(mut r: usize) -> Result<Vec<usize>> {
    let mut stages = Vec::new();
    while r > 1 {
        let f = [5, 4, 3, 2]
            .into_iter()
            .find(|f| r.is_multiple_of(*f))
            .ok_or_else(|| Error::Config(format!("decimation ratio has a prime factor above 5: {r}")))?;
        stages.push(f);
        r /= f;
    }
    Ok(stages)
}

/// Anti-aliasing filter of one decimation stage.
pub fn stage_filter(factor: usize) -> Vec<f64> {
    let cutoff = 0.8 * 0.5 / factor as f64;
    fir_lowpass(30 * factor + 1, cutoff)
}

fn decimate_stage(x: &[f64], factor: usize) -> Vec<f64> {
    fir_decimate(x, &stage_filter(factor), factor)
}

/// Second-order autoregressive coefficients of the discretized Bateman kernel.
pub fn bateman_ar(tau0: f64, tau1: f64, fs: f64) -> [f64; 3] {
    let delta = 1.0 / fs;
    let a1 = 1.0 / tau0.min(tau1);
    let a0 = 1.0 / tau0.max(tau1);
    let den = (a1 - a0) * delta * delta;
    [
        (a1 * delta + 2.0) * (a0 * delta + 2.0) / den,
        (2.0 * a1 * a0 * delta * delta - 8.0) / den,
        (a1 * delta - 2.0) * (a0 * delta - 2.0) / den,
    ]
}

const MA: [f64; 3] = [1.0, 2.0, 1.0];

/// Dense design pieces of the model (everything except the banded operators).
#[derive(Debug, Clone)]
pub struct EdaModel {
    pub n: usize,
    pub ar: [f64; 3],
    /// Border columns: offset, drift, then spline bases, each of length `n`.
    pub border: Vec<Vec<f64>>,
    pub alpha: f64,
    pub gamma: f64,
}

impl EdaModel {
    pub fn new(n: usize, fs: f64, p: &CvxEdaParams) -> Self {
        let ar = bateman_ar(p.tau0, p.tau1, fs);
        let mut border = Vec::new();
        border.push(vec![1.0; n]);
        border.push((1..=n).map(|i| i as f64 / n as f64).collect());
        for col in spline_basis(n, fs, p.delta_knot) {
            border.push(col);
        }
        EdaModel { n, ar, border, alpha: p.alpha, gamma: p.gamma }
    }

    pub fn n_spline(&self) -> usize {
        self.border.len() - 2
    }

    /// Driver `A q` (first two entries are structurally zero).
    pub fn apply_ar(&self, q: &[f64]) -> Vec<f64> {
        band_apply(&self.ar, q)
    }

    /// Phasic response `M q`.
    pub fn apply_ma(&self, q: &[f64]) -> Vec<f64> {
        band_apply(&MA, q)
    }

    /// Tonic component `C d + B l` from the border coefficients.
    pub fn tonic(&self, coef: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; self.n];
        for (c, col) in coef.iter().zip(&self.border) {
            if *c != 0.0 {
                for (ti, v) in t.iter_mut().zip(col) {
                    *ti += c * v;
                }
            }
        }
        t
    }

    /// Full objective at `(q, coef)` for data `y`.
    pub fn objective(&self, y: &[f64], q: &[f64], coef: &[f64]) -> f64 {
        let r = self.apply_ma(q);
        let t = self.tonic(coef);
        let rss: f64 = y
            .iter()
            .zip(r.iter().zip(&t))
            .map(|(yi, (ri, ti))| {
                let e = yi - ri - ti;
                e * e
            })
            .sum();
        let driver: f64 = self.apply_ar(q).iter().sum();
        let ridge: f64 = coef[2..].iter().map(|v| v * v).sum();
        0.5 * rss + self.alpha * driver + 0.5 * self.gamma * ridge
    }
}

/// Cubic B-spline columns with knots every `delta_knot` seconds, sampled at `fs`.
pub fn spline_basis(n: usize, fs: f64, delta_knot: f64) -> Vec<Vec<f64>> {
    let ds = (libm::round(delta_knot * fs) as usize).clamp(1, n.max(1));
    // triangle of length 2ds-1 convolved with itself
    let tri: Vec<f64> = (1..ds).chain((1..=ds).rev()).map(|v| v as f64).collect();
    let mut spl = vec![0.0; 2 * tri.len() - 1];
    for (i, a) in tri.iter().enumerate() {
        for (j, b) in tri.iter().enumerate() {
            spl[i + j] += a * b;
        }
    }
    let mx = spl.iter().cloned().fold(0.0, f64::max);
    for v in spl.iter_mut() {
        *v /= mx;
    }
    let half = (spl.len() / 2) as isize;
    let mut cols = Vec::new();
    let mut centre = 0usize;
    while centre < n {
        let mut col = vec![0.0; n];
        for (k, v) in spl.iter().enumerate() {
            let idx = centre as isize + k as isize - half;
            if idx >= 0 && (idx as usize) < n {
                col[idx as usize] = *v;
            }
        }
        cols.push(col);
        centre += ds;
    }
    cols
}

// (R q)_i = c0 q_i + c1 q_{i-1} + c2 q_{i-2} for i >= 2, zero for i < 2.
fn band_apply(c: &[f64; 3], q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut out = vec![0.0; n];
    for i in 2..n {
        out[i] = c[0] * q[i] + c[1] * q[i - 1] + c[2] * q[i - 2];
    }
    out
}

// Rᵀ z with z indexed like the rows of R.
fn band_apply_t(c: &[f64; 3], z: &[f64]) -> Vec<f64> {
    let n = z.len();
    let mut out = vec![0.0; n];
    for i in 2..n {
        out[i] += c[0] * z[i];
        out[i - 1] += c[1] * z[i];
        out[i - 2] += c[2] * z[i];
    }
    out
}

/// Symmetric positive definite pentadiagonal matrix in lower-band storage.
struct Penta {
    d0: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Penta {
    fn zeros(n: usize) -> Self {
        Penta { d0: vec![0.0; n], d1: vec![0.0; n], d2: vec![0.0; n] }
    }

    /// Adds `Rᵀ diag(w) R` for a banded row operator.
    fn add_weighted(&mut self, c: &[f64; 3], w: &[f64]) {
        for i in 2..self.d0.len() {
            let wi = w[i];
            self.d0[i] += wi * c[0] * c[0];
            self.d0[i - 1] += wi * c[1] * c[1];
            self.d0[i - 2] += wi * c[2] * c[2];
            self.d1[i] += wi * c[0] * c[1];
            self.d1[i - 1] += wi * c[1] * c[2];
            self.d2[i] += wi * c[0] * c[2];
        }
    }

    /// In-place banded Cholesky; `None` if not positive definite.
    fn factor(mut self) -> Option<Penta> {
        let n = self.d0.len();
        for i in 0..n {
            let l2 = if i >= 2 {
                self.d2[i] /= self.d0[i - 2];
                self.d2[i]
            } else {
                0.0
            };
            if i >= 1 {
                let mut v = self.d1[i];
                if i >= 2 {
                    v -= l2 * self.d1[i - 1] * self.d0[i - 2];
                }
                self.d1[i] = v / self.d0[i - 1];
            }
            // LDLᵀ: store D in d0
            let mut dd = self.d0[i];
            if i >= 1 {
                dd -= self.d1[i] * self.d1[i] * self.d0[i - 1];
            }
            if i >= 2 {
                dd -= l2 * l2 * self.d0[i - 2];
            }
            if !(dd > 0.0) || !dd.is_finite() {
                return None;
            }
            self.d0[i] = dd;
        }
        Some(self)
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 1..n {
            let mut v = b[i] - self.d1[i] * b[i - 1];
            if i >= 2 {
                v -= self.d2[i] * b[i - 2];
            }
            b[i] = v;
        }
        for i in 0..n {
            b[i] /= self.d0[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let mut v = b[i] - self.d1[i + 1] * b[i + 1];
            if i + 2 < n {
                v -= self.d2[i + 2] * b[i + 2];
            }
            b[i] = v;
        }
    }
}

/// Decomposes a 50 Hz (or any `fs`) normalized EDA trace.
pub fn cvxeda_decompose(y: &[f64], fs: f64, params: &CvxEdaParams) -> Result<EdaComponents> {
    let n = y.len();
    let min_len = libm::ceil(2.0 * params.delta_knot * fs) as usize;
    if n < min_len.max(4) {
        return Err(Error::InsufficientData { what: "EDA decomposition (samples)", needed: min_len.max(4), got: n });
    }
    let model = EdaModel::new(n, fs, params);
    let sol = solve_qp(&model, y, params)?;
    let q = &sol.q;
    let scr = model.apply_ma(q);
    let mut smna = model.apply_ar(q);
    // remove sub-roundoff negatives left by the interior point
    for v in smna.iter_mut() {
        if *v < 0.0 && *v > -1e-10 {
            *v = 0.0;
        }
    }
    let scl = model.tonic(&sol.coef);
    let residual: Vec<f64> = (0..n).map(|i| y[i] - scr[i] - scl[i]).collect();
    let objective = model.objective(y, q, &sol.coef);
    Ok(EdaComponents {
        scl,
        scr,
        smna,
        residual,
        fs,
        spline_coeffs: sol.coef[2..].to_vec(),
        drift: [sol.coef[0], sol.coef[1]],
        objective,
        kkt_residual: sol.kkt,
        iterations: sol.iterations,
    })
}

/// Raw solver output.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub q: Vec<f64>,
    /// Drift then spline coefficients.
    pub coef: Vec<f64>,
    /// Constraint multipliers (index-aligned with the driver; first two unused).
    pub z: Vec<f64>,
    pub kkt: f64,
    pub iterations: usize,
}

struct Newton<'a> {
    model: &'a EdaModel,
    /// Mᵀ applied to each border column.
    mt_border: Vec<Vec<f64>>,
    /// Border Gram plus ridge (row-major k×k).
    border_gram: Vec<f64>,
    ma_gram: Penta,
}

impl<'a> Newton<'a> {
    fn new(model: &'a EdaModel) -> Self {
        let k = model.border.len();
        let mt_border: Vec<Vec<f64>> = model.border.iter().map(|c| band_apply_t(&MA, c)).collect();
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = crate::linalg::dot(&model.border[i], &model.border[j]);
                g[i * k + j] = v;
                g[j * k + i] = v;
            }
            if i >= 2 {
                g[i * k + i] += model.gamma;
            }
        }
        let mut ma_gram = Penta::zeros(model.n);
        ma_gram.add_weighted(&MA, &vec![1.0; model.n]);
        Newton { model, mt_border, border_gram: g, ma_gram }
    }

    /// Solves `(H + ÂᵀWÂ) [dq; dc] = [rq; rc]` by block elimination.
    fn solve(&self, w: &[f64], rq: &[f64], rc: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.model.n;
        let k = self.mt_border.len();
        let mut p = Penta { d0: self.ma_gram.d0.clone(), d1: self.ma_gram.d1.clone(), d2: self.ma_gram.d2.clone() };
        p.add_weighted(&self.model.ar, w);
        let p = p.factor()?;
        let mut pinv_e: Vec<Vec<f64>> = Vec::with_capacity(k);
        for col in &self.mt_border {
            let mut c = col.clone();
            p.solve(&mut c);
            pinv_e.push(c);
        }
        let mut schur = self.border_gram.clone();
        for i in 0..k {
            for j in i..k {
                let v = crate::linalg::dot(&self.mt_border[i], &pinv_e[j]);
                schur[i * k + j] -= v;
                if j != i {
                    schur[j * k + i] -= v;
                }
            }
        }
        let l = cholesky(&schur, k).ok()?;
        let mut u = rq.to_vec();
        p.solve(&mut u);
        let mut dc: Vec<f64> = (0..k).map(|i| rc[i] - crate::linalg::dot(&self.mt_border[i], &u)).collect();
        cholesky_solve(&l, k, &mut dc);
        let mut dq = u;
        for (j, c) in dc.iter().enumerate() {
            for i in 0..n {
                dq[i] -= pinv_e[j][i] * c;
            }
        }
        Some((dq, dc))
    }
}

/// Mehrotra predictor-corrector interior point for the decomposition QP.
pub fn solve_qp(model: &EdaModel, y: &[f64], params: &CvxEdaParams) -> Result<QpSolution> {
    let n = model.n;
    let k = model.border.len();
    let m = n - 2;
    let newton = Newton::new(model);

    // linear term f = [α Âᵀ1 − Mᵀy ; −Bᵀy]
    let mut ones = vec![1.0; n];
    ones[0] = 0.0;
    ones[1] = 0.0;
    let at1 = band_apply_t(&model.ar, &ones);
    let mty = band_apply_t(&MA, y);
    let fq: Vec<f64> = (0..n).map(|i| model.alpha * at1[i] - mty[i]).collect();
    let fc: Vec<f64> = model.border.iter().map(|c| -crate::linalg::dot(c, y)).collect();
    let fnorm = fq.iter().chain(&fc).fold(0.0f64, |a, v| a.max(v.abs()));

    // H x, returned as (q part, border part)
    let hess = |q: &[f64], c: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut fx = model.apply_ma(q);
        for (cj, col) in c.iter().zip(&model.border) {
            for (v, b) in fx.iter_mut().zip(col) {
                *v += cj * b;
            }
        }
        let hq = band_apply_t(&MA, &fx);
        let mut hc: Vec<f64> = model.border.iter().map(|col| crate::linalg::dot(col, &fx)).collect();
        for j in 2..k {
            hc[j] += model.gamma * c[j];
        }
        (hq, hc)
    };

    // initial point: (H + ÂᵀÂ) x = −f, s = Âx shifted positive, z = s
    let (mut q, mut c) = newton
        .solve(&vec![1.0; n], &fq.iter().map(|v| -v).collect::<Vec<_>>(), &fc.iter().map(|v| -v).collect::<Vec<_>>())
        .ok_or(Error::Numeric { what: "EDA decomposition (initial factorization)", residual: f64::NAN })?;
    let ax = model.apply_ar(&q);
    let mut s: Vec<f64> = ax.clone();
    let mut z: Vec<f64> = ax.iter().map(|v| -v).collect();
    for v in [&mut s, &mut z] {
        let mn = v[2..].iter().cloned().fold(f64::INFINITY, f64::min);
        let shift = if mn <= 0.0 { 1.0 - mn } else { 0.0 };
        for x in v[2..].iter_mut() {
            *x += shift;
        }
        v[0] = 0.0;
        v[1] = 0.0;
    }
    // balance the starting duality gap
    let gap: f64 = (2..n).map(|i| s[i] * z[i]).sum::<f64>() / m as f64;
    if gap > 0.0 {
        let scale = sqrt(gap.max(1e-12));
        for i in 2..n {
            s[i] = s[i].max(1e-3 * scale);
            z[i] = z[i].max(1e-3 * scale);
        }
    }

    let mut iterations = 0;
    let mut kkt = f64::INFINITY;
    let inner_tol = (params.tol * 1e-3).max(1e-13);
    while iterations < params.max_iter {
        // residuals
        let (hq, hc) = hess(&q, &c);
        let atz = band_apply_t(&model.ar, &z);
        // dual residual rd = Hx + f + Gᵀz with G = −Â
        let rdq: Vec<f64> = (0..n).map(|i| hq[i] + fq[i] - atz[i]).collect();
        let rdc: Vec<f64> = (0..k).map(|j| hc[j] + fc[j]).collect();
        let ax = model.apply_ar(&q);
        // primal residual rp = Gx + s − h = −Âq + s
        let rp: Vec<f64> = (0..n).map(|i| if i < 2 { 0.0 } else { s[i] - ax[i] }).collect();
        let mu: f64 = (2..n).map(|i| s[i] * z[i]).sum::<f64>() / m as f64;

        let rd_norm = rdq.iter().chain(&rdc).fold(0.0f64, |a, v| a.max(v.abs()));
        let rp_norm = rp.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let ax_norm = ax.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        // the total gap sᵀz bounds the objective suboptimality
        let obj = model.objective(y, &q, &c);
        kkt = (rd_norm / (1.0 + fnorm)).max(rp_norm / (1.0 + ax_norm)).max(mu * m as f64 / (1.0 + obj.abs()));
        if kkt <= inner_tol {
            break;
        }
        iterations += 1;

        let w: Vec<f64> = (0..n).map(|i| if i < 2 { 0.0 } else { z[i] / s[i] }).collect();

        // direction for complementarity target rc: returns (dq, dc, dz, ds)
        let direction = |rc: &[f64]| -> Option<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
            // (H + ÂᵀWÂ)Δx = −rd − GᵀW rp + GᵀS⁻¹rc, G = −Â
            let mut t = vec![0.0; n];
            for i in 2..n {
                t[i] = w[i] * rp[i] - rc[i] / s[i];
            }
            let att = band_apply_t(&model.ar, &t);
            let rq: Vec<f64> = (0..n).map(|i| -rdq[i] + att[i]).collect();
            let rcb: Vec<f64> = rdc.iter().map(|v| -v).collect();
            let (dq, dc) = newton.solve(&w, &rq, &rcb)?;
            // Δz = W(GΔx + rp) − S⁻¹rc ; Δs = Z⁻¹(−rc − SΔz)
            let adq = model.apply_ar(&dq);
            let mut dz = vec![0.0; n];
            let mut ds = vec![0.0; n];
            for i in 2..n {
                dz[i] = w[i] * (-adq[i] + rp[i]) - rc[i] / s[i];
                ds[i] = (-rc[i] - s[i] * dz[i]) / z[i];
            }
            Some((dq, dc, dz, ds))
        };

        let rc_aff: Vec<f64> = (0..n).map(|i| s[i] * z[i]).collect();
        let (_, _, dz_a, ds_a) = direction(&rc_aff)
            .ok_or(Error::Numeric { what: "EDA decomposition (Newton factorization)", residual: kkt })?;
        let a_aff = max_step(&s, &ds_a).min(max_step(&z, &dz_a));
        let mu_aff: f64 = (2..n).map(|i| (s[i] + a_aff * ds_a[i]) * (z[i] + a_aff * dz_a[i])).sum::<f64>() / m as f64;
        let ratio = (mu_aff / mu).clamp(0.0, 1.0);
        let sigma = ratio * ratio * ratio;
        let rc: Vec<f64> =
            (0..n).map(|i| if i < 2 { 0.0 } else { s[i] * z[i] + ds_a[i] * dz_a[i] - sigma * mu }).collect();
        let (dq, dc, dz, ds) =
            direction(&rc).ok_or(Error::Numeric { what: "EDA decomposition (Newton factorization)", residual: kkt })?;
        let step = (0.99 * max_step(&s, &ds).min(max_step(&z, &dz))).min(1.0);
        for i in 0..n {
            q[i] += step * dq[i];
        }
        for j in 0..k {
            c[j] += step * dc[j];
        }
        for i in 2..n {
            s[i] += step * ds[i];
            z[i] += step * dz[i];
        }
    }
    if !(kkt <= params.tol) {
        return Err(Error::Numeric { what: "EDA decomposition (interior point)", residual: kkt });
    }
    Ok(QpSolution { q, coef: c, z, kkt, iterations })
}

// Largest step in (0, 1/0.99] keeping v + a·dv > 0 on indices ≥ 2.
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    let mut a = 1.0 / 0.99;
    for i in 2..v.len() {
        if dv[i] < 0.0 {
            a = f64::min(a, -v[i] / dv[i]);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input_is_degenerate() {
        let x = vec![1.0; 1000];
        assert!(matches!(normalize_and_decimate(&x, 1000.0, 50.0), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn stages_for_twenty() {
        assert_eq!(decimation_stages(20).unwrap(), vec![5, 4]);
        assert!(decimation_stages(7).is_err());
    }

    #[test]
    fn output_length_is_floor_of_ratio() {
        let x: Vec<f64> = (0..10_013).map(|i| libm::sin(i as f64 * 0.01)).collect();
        assert_eq!(normalize_and_decimate(&x, 1000.0, 50.0).unwrap().len(), 500);
    }

    #[test]
    fn pentadiagonal_solve_matches_dense() {
        let n = 9;
        let mut p = Penta::zeros(n);
        p.add_weighted(&MA, &[1.0; 9]);
        p.add_weighted(&[3.0, -1.0, 0.5], &[2.0; 9]);
        for v in p.d0.iter_mut() {
            *v += 0.1;
        }
        let dense = |i: usize, j: usize| -> f64 {
            let (a, b) = if i >= j { (i, j) } else { (j, i) };
            match a - b {
                0 => p.d0[a],
                1 => p.d1[a],
                2 => p.d2[a],
                _ => 0.0,
            }
        };
        let a: Vec<f64> = (0..n * n).map(|k| dense(k / n, k % n)).collect();
        let f = Penta { d0: p.d0.clone(), d1: p.d1.clone(), d2: p.d2.clone() }.factor().unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let mut x = b.clone();
        f.solve(&mut x);
        for i in 0..n {
            let r: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_input_gives_zero_components() {
        let y = vec![0.0; 1200];
        let c = cvxeda_decompose(&y, 50.0, &CvxEdaParams::default()).unwrap();
        assert!(c.scl.iter().chain(&c.scr).chain(&c.smna).all(|v| v.abs() < 1e-8));
        assert!(c.kkt_residual <= 1e-6);
    }
}
