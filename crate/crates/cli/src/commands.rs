//! The pipeline stages. Each stage reads its inputs from the output
//! directory and writes its artifacts there, so stages can be rerun alone.

use std::path::{Path, PathBuf};

use log::{info, warn};
use physiosel_core::dataset::{
    assemble_design, compute_response, extract_window, row_from_values, DesignRow, FeatureMatrix, RowKey,
    SessionRecording,
};
use physiosel_core::features::feature_names;
use physiosel_core::linalg::Matrix;
use physiosel_core::mixed::{fit_lmer, fit_rlmer, model_summary, MixedModelFit, ModelSummary};
use physiosel_core::pipeline::extract_features;
use physiosel_core::synth::{run_fdr_experiment, FdrReport, SynthSpec};
use physiosel_core::trex::{FdpEstimator, Selector, Variant};
use physiosel_core::{Error as CoreError, Executor, Warning};
use serde::{Deserialize, Serialize};

use crate::config::{BenchDesign, PipelineConfig};
use crate::error::{CliError, Result};
use crate::exec::RayonExecutor;
use crate::io::{
    fmt17, load_session, normalize_label, participants, read_features, read_text, write_features, write_text,
};
use crate::svg::{bar_chart, scatter_panels, Panel};

pub const FEATURES_FILE: &str = "features.csv";
pub const SELECTION_FILE: &str = "selection.json";
pub const SWEEP_PLOT: &str = "alpha_sweep.svg";
pub const MODEL_FILE: &str = "model.json";
pub const EFFECTS_PLOT: &str = "effects.svg";
pub const REPORT_FILE: &str = "report.txt";
pub const REPORT_SELECTION: &str = "report_selection.csv";
pub const REPORT_MODELS: &str = "report_models.csv";
pub const FDR_REPORT: &str = "fdr_report.csv";

/// Effective configuration plus the worker pool shared by every stage.
pub struct Context {
    pub cfg: PipelineConfig,
    pub exec: RayonExecutor,
}

impl Context {
    pub fn new(cfg: PipelineConfig, threads: Option<usize>) -> Result<Self> {
        cfg.validate()?;
        Ok(Context { cfg, exec: RayonExecutor::new(threads)? })
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn ensure_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.cfg.output_dir).map_err(|e| CliError::io(&self.cfg.output_dir, e))
    }
}

fn log_warnings(context: &str, warnings: &[Warning]) {
    for w in warnings {
        warn!("{context}: {w}");
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub rows: usize,
    /// Windows that could not be cut from the recording.
    pub skipped: Vec<(RowKey, String)>,
    pub path: PathBuf,
}

/// Features of every (participant, video) window, written to `features.csv`.
/// Missing feature values are imputed; a window that cannot be cut at all
/// is skipped and reported.
pub fn extract(ctx: &Context) -> Result<ExtractSummary> {
    let cfg = &ctx.cfg;
    let names = feature_names();
    let videos: Vec<String> = cfg.data.videos.iter().map(|v| normalize_label(v)).collect();
    let mut rows: Vec<DesignRow> = Vec::new();
    let mut skipped = Vec::new();
    for pid in participants(&cfg.data)? {
        let raw = load_session(&cfg.data, &pid)?;
        let rec = SessionRecording::from_raw(raw).map_err(|e| CliError::Data(format!("participant {pid}: {e}")))?;
        let mut windows = Vec::new();
        for v in &videos {
            match extract_window(&rec, v, cfg.window) {
                Ok(w) => windows.push(w),
                Err(e @ (CoreError::Window { .. } | CoreError::Data(_))) => {
                    warn!("participant {pid}, video {v}: skipped: {e}");
                    skipped.push((RowKey::new(pid.clone(), v.clone()), e.to_string()));
                }
                Err(e) => return Err(e.into()),
            }
        }
        let params = &cfg.extraction;
        let done = ctx.exec.map(windows.len(), |i| {
            let w = &windows[i];
            let (values, warnings) = extract_features(w, params);
            (compute_response(w), values, warnings)
        });
        for (w, (response, values, warnings)) in windows.iter().zip(done) {
            let key = RowKey::new(w.participant_id.clone(), w.video_id.clone());
            log_warnings(&format!("participant {}, video {}", key.participant, key.video), &warnings);
            let response = match response {
                Ok(r) if r.is_finite() => r,
                Ok(_) | Err(_) => {
                    warn!("participant {}, video {}: skipped: no usable arousal samples", key.participant, key.video);
                    skipped.push((key, "no usable arousal samples".into()));
                    continue;
                }
            };
            rows.push(row_from_values(key, &names, &values, response));
        }
        info!("participant {pid}: {} windows", windows.len());
    }
    if rows.is_empty() {
        return Err(CliError::Data("no window could be extracted".into()));
    }
    let (fm, warnings) = assemble_design(rows, &names, false)?;
    log_warnings("imputation", &warnings);
    let imputed: Vec<DesignRow> = (0..fm.x.nrows())
        .map(|i| {
            let values: Vec<f64> = (0..fm.x.ncols()).map(|j| fm.x.get(i, j)).collect();
            row_from_values(fm.row_keys[i].clone(), &names, &values, fm.y[i])
        })
        .collect();
    ctx.ensure_out_dir()?;
    let path = ctx.out(FEATURES_FILE);
    write_features(&path, &cfg.hash(), &names, &imputed)?;
    Ok(ExtractSummary { rows: imputed.len(), skipped, path })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub name: String,
    pub phi: f64,
    pub phi_penalized: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub alpha: f64,
    pub selected: Vec<String>,
    pub selected_pct: f64,
    pub v: f64,
    pub t: usize,
    pub l: usize,
    pub rho: Option<f64>,
    pub fdp_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    pub config_sha256: String,
    pub features_config_sha256: Option<String>,
    pub alpha: f64,
    pub k: usize,
    pub seed: u64,
    pub variant: Variant,
    pub estimator: FdpEstimator,
    pub n_rows: usize,
    pub n_features: usize,
    pub v: f64,
    pub t: usize,
    pub l: usize,
    pub rho: Option<f64>,
    pub fdp_hat: f64,
    pub selected: Vec<String>,
    pub selected_pct: f64,
    pub features: Vec<FeatureScore>,
    pub sweep: Vec<SweepEntry>,
    pub warnings: Vec<String>,
    pub config: PipelineConfig,
}

fn standardized_design(ctx: &Context) -> Result<(FeatureMatrix, Option<String>, Vec<Warning>)> {
    let ff = read_features(&ctx.out(FEATURES_FILE), "extract")?;
    let (fm, warnings) = assemble_design(ff.rows, &ff.names, true)?;
    Ok((fm, ff.config_hash, warnings))
}

fn pct_label(a: f64) -> String {
    let s = format!("{:.2}", 100.0 * a);
    format!("{}%", s.trim_end_matches('0').trim_end_matches('.'))
}

/// FDR-controlled selection on the standardized design.
pub fn select(ctx: &Context) -> Result<SelectionFile> {
    let cfg = &ctx.cfg;
    let (fm, features_hash, warnings) = standardized_design(ctx)?;
    log_warnings("design", &warnings);
    let alpha = cfg.selector.alpha;
    let mut selector = Selector::new(&fm.x, &fm.y, cfg.selector.trex.clone(), &ctx.exec)?;
    let res = selector.select(alpha)?;
    let names = |idx: &[usize]| idx.iter().map(|&j| fm.col_names[j].clone()).collect::<Vec<_>>();
    let features = fm
        .col_names
        .iter()
        .enumerate()
        .map(|(j, n)| FeatureScore {
            name: n.clone(),
            phi: res.phi[j],
            phi_penalized: res.phi_penalized[j],
            selected: res.selected.contains(&j),
        })
        .collect();
    let p = fm.x.ncols();
    let file = SelectionFile {
        config_sha256: cfg.hash(),
        features_config_sha256: features_hash,
        alpha,
        k: res.k,
        seed: res.seed,
        variant: res.variant,
        estimator: res.estimator,
        n_rows: fm.x.nrows(),
        n_features: p,
        v: res.v,
        t: res.t,
        l: res.l,
        rho: res.rho,
        fdp_hat: res.fdp_hat,
        selected: names(&res.selected),
        selected_pct: 100.0 * res.selected.len() as f64 / p as f64,
        features,
        sweep: res
            .sweep
            .iter()
            .map(|c| SweepEntry {
                alpha: c.alpha,
                selected: names(&c.selected),
                selected_pct: c.selected_pct,
                v: c.v,
                t: c.t,
                l: c.l,
                rho: c.rho,
                fdp_hat: c.fdp_hat,
            })
            .collect(),
        warnings: warnings.iter().map(|w| w.to_string()).collect(),
        config: cfg.clone(),
    };
    ctx.ensure_out_dir()?;
    write_json(&ctx.out(SELECTION_FILE), &file)?;
    let cats: Vec<String> = file.sweep.iter().map(|s| pct_label(s.alpha)).collect();
    let vals: Vec<f64> = file.sweep.iter().map(|s| s.selected_pct).collect();
    let svg = bar_chart("Selected features by target FDR", &cats, &vals, "target FDR", "selected features (%)");
    write_text(&ctx.out(SWEEP_PLOT), &svg)?;
    Ok(file)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, stage: &'static str) -> Result<T> {
    let text = read_text(path, stage)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        msg: e.to_string(),
    })
}

pub fn read_selection(ctx: &Context) -> Result<SelectionFile> {
    read_json(&ctx.out(SELECTION_FILE), "select")
}

pub fn read_model(ctx: &Context) -> Result<ModelFile> {
    read_json(&ctx.out(MODEL_FILE), "fit")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub config_sha256: String,
    pub selection_config_sha256: String,
    pub formula: String,
    pub predictors: Vec<String>,
    pub significance: f64,
    /// Predictors whose adjusted p-value is below `significance` in both fits.
    pub confirmed: Vec<String>,
    pub confirmation_rate: f64,
    pub classical: MixedModelFit,
    pub robust: MixedModelFit,
    pub classical_summary: ModelSummary,
    pub robust_summary: ModelSummary,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    NothingToFit,
    Fitted(Box<ModelFile>),
}

fn remove_stale(path: &Path) -> Result<()> {
    match std::fs::remove_file(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(CliError::io(path, e)),
    }
}

fn is_confirmed(fit: &MixedModelFit, name: &str, level: f64) -> bool {
    fit.coefficients.iter().any(|c| c.name == name && c.p_adj < level)
}

/// Classical and robust random-intercept fits of the selected predictors.
pub fn fit(ctx: &Context) -> Result<FitOutcome> {
    let cfg = &ctx.cfg;
    let sel = read_selection(ctx)?;
    let (fm, _, _) = standardized_design(ctx)?;
    if sel.selected.is_empty() {
        remove_stale(&ctx.out(MODEL_FILE))?;
        remove_stale(&ctx.out(EFFECTS_PLOT))?;
        return Ok(FitOutcome::NothingToFit);
    }
    let idx: Vec<usize> = sel
        .selected
        .iter()
        .map(|n| {
            fm.column_index(n)
                .ok_or_else(|| CliError::Data(format!("selected feature '{n}' is not a column of {FEATURES_FILE}")))
        })
        .collect::<Result<_>>()?;
    let cols: Vec<Vec<f64>> = idx.iter().map(|&j| fm.x.col(j).to_vec()).collect();
    let x = Matrix::from_columns(fm.x.nrows(), &cols);
    let groups = fm.group_ids();
    let classical = fit_lmer(&fm.y, &x, &sel.selected, &groups)?;
    let robust = fit_rlmer(&fm.y, &x, &sel.selected, &groups, &cfg.model.robust)?;
    let level = cfg.model.significance;
    let confirmed: Vec<String> = sel
        .selected
        .iter()
        .filter(|n| is_confirmed(&classical, n, level) && is_confirmed(&robust, n, level))
        .cloned()
        .collect();
    let model = ModelFile {
        config_sha256: cfg.hash(),
        selection_config_sha256: sel.config_sha256.clone(),
        formula: format!("response ~ {} + (1 | participant)", sel.selected.join(" + ")),
        predictors: sel.selected.clone(),
        significance: level,
        confirmation_rate: confirmed.len() as f64 / sel.selected.len() as f64,
        confirmed,
        classical_summary: model_summary(&classical),
        robust_summary: model_summary(&robust),
        classical,
        robust,
        config: cfg.clone(),
    };
    ctx.ensure_out_dir()?;
    write_json(&ctx.out(MODEL_FILE), &model)?;
    write_text(&ctx.out(EFFECTS_PLOT), &effects_plot(&fm, &idx, &model, ctx))?;
    Ok(FitOutcome::Fitted(Box::new(model)))
}

fn effects_plot(fm: &FeatureMatrix, idx: &[usize], model: &ModelFile, ctx: &Context) -> String {
    let classes = &ctx.cfg.data.classes;
    let groups: Vec<String> = fm
        .row_keys
        .iter()
        .map(|k| {
            classes.iter().find(|(v, _)| normalize_label(v) == k.video).map(|(_, c)| c.clone()).unwrap_or_default()
        })
        .collect();
    let intercept = model.classical.coefficients[0].estimate;
    let panels: Vec<Panel> = idx
        .iter()
        .enumerate()
        .map(|(s, &j)| Panel {
            title: fm.col_names[j].clone(),
            x: fm.x.col(j).to_vec(),
            y: fm.y.clone(),
            groups: groups.clone(),
            line: (intercept, model.classical.coefficients[s + 1].estimate),
        })
        .collect();
    scatter_panels(&panels, "mean arousal (standardized)")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub text: String,
    pub discoveries: usize,
    pub all_confirmed: bool,
}

fn fmt_p(p: f64) -> String {
    format!("{p:.3e}")
}

fn model_rows(label: &str, fit: &MixedModelFit, out: &mut Vec<Vec<String>>) {
    for c in &fit.coefficients {
        out.push(vec![
            label.to_string(),
            c.name.clone(),
            fmt17(c.estimate),
            fmt17(c.se),
            fmt17(c.t),
            fmt17(c.df),
            fmt17(c.p_raw),
            fmt17(c.p_adj),
        ]);
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Plain-text summary plus CSV tables of the selection and model stages.
pub fn report(ctx: &Context) -> Result<ReportSummary> {
    use std::fmt::Write;
    let sel = read_selection(ctx)?;
    let model = if sel.selected.is_empty() { None } else { Some(read_model(ctx)?) };
    let mut t = String::new();
    let _ = writeln!(t, "physiosel run summary");
    let _ = writeln!(t, "config_sha256: {}", ctx.cfg.hash());
    let _ = writeln!(t, "selection config_sha256: {}", sel.config_sha256);
    if let Some(h) = &sel.features_config_sha256 {
        let _ = writeln!(t, "features config_sha256: {h}");
    }
    if let Some(m) = &model {
        let _ = writeln!(t, "model config_sha256: {}", m.config_sha256);
    }
    let _ = writeln!(t);
    let _ = writeln!(t, "== Selection ==");
    let _ = writeln!(
        t,
        "target FDR {}, variant {}, K = {}, seed {}, {} rows x {} features",
        pct_label(sel.alpha),
        variant_name(sel.variant),
        sel.k,
        sel.seed,
        sel.n_rows,
        sel.n_features
    );
    let rho = sel.rho.map_or("none".to_string(), |r| format!("{r}"));
    let _ = writeln!(
        t,
        "calibration: v = {:.4}, T = {}, L = {}, rho = {rho}, estimated FDP = {:.4}",
        sel.v, sel.t, sel.l, sel.fdp_hat
    );
    if sel.selected.is_empty() {
        let _ = writeln!(t, "no discoveries at target FDR {}", pct_label(sel.alpha));
    } else {
        let _ =
            writeln!(t, "selected {} of {} features ({:.2}%):", sel.selected.len(), sel.n_features, sel.selected_pct);
        let _ = writeln!(t, "  {:<24} {:>8} {:>10}", "feature", "phi", "phi_pen");
        for f in sel.features.iter().filter(|f| f.selected) {
            let _ = writeln!(t, "  {:<24} {:>8.4} {:>10.4}", f.name, f.phi, f.phi_penalized);
        }
    }
    let _ = writeln!(t, "target FDR sweep:");
    let _ = writeln!(t, "  {:>8} {:>10} {:>10}  selected", "alpha", "selected%", "FDP_hat");
    for s in &sel.sweep {
        let _ = writeln!(
            t,
            "  {:>8} {:>10.2} {:>10.4}  {}",
            pct_label(s.alpha),
            s.selected_pct,
            s.fdp_hat,
            s.selected.join(", ")
        );
    }
    let mut model_csv = Vec::new();
    if let Some(m) = &model {
        let _ = writeln!(t);
        let _ = writeln!(t, "== Mixed models ==");
        let _ = writeln!(t, "formula: {}", m.formula);
        let _ = writeln!(
            t,
            "  {:<24} {:>22} {:>8} {:>10}   {:>22} {:>8} {:>10}",
            "term", "classical est (SE)", "t", "p_adj", "robust est (SE)", "t", "p_adj"
        );
        for (a, b) in m.classical.coefficients.iter().zip(&m.robust.coefficients) {
            let _ = writeln!(
                t,
                "  {:<24} {:>22} {:>8.3} {:>10}   {:>22} {:>8.3} {:>10}",
                a.name,
                format!("{:.3} ({:.3})", a.estimate, a.se),
                a.t,
                fmt_p(a.p_adj),
                format!("{:.3} ({:.3})", b.estimate, b.se),
                b.t,
                fmt_p(b.p_adj)
            );
        }
        let (c, r) = (&m.classical_summary, &m.robust_summary);
        let rows: [(&str, f64, f64); 8] = [
            ("marginal R2", c.marginal_r2, r.marginal_r2),
            ("conditional R2", c.conditional_r2, r.conditional_r2),
            ("AIC", c.aic, r.aic),
            ("BIC", c.bic, r.bic),
            ("ICC", c.icc, r.icc),
            ("RMSE", c.rmse, r.rmse),
            ("sigma (participant)", c.sigma_u, r.sigma_u),
            ("sigma (residual)", c.sigma_e, r.sigma_e),
        ];
        for (name, a, b) in rows {
            let _ = writeln!(t, "  {name:<24} {a:>22.3} {:>8} {:>10}   {b:>22.3}", "", "");
        }
        let _ = writeln!(t, "  {:<24} {:>22} {:>8} {:>10}   {:>22}", "observations", c.n_obs, "", "", r.n_obs);
        let _ = writeln!(t, "  {:<24} {:>22} {:>8} {:>10}   {:>22}", "participants", c.n_groups, "", "", r.n_groups);
        let rate = 100.0 * m.confirmation_rate;
        let _ = writeln!(
            t,
            "{} of {} selected predictors significant at adjusted p < {} in both models ({rate:.0}% confirmation rate)",
            m.confirmed.len(),
            m.predictors.len(),
            m.significance
        );
        model_rows("classical", &m.classical, &mut model_csv);
        model_rows("robust", &m.robust, &mut model_csv);
    }
    let _ = writeln!(t);
    let _ = writeln!(t, "== Files ==");
    let mut files = vec![FEATURES_FILE, SELECTION_FILE, SWEEP_PLOT];
    if model.is_some() {
        files.extend([MODEL_FILE, EFFECTS_PLOT, REPORT_MODELS]);
    }
    files.push(REPORT_SELECTION);
    for f in files {
        let _ = writeln!(t, "  {f}");
    }
    let _ = writeln!(t);
    let _ = writeln!(t, "== Configuration ==");
    let _ = writeln!(t, "{}", serde_json::to_string_pretty(&sel.config).map_err(|e| CliError::Data(e.to_string()))?);

    ctx.ensure_out_dir()?;
    let sel_rows: Vec<Vec<String>> = sel
        .features
        .iter()
        .map(|f| vec![f.name.clone(), fmt17(f.phi), fmt17(f.phi_penalized), f.selected.to_string()])
        .collect();
    write_csv(&ctx.out(REPORT_SELECTION), &["feature", "phi", "phi_penalized", "selected"], &sel_rows)?;
    if model.is_some() {
        write_csv(
            &ctx.out(REPORT_MODELS),
            &["model", "term", "estimate", "se", "t", "df", "p_raw", "p_adj"],
            &model_csv,
        )?;
    } else {
        remove_stale(&ctx.out(REPORT_MODELS))?;
    }
    write_text(&ctx.out(REPORT_FILE), &t)?;
    Ok(ReportSummary {
        discoveries: sel.selected.len(),
        all_confirmed: model.as_ref().is_some_and(|m| m.confirmation_rate == 1.0),
        text: t,
    })
}

/// Spec of one benchmark design; designs get distinct data seeds.
pub fn bench_spec(ctx: &Context, index: usize, d: &BenchDesign) -> SynthSpec {
    let b = &ctx.cfg.bench;
    let seed = b.seed.wrapping_add(1_000_003 * index as u64);
    SynthSpec::planted(b.n, b.p, d.support, d.effect, d.correlation, seed)
}

/// Runs one benchmark design with the configured selector parameters.
pub fn bench_design(ctx: &Context, index: usize, d: &BenchDesign) -> Result<FdrReport> {
    let b = &ctx.cfg.bench;
    let mut params = ctx.cfg.selector.trex.clone();
    params.seed = b.seed;
    Ok(run_fdr_experiment(&bench_spec(ctx, index, d), &b.alphas, &b.variants, b.reps, &params, &ctx.exec)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchLine {
    pub design: String,
    pub correlation: String,
    pub variant: Variant,
    pub alpha: f64,
    pub reps: usize,
    pub fdr: f64,
    pub fdr_se: f64,
    pub tpr: f64,
    pub tpr_se: f64,
    pub mean_selected: f64,
    /// `alpha + 3 SE`.
    pub bound: f64,
    pub pass: bool,
}

pub fn bench_lines(design: &BenchDesign, report: &FdrReport) -> Vec<BenchLine> {
    report
        .rows
        .iter()
        .map(|r| {
            let se = if r.fdr_se.is_finite() { r.fdr_se } else { 0.0 };
            let bound = r.alpha + 3.0 * se;
            BenchLine {
                design: design.name.clone(),
                correlation: design.correlation.label(),
                variant: r.variant,
                alpha: r.alpha,
                reps: r.reps,
                fdr: r.fdr,
                fdr_se: r.fdr_se,
                tpr: r.tpr,
                tpr_se: r.tpr_se,
                mean_selected: r.mean_selected,
                bound,
                pass: r.fdr <= bound,
            }
        })
        .collect()
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Plain => "plain",
        Variant::DaNn => "da-nn",
    }
}

/// Every configured design, written to `fdr_report.csv`.
pub fn synth_bench(ctx: &Context) -> Result<Vec<BenchLine>> {
    let mut lines = Vec::new();
    for (i, d) in ctx.cfg.bench.designs.iter().enumerate() {
        info!("benchmark design {} ({} repetitions)", d.name, ctx.cfg.bench.reps);
        let r = bench_design(ctx, i, d)?;
        lines.extend(bench_lines(d, &r));
    }
    ctx.ensure_out_dir()?;
    let rows: Vec<Vec<String>> = lines
        .iter()
        .map(|l| {
            vec![
                l.design.clone(),
                l.correlation.clone(),
                variant_name(l.variant).into(),
                format!("{}", l.alpha),
                l.reps.to_string(),
                fmt17(l.fdr),
                fmt17(l.fdr_se),
                fmt17(l.tpr),
                fmt17(l.tpr_se),
                fmt17(l.mean_selected),
                fmt17(l.bound),
                l.pass.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out(FDR_REPORT),
        &[
            "design",
            "correlation",
            "variant",
            "alpha",
            "reps",
            "fdr",
            "fdr_se",
            "tpr",
            "tpr_se",
            "mean_selected",
            "bound",
            "pass",
        ],
        &rows,
    )?;
    Ok(lines)
}

/// Human-readable benchmark table.
pub fn bench_table(lines: &[BenchLine]) -> String {
    let mut s = format!(
        "{:<18} {:<7} {:>6} {:>14} {:>14} {:>8} {:>7} {:>5}\n",
        "design", "variant", "alpha", "FDR (SE)", "TPR (SE)", "selected", "bound", "pass"
    );
    for l in lines {
        let tpr = if l.tpr.is_finite() { format!("{:.3} ({:.3})", l.tpr, l.tpr_se) } else { "-".into() };
        s.push_str(&format!(
            "{:<18} {:<7} {:>6} {:>14} {:>14} {:>8.2} {:>7.3} {:>5}\n",
            l.design,
            variant_name(l.variant),
            l.alpha,
            format!("{:.3} ({:.3})", l.fdr, l.fdr_se),
            tpr,
            l.mean_selected,
            l.bound,
            if l.pass { "yes" } else { "no" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages_are_trimmed() {
        assert_eq!(pct_label(0.1), "10%");
        assert_eq!(pct_label(0.05), "5%");
        assert_eq!(pct_label(0.125), "12.5%");
    }
}
