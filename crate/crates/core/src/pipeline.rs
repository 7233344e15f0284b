//! Window-level feature extraction: preprocessing and the family dispatch.
//!
//! A failing family never aborts the window. Its columns are filled with
//! NaN and a warning is recorded; the design assembly later imputes them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::dataset::SessionWindow;
use crate::eda::{cvxeda_decompose, normalize_and_decimate, CvxEdaParams, EdaComponents};
use crate::error::{Error, Result, Warning};
use crate::features::complexity::{attention_entropy_rr, dfa_rr, fractal_rr, symbolic_rr};
use crate::features::eda::{edasymp_features, scl_features, scr_features, smna_features};
use crate::features::graph::visibility_rr;
use crate::features::hos::bispectral_rr;
use crate::features::linear::{combined_ratios, geometric_rr, spectral_rr, temporal_rr};
use crate::features::phase_space::{comeda, entropy_rr, rqa_rr};
use crate::features::poincare::lagged_poincare;
use crate::features::{Family, FeatureParams, Source};
use crate::rr::{build_rr, detect_r_peaks, resample_rr, DetectorConfig, RrSeries, UniformSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionParams {
    pub detector: DetectorConfig,
    /// Uniform resampling rate of the RR series (Hz).
    pub rr_fs: f64,
    /// Rate of the decimated EDA trace fed to the decomposition (Hz).
    pub eda_fs: f64,
    pub cvxeda: CvxEdaParams,
    pub features: FeatureParams,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            detector: DetectorConfig::default(),
            rr_fs: 4.0,
            eda_fs: 50.0,
            cvxeda: CvxEdaParams::default(),
            features: FeatureParams::default(),
        }
    }
}

/// Preprocessed signals of one window.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub rr: Result<(RrSeries, UniformSeries)>,
    pub eda: Result<EdaComponents>,
}

fn prepare_rr(ecg: &[f64], fs: f64, p: &ExtractionParams) -> Result<(RrSeries, UniformSeries)> {
    let beats = detect_r_peaks(ecg, fs, &p.detector)?;
    let rr = build_rr(&beats)?;
    let u = resample_rr(&rr, p.rr_fs)?;
    Ok((rr, u))
}

fn prepare_eda(eda: &[f64], fs: f64, p: &ExtractionParams) -> Result<EdaComponents> {
    let y = normalize_and_decimate(eda, fs, p.eda_fs)?;
    cvxeda_decompose(&y, p.eda_fs, &p.cvxeda)
}

pub fn prepare(w: &SessionWindow, p: &ExtractionParams) -> Prepared {
    Prepared { rr: prepare_rr(&w.ecg, w.fs_phys, p), eda: prepare_eda(&w.eda, w.fs_phys, p) }
}

/// Column offset of every family in the registry.
pub fn family_offsets() -> Vec<(Family, usize)> {
    let mut off = 0;
    Family::ALL
        .iter()
        .map(|&f| {
            let o = off;
            off += f.len();
            (f, o)
        })
        .collect()
}

fn offset_of(family: Family) -> usize {
    family_offsets().into_iter().find(|(f, _)| *f == family).map(|(_, o)| o).unwrap_or(0)
}

fn upstream<T>(r: &Result<T>, what: &str) -> Result<T>
where
    T: Clone,
{
    r.clone().map_err(|e| Error::Data(format!("{what} preprocessing failed: {e}")))
}

/// Values of one family. `done` holds the registry-ordered values of the
/// families computed so far (the combined ratios reuse earlier columns).
pub fn family_values(
    family: Family,
    prep: &Prepared,
    p: &ExtractionParams,
    done: &[f64],
    warnings: &mut Vec<Warning>,
) -> Result<Vec<f64>> {
    let fp = &p.features;
    let rr = || upstream(&prep.rr, "RR");
    let eda = || upstream(&prep.eda, "EDA");
    let intervals = || rr().map(|(s, _)| s.intervals);
    match family {
        Family::TemporalRr => temporal_rr(&rr()?.0),
        Family::Geometric => geometric_rr(&rr()?.0, fp.histogram_bin),
        Family::SpectralRr => spectral_rr(&rr()?.1, fp, warnings).map(|(v, _)| v),
        Family::Scl => {
            let c = eda()?;
            scl_features(&c.scl, c.fs, fp)
        }
        Family::Scr => {
            let c = eda()?;
            scr_features(&c.scr, c.fs, fp)
        }
        Family::Smna => {
            let c = eda()?;
            smna_features(&c.smna, c.fs, fp)
        }
        Family::EdaSymp => {
            let c = eda()?;
            edasymp_features(&c.scl, &c.scr, c.fs, fp)
        }
        Family::Combined => {
            let sym = offset_of(Family::EdaSymp);
            let hf = offset_of(Family::SpectralRr) + 1;
            let get = |i: usize| done.get(i).copied().unwrap_or(f64::NAN);
            let (a, b, h) = (get(sym), get(sym + 3), get(hf));
            if !(a.is_finite() && b.is_finite() && h.is_finite()) {
                return Err(Error::Data("EDASymp or HF power unavailable".into()));
            }
            combined_ratios(a, b, h)
        }
        Family::Poincare => lagged_poincare(&intervals()?, warnings),
        Family::Fractal => fractal_rr(&intervals()?, warnings),
        Family::Dfa => dfa_rr(&intervals()?, fp.dfa_short, fp.dfa_long),
        Family::Symbolic => symbolic_rr(&intervals()?, fp.symbolic_levels, fp.symbolic_a, warnings),
        Family::Attention => attention_entropy_rr(&intervals()?, warnings),
        Family::ComEda => {
            let c = eda()?;
            comeda(&c.scr, c.fs, &fp.comeda, warnings)
        }
        Family::Rqa => rqa_rr(&intervals()?, &fp.rqa, warnings),
        Family::Entropy => {
            entropy_rr(&intervals()?, fp.entropy_m, fp.entropy_r, fp.fuzzy_gradient, fp.dist_en_bins, warnings)
        }
        Family::Bispectrum => bispectral_rr(&rr()?.1, fp),
        Family::Graph => visibility_rr(&intervals()?),
    }
}

/// Feature vector of one window in registry order, plus warnings.
pub fn extract_features(w: &SessionWindow, p: &ExtractionParams) -> (Vec<f64>, Vec<Warning>) {
    let prep = prepare(w, p);
    extract_prepared(&prep, p)
}

pub fn extract_prepared(prep: &Prepared, p: &ExtractionParams) -> (Vec<f64>, Vec<Warning>) {
    let mut warnings = Vec::new();
    if let Err(e) = &prep.rr {
        warnings.push(Warning::new("rr-prep", format!("{e}")));
    }
    if let Err(e) = &prep.eda {
        warnings.push(Warning::new("eda-decomp", format!("{e}")));
    }
    let mut values = Vec::with_capacity(162);
    for family in Family::ALL {
        let n = family.len();
        let upstream_failed = match family.source() {
            Source::Rr => prep.rr.is_err(),
            Source::SclScrRr => prep.rr.is_err() || prep.eda.is_err(),
            _ => prep.eda.is_err(),
        };
        let out = family_values(family, prep, p, &values, &mut warnings);
        match out {
            Ok(v) if v.len() == n => values.extend(v),
            Ok(v) => {
                warnings.push(Warning::new(
                    family.label(),
                    format!("{:?} returned {} values, expected {n}", family, v.len()),
                ));
                values.extend(vec![f64::NAN; n]);
            }
            Err(e) => {
                if !upstream_failed {
                    warnings.push(Warning::new(family.label(), format!("{family:?}: {e}")));
                }
                values.extend(vec![f64::NAN; n]);
            }
        }
    }
    (values, warnings)
}
