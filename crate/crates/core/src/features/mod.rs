//! Feature families and the canonical registry.
//!
//! Every family is a pure function of one analysis window. Families emit
//! their values in registry order; [`registry`] fixes the global column
//! order used by every output file.

pub mod complexity;
pub mod eda;
pub mod graph;
pub mod hos;
pub mod linear;
pub mod phase_space;
pub mod poincare;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Signal a feature is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Rr,
    Scl,
    Scr,
    Smna,
    SclScr,
    SclScrRr,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Rr => "RR",
            Source::Scl => "SCL",
            Source::Scr => "SCR",
            Source::Smna => "SMNA",
            Source::SclScr => "SCL+SCR",
            Source::SclScrRr => "SCL+SCR+RR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    TemporalRr,
    Scl,
    Scr,
    Smna,
    Geometric,
    SpectralRr,
    EdaSymp,
    Combined,
    Poincare,
    Fractal,
    Dfa,
    Symbolic,
    Attention,
    ComEda,
    Rqa,
    Entropy,
    Bispectrum,
    Graph,
}

impl Family {
    pub const ALL: [Family; 18] = [
        Family::TemporalRr,
        Family::Scl,
        Family::Scr,
        Family::Smna,
        Family::Geometric,
        Family::SpectralRr,
        Family::EdaSymp,
        Family::Combined,
        Family::Poincare,
        Family::Fractal,
        Family::Dfa,
        Family::Symbolic,
        Family::Attention,
        Family::ComEda,
        Family::Rqa,
        Family::Entropy,
        Family::Bispectrum,
        Family::Graph,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::TemporalRr | Family::Scl | Family::Scr | Family::Smna => "temporal",
            Family::Geometric => "geometrical",
            Family::SpectralRr | Family::EdaSymp | Family::Combined => "frequency",
            Family::Poincare => "lagged Poincare",
            Family::Fractal => "fractal",
            Family::Dfa => "DFA",
            Family::Symbolic => "symbolic dynamics",
            Family::Attention => "attention entropy",
            Family::ComEda => "phase-space entropy",
            Family::Rqa => "RQA",
            Family::Entropy => "entropy",
            Family::Bispectrum => "higher-order spectra",
            Family::Graph => "visibility graph",
        }
    }

    pub fn source(self) -> Source {
        match self {
            Family::Scl => Source::Scl,
            Family::Scr | Family::ComEda => Source::Scr,
            Family::Smna => Source::Smna,
            Family::EdaSymp => Source::SclScr,
            Family::Combined => Source::SclScrRr,
            _ => Source::Rr,
        }
    }

    /// Feature names of this family, in emission order.
    pub fn names(self) -> Vec<String> {
        let fixed: &[&str] = match self {
            Family::TemporalRr => &[
                "meanRR", "stdRR", "SDSD", "RMSSD", "NN50", "pNN50", "meanDER1", "stdDER1", "meanDER2", "stdDER2",
                "SkewRR", "KurtRR",
            ],
            Family::Scl => &[
                "SCL_mean",
                "SCL_median",
                "SCL_std",
                "SCL_MAD",
                "SCL_meanWin",
                "SCL_medWin",
                "SCL_stdWin",
                "SCL_MADWin",
            ],
            Family::Scr => &[
                "SCR_mean",
                "SCR_median",
                "SCR_std",
                "SCR_MAD",
                "SCR_Npeaks",
                "SCR_MaxPeak",
                "SCR_AmpSum",
                "SCR_meanWin",
                "SCR_medWin",
                "SCR_stdWin",
                "SCR_MADWin",
                "SCR_AmpSumWin",
            ],
            Family::Smna => &["SMNA_mean", "SMNA_MaxPeak", "SMNA_Npeaks", "SMNA_AmpSum"],
            Family::Geometric => &["TriRR", "TINN"],
            Family::SpectralRr => {
                &["LF_power", "HF_power", "LF_perc", "HF_perc", "LF_nu", "HF_nu", "LF/HF", "LF_peak", "HF_peak"]
            }
            Family::EdaSymp => {
                &["EDASymp", "EDASymp_db", "EDASymp_nu", "EDASymp_Welch", "EDASymp_db_Welch", "EDASymp_nu_Welch"]
            }
            Family::Combined => &["EDASymp/HF", "EDASymp_Welch/HF"],
            Family::Poincare => {
                let mut v = Vec::with_capacity(66);
                for base in poincare::CURVES {
                    for m in 1..=poincare::MAX_LAG {
                        v.push(format!("{base}_M{m}"));
                    }
                }
                for auc in poincare::AUC_NAMES {
                    v.push(auc.to_string());
                }
                return v;
            }
            Family::Fractal => &["FracDim", "HurstExp"],
            Family::Dfa => &["DFA_alpha1", "DFA_alpha2"],
            Family::Symbolic => &["v0", "v2", "c1v", "c3v"],
            Family::Attention => &["AttEn_maxmax", "AttEn_minmin", "AttEn_maxmin", "AttEn_minmax", "AttEn_mean"],
            Family::ComEda => &["ComEDA", "MComEDA"],
            Family::Rqa => {
                &["rec_rate", "det", "avg_diag", "ratio", "ent", "lam", "trap_time", "max_len", "mean_rec_time"]
            }
            Family::Entropy => &["SampEn", "FuzzyEn", "DistEn"],
            Family::Bispectrum => &[
                "Phase_Entr",
                "Mean_Magn",
                "Mean_P",
                "std_P",
                "N_Bis_Ent",
                "N_Bis_Sq_Ent",
                "Sum_log_Amp",
                "LL_RR",
                "LH_RR",
                "HH_RR",
            ],
            Family::Graph => &["ShortPathLen", "GlobClusterCoef", "mean_LocalClusterCoef", "mean_Degree"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            Family::Poincare => 66,
            f => f.names().len(),
        }
    }
}

/// One registry entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub family: Family,
    pub source: Source,
}

/// The canonical ordered feature registry.
pub fn registry() -> Vec<FeatureSpec> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for name in family.names() {
            out.push(FeatureSpec { name, family, source: family.source() });
        }
    }
    out
}

pub fn feature_names() -> Vec<String> {
    registry().into_iter().map(|s| s.name).collect()
}

/// Tunable parameters of every family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureParams {
    pub lf_band: [f64; 2],
    pub hf_band: [f64; 2],
    pub total_band: [f64; 2],
    /// Welch segment length (s) for both the RR and EDA spectra.
    pub welch_segment: f64,
    pub welch_overlap: f64,
    pub edasymp_band: [f64; 2],
    pub edasymp_norm_band: [f64; 2],
    /// Segment length (s) of the windowed SCL statistics.
    pub scl_segment: f64,
    /// Segment length (s) of the windowed SCR statistics.
    pub scr_segment: f64,
    pub peak_prominence: f64,
    /// Minimum peak separation (s).
    pub peak_separation: f64,
    /// Histogram bin width (s) of the geometric indices.
    pub histogram_bin: f64,
    pub dfa_short: [usize; 2],
    pub dfa_long: [usize; 2],
    pub symbolic_levels: usize,
    pub symbolic_a: f64,
    pub rqa: RqaParams,
    pub entropy_m: usize,
    pub entropy_r: f64,
    pub fuzzy_gradient: f64,
    pub dist_en_bins: usize,
    pub bispectrum_fmax: f64,
    pub phase_bins: usize,
    pub comeda: ComEdaParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RqaParams {
    pub m: usize,
    pub tau: usize,
    /// Threshold as a fraction of the largest phase-space distance.
    pub eps_fraction: f64,
    pub theiler: usize,
    pub l_min: usize,
    pub v_min: usize,
}

impl Default for RqaParams {
    fn default() -> Self {
        RqaParams { m: 10, tau: 1, eps_fraction: 0.15, theiler: 1, l_min: 2, v_min: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComEdaParams {
    pub m: usize,
    /// Upper bound (s) on the embedding delay.
    pub max_delay: f64,
    pub bins: usize,
    /// Histogram bins of the auto-mutual-information estimate.
    pub ami_bins: usize,
    pub scales: usize,
}

impl Default for ComEdaParams {
    fn default() -> Self {
        ComEdaParams { m: 3, max_delay: 2.0, bins: 256, ami_bins: 16, scales: 5 }
    }
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            lf_band: [0.04, 0.15],
            hf_band: [0.15, 0.4],
            total_band: [0.003, 0.4],
            welch_segment: 30.0,
            welch_overlap: 0.75,
            edasymp_band: [0.045, 0.25],
            edasymp_norm_band: [0.008, 0.25],
            scl_segment: 20.0,
            scr_segment: 5.0,
            peak_prominence: 0.01,
            peak_separation: 1.0,
            histogram_bin: 1.0 / 128.0,
            dfa_short: [4, 16],
            dfa_long: [16, 64],
            symbolic_levels: 6,
            symbolic_a: 0.05,
            rqa: RqaParams::default(),
            entropy_m: 2,
            entropy_r: 0.2,
            fuzzy_gradient: 2.0,
            dist_en_bins: 512,
            bispectrum_fmax: 0.4,
            phase_bins: 64,
            comeda: ComEdaParams::default(),
        }
    }
}
