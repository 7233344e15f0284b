use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use physiosel_core::mixed::RobustParams;
use physiosel_core::pipeline::ExtractionParams;
use physiosel_core::synth::Correlation;
use physiosel_core::trex::{TrexParams, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Column names of the per-participant signal and annotation files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub phys_time: String,
    pub ecg: String,
    pub eda: String,
    pub phys_video: String,
    pub annot_time: String,
    pub arousal: String,
    pub annot_video: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            phys_time: "daqtime".into(),
            ecg: "ecg".into(),
            eda: "gsr".into(),
            phys_video: "video".into(),
            annot_time: "jstime".into(),
            arousal: "arousal".into(),
            annot_video: "video".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub physiological_dir: PathBuf,
    pub annotation_dir: PathBuf,
    /// File stems to load; empty means every stem present in both directories.
    pub participants: Vec<String>,
    pub extension: String,
    pub delimiter: char,
    /// Seconds per unit of the time columns.
    pub time_scale: f64,
    pub fs_phys: f64,
    pub fs_annot: f64,
    pub columns: ColumnMap,
    /// Stimulus labels analysed, in the video column's spelling.
    pub videos: Vec<String>,
    /// Optional stimulus class per video label, used to colour plots.
    pub classes: BTreeMap<String, String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            physiological_dir: PathBuf::from("data/interpolated/physiological"),
            annotation_dir: PathBuf::from("data/interpolated/annotations"),
            participants: Vec::new(),
            extension: "csv".into(),
            delimiter: ',',
            time_scale: 1e-3,
            fs_phys: 1000.0,
            fs_annot: 20.0,
            columns: ColumnMap::default(),
            videos: (1..=8).map(|v| v.to_string()).collect(),
            classes: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectorConfig {
    pub alpha: f64,
    #[serde(flatten)]
    pub trex: TrexParams,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig { alpha: 0.1, trex: TrexParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub robust: RobustParams,
    /// Adjusted p-value below which a selected predictor counts as confirmed.
    pub significance: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { robust: RobustParams::default(), significance: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchDesign {
    pub name: String,
    pub correlation: Correlation,
    /// Number of true columns, spread evenly over the design.
    pub support: usize,
    pub effect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub alphas: Vec<f64>,
    pub variants: Vec<Variant>,
    pub seed: u64,
    pub designs: Vec<BenchDesign>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let d =
            |name: &str, correlation, support, effect| BenchDesign { name: name.into(), correlation, support, effect };
        BenchConfig {
            n: 240,
            p: 164,
            reps: 100,
            alphas: vec![0.05, 0.1, 0.2],
            variants: vec![Variant::Plain, Variant::DaNn],
            seed: 2024,
            designs: vec![
                d("null", Correlation::Independent, 0, 0.0),
                d("planted", Correlation::Independent, 3, 0.3),
                d("ar1", Correlation::Ar1 { rho: 0.8 }, 3, 0.3),
                d("duplicated", Correlation::Duplicated { block: 2, twins_of_support: false }, 3, 0.3),
                d("duplicated-twins", Correlation::Duplicated { block: 2, twins_of_support: true }, 3, 0.3),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub data: DataConfig,
    /// Analysis window length (s).
    pub window: f64,
    pub extraction: ExtractionParams,
    pub selector: SelectorConfig,
    pub model: ModelConfig,
    pub bench: BenchConfig,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data: DataConfig::default(),
            window: 116.0,
            extraction: ExtractionParams::default(),
            selector: SelectorConfig::default(),
            model: ModelConfig::default(),
            bench: BenchConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Reads a JSON config. Relative data and output paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.data.physiological_dir, &mut cfg.data.annotation_dir, &mut cfg.output_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.window.is_nan() || self.window <= 0.0 {
            return bad(format!("window must be positive, got {}", self.window));
        }
        if !(self.data.fs_phys > 0.0 && self.data.fs_annot > 0.0 && self.data.time_scale > 0.0) {
            return bad("sampling rates and time_scale must be positive".into());
        }
        let a = self.selector.alpha;
        if !(a > 0.0 && a < 1.0) {
            return bad(format!("selector.alpha must lie in (0, 1), got {a}"));
        }
        if let Some(g) = self.selector.trex.alpha_grid.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
            return bad(format!("alpha grid entries must lie in (0, 1), got {g}"));
        }
        if self.selector.trex.k < 2 {
            return bad("the number of random experiments k must be at least 2".into());
        }
        if self.data.videos.is_empty() {
            return bad("data.videos is empty".into());
        }
        Ok(())
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 (hex) of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical_json().as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_hash_is_stable() {
        let c = PipelineConfig::default();
        let back: PipelineConfig = serde_json::from_str(&c.canonical_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.hash(), back.hash());
        assert_eq!(c.hash().len(), 64);
        let mut d = c.clone();
        d.selector.trex.seed = 1;
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn out_of_range_alpha_is_a_config_error() {
        let mut c = PipelineConfig::default();
        c.selector.alpha = 1.5;
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.selector.alpha = 0.1;
        c.selector.trex.alpha_grid = vec![0.0];
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: std::result::Result<PipelineConfig, _> = serde_json::from_str(r#"{"windw": 100}"#);
        assert!(r.is_err());
    }
}
