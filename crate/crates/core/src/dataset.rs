//! Recordings, analysis windows, the response and the design matrix.
//!
//! Time is measured in seconds. Physiological channels are uniformly
//! sampled from `phys_start`; the arousal trace lives on its own uniform
//! grid from `annot_start`. Stimulus labels are kept as contiguous runs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result, Warning};
use crate::linalg::Matrix;
use crate::stats::{mean, median, sd};

/// Canonical channel keys.
pub const ECG: &str = "ecg";
pub const EDA: &str = "eda";

/// Contiguous run of samples carrying one stimulus label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub video: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecording {
    pub participant_id: String,
    pub fs_phys: f64,
    pub fs_annot: f64,
    pub phys_start: f64,
    pub channels: BTreeMap<String, Vec<f64>>,
    pub phys_segments: Vec<Segment>,
    pub annot_start: f64,
    pub arousal: Vec<f64>,
    pub annot_segments: Vec<Segment>,
}

/// Column data of one participant, as read from disk.
#[derive(Debug, Clone, Default)]
pub struct RawSession {
    pub participant_id: String,
    pub fs_phys: f64,
    pub phys_time: Vec<f64>,
    pub channels: BTreeMap<String, Vec<f64>>,
    pub phys_labels: Vec<String>,
    pub fs_annot: f64,
    pub annot_time: Vec<f64>,
    pub arousal: Vec<f64>,
    pub annot_labels: Vec<String>,
}

fn check_monotone(t: &[f64], what: &str) -> Result<()> {
    for i in 1..t.len() {
        if !(t[i] > t[i - 1]) {
            return Err(Error::Data(format!(
                "{what} time is not strictly increasing at row {i} ({} after {})",
                t[i],
                t[i - 1]
            )));
        }
    }
    Ok(())
}

fn runs(labels: &[String]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match out.last_mut() {
            Some(s) if &s.video == l => s.len += 1,
            _ => out.push(Segment { video: l.clone(), start: i, len: 1 }),
        }
    }
    out
}

/// Linear interpolation of `(t, v)` onto `t[0] + k / fs`. Each grid sample
/// takes the label of the last raw sample at or before it.
pub fn regrid(t: &[f64], v: &[f64], labels: &[String], fs: f64) -> (Vec<f64>, Vec<String>) {
    if t.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let t0 = t[0];
    let span = t[t.len() - 1] - t0;
    let n = libm::floor(span * fs + 1e-6) as usize + 1;
    let mut vals = Vec::with_capacity(n);
    let mut labs = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let tk = t0 + k as f64 / fs;
        while j + 1 < t.len() && t[j + 1] <= tk + 1e-9 {
            j += 1;
        }
        let val = if j + 1 < t.len() && tk > t[j] {
            let w = (tk - t[j]) / (t[j + 1] - t[j]);
            v[j] + w * (v[j + 1] - v[j])
        } else {
            v[j]
        };
        vals.push(val);
        labs.push(labels[j].clone());
    }
    (vals, labs)
}

impl SessionRecording {
    /// Validates and aligns a participant's raw columns.
    pub fn from_raw(raw: RawSession) -> Result<Self> {
        if !(raw.fs_phys > 0.0) || !(raw.fs_annot > 0.0) {
            return Err(Error::Config(format!(
                "sampling rates must be positive (physiological {}, annotation {})",
                raw.fs_phys, raw.fs_annot
            )));
        }
        let n = raw.phys_time.len();
        if n == 0 || raw.annot_time.is_empty() {
            return Err(Error::Data(format!("participant {}: empty signal or annotation table", raw.participant_id)));
        }
        for (name, c) in &raw.channels {
            if c.len() != n {
                return Err(Error::Data(format!("channel '{name}' has {} samples, time column has {n}", c.len())));
            }
        }
        if raw.phys_labels.len() != n {
            return Err(Error::Data("physiological video labels do not match the time column".into()));
        }
        if raw.arousal.len() != raw.annot_time.len() || raw.annot_labels.len() != raw.annot_time.len() {
            return Err(Error::Data("annotation columns have different lengths".into()));
        }
        check_monotone(&raw.phys_time, "physiological")?;
        check_monotone(&raw.annot_time, "annotation")?;
        let (arousal, annot_labels) = regrid(&raw.annot_time, &raw.arousal, &raw.annot_labels, raw.fs_annot);
        Ok(SessionRecording {
            participant_id: raw.participant_id,
            fs_phys: raw.fs_phys,
            fs_annot: raw.fs_annot,
            phys_start: raw.phys_time[0],
            channels: raw.channels,
            phys_segments: runs(&raw.phys_labels),
            annot_start: raw.annot_time[0],
            arousal,
            annot_segments: runs(&annot_labels),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.channels.values().next().map_or(0, |c| c.len())
    }

    /// Stimulus labels in order of first appearance.
    pub fn videos(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in &self.phys_segments {
            if seen.insert(s.video.clone()) {
                out.push(s.video.clone());
            }
        }
        out
    }

    /// Longest run of `video` in the physiological stream.
    pub fn segment(&self, video: &str) -> Option<&Segment> {
        self.phys_segments.iter().filter(|s| s.video == video).fold(None, |best: Option<&Segment>, s| match best {
            Some(b) if b.len >= s.len => Some(b),
            _ => Some(s),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionWindow {
    pub participant_id: String,
    pub video_id: String,
    pub fs_phys: f64,
    pub fs_annot: f64,
    pub ecg: Vec<f64>,
    pub eda: Vec<f64>,
    pub arousal: Vec<f64>,
    /// End instant shared by every stream.
    pub t_end: f64,
}

/// Final `w` seconds of the segment labelled `video`.
pub fn extract_window(rec: &SessionRecording, video: &str, w: f64) -> Result<SessionWindow> {
    if !(w > 0.0) {
        return Err(Error::Config(format!("window length must be positive, got {w}")));
    }
    let seg = rec
        .segment(video)
        .ok_or_else(|| Error::Data(format!("participant {}: no samples for video '{video}'", rec.participant_id)))?;
    let channel =
        |name: &str| rec.channels.get(name).ok_or_else(|| Error::Config(format!("recording has no '{name}' channel")));
    let ecg = channel(ECG)?;
    let eda = channel(EDA)?;
    let available = seg.len as f64 / rec.fs_phys;
    let np = libm::round(w * rec.fs_phys) as usize;
    if np > seg.len {
        return Err(Error::Window { needed: w, available });
    }
    let end = seg.start + seg.len;
    let t_end = rec.phys_start + end as f64 / rec.fs_phys;

    let na = libm::round(w * rec.fs_annot) as usize;
    let a_end = libm::ceil((t_end - rec.annot_start) * rec.fs_annot - 1e-6);
    if a_end < na as f64 || a_end > rec.arousal.len() as f64 {
        let covered = (libm::fmin(a_end, rec.arousal.len() as f64) / rec.fs_annot).max(0.0);
        return Err(Error::Window { needed: w, available: covered.min(available) });
    }
    let a_end = a_end as usize;
    Ok(SessionWindow {
        participant_id: rec.participant_id.clone(),
        video_id: video.to_string(),
        fs_phys: rec.fs_phys,
        fs_annot: rec.fs_annot,
        ecg: ecg[end - np..end].to_vec(),
        eda: eda[end - np..end].to_vec(),
        arousal: rec.arousal[a_end - na..a_end].to_vec(),
        t_end,
    })
}

/// Mean arousal over the window.
pub fn compute_response(w: &SessionWindow) -> Result<f64> {
    if w.arousal.is_empty() {
        return Err(Error::Data(format!(
            "participant {}, video {}: empty arousal window",
            w.participant_id, w.video_id
        )));
    }
    Ok(mean(&w.arousal))
}

/// Compares strings with embedded digit runs by numeric value, so `p2 < p10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].is_ascii_digit() && b[j].is_ascii_digit() {
            let si = i;
            while i < a.len() && a[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let da = trim_zeros(&a[si..i]);
            let db = trim_zeros(&b[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            if a[i] != b[j] {
                return a[i].cmp(&b[j]);
            }
            i += 1;
            j += 1;
        }
    }
    (a.len() - i).cmp(&(b.len() - j)).then_with(|| a.cmp(b))
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().position(|&c| c != b'0').unwrap_or(d.len());
    &d[k..]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowKey {
    pub participant: String,
    pub video: String,
}

impl RowKey {
    pub fn new(participant: impl Into<String>, video: impl Into<String>) -> Self {
        RowKey { participant: participant.into(), video: video.into() }
    }

    pub fn natural_cmp(&self, other: &RowKey) -> Ordering {
        natural_cmp(&self.participant, &other.participant).then_with(|| natural_cmp(&self.video, &other.video))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub key: RowKey,
    pub features: BTreeMap<String, f64>,
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub row_keys: Vec<RowKey>,
    pub col_names: Vec<String>,
    pub standardized: bool,
}

impl FeatureMatrix {
    /// Zero-based participant index of every row, in order of appearance.
    pub fn group_ids(&self) -> Vec<usize> {
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        let mut out = Vec::with_capacity(self.row_keys.len());
        for k in &self.row_keys {
            let next = ids.len();
            out.push(*ids.entry(k.participant.as_str()).or_insert(next));
        }
        out
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.col_names.iter().position(|c| c == name)
    }
}

/// Builds the design matrix with columns in `col_order`.
///
/// Rows are sorted naturally by (participant, video). Non-finite feature
/// values are replaced by the column median of the finite values; a column
/// with no finite value, or a constant column when standardizing, becomes
/// all zeros. Each such repair is reported as a warning.
pub fn assemble_design(
    mut rows: Vec<DesignRow>,
    col_order: &[String],
    standardize: bool,
) -> Result<(FeatureMatrix, Vec<Warning>)> {
    if rows.is_empty() {
        return Err(Error::Data("no rows to assemble".into()));
    }
    rows.sort_by(|a, b| a.key.natural_cmp(&b.key));
    for w in rows.windows(2) {
        if w[0].key == w[1].key {
            return Err(Error::Data(format!(
                "duplicate row for participant {}, video {}",
                w[0].key.participant, w[0].key.video
            )));
        }
    }
    let wanted: BTreeSet<&str> = col_order.iter().map(|s| s.as_str()).collect();
    if wanted.len() != col_order.len() {
        return Err(Error::Config("duplicate feature name in column order".into()));
    }
    for r in &rows {
        if r.features.len() != col_order.len() || r.features.keys().any(|k| !wanted.contains(k.as_str())) {
            let missing = col_order.iter().find(|c| !r.features.contains_key(*c));
            let extra = r.features.keys().find(|k| !wanted.contains(k.as_str()));
            return Err(Error::Data(format!(
                "participant {}, video {}: feature set differs (missing {:?}, unexpected {:?})",
                r.key.participant, r.key.video, missing, extra
            )));
        }
        if !r.response.is_finite() {
            return Err(Error::Data(format!(
                "participant {}, video {}: non-finite response",
                r.key.participant, r.key.video
            )));
        }
    }
    let n = rows.len();
    let mut warnings = Vec::new();
    let mut cols = Vec::with_capacity(col_order.len());
    for name in col_order {
        let mut c: Vec<f64> = rows.iter().map(|r| r.features[name]).collect();
        let finite: Vec<f64> = c.iter().copied().filter(|v| v.is_finite()).collect();
        if finite.len() < n {
            let fill = if finite.is_empty() { 0.0 } else { median(&finite) };
            warnings.push(Warning::new(
                name.clone(),
                if finite.is_empty() {
                    format!("no finite values in {n} rows; column set to zero")
                } else {
                    format!("{} of {n} values non-finite; imputed with median {fill}", n - finite.len())
                },
            ));
            for v in c.iter_mut().filter(|v| !v.is_finite()) {
                *v = fill;
            }
        }
        if standardize && !finite.is_empty() && !standardize_column(&mut c) {
            warnings.push(Warning::new(name.clone(), "constant column; set to zero"));
            c.iter_mut().for_each(|v| *v = 0.0);
        } else if standardize && finite.is_empty() {
            c.iter_mut().for_each(|v| *v = 0.0);
        }
        cols.push(c);
    }
    let mut y: Vec<f64> = rows.iter().map(|r| r.response).collect();
    if standardize && !standardize_column(&mut y) {
        return Err(Error::Data("response is constant across rows".into()));
    }
    let row_keys = rows.into_iter().map(|r| r.key).collect();
    Ok((
        FeatureMatrix {
            x: Matrix::from_columns(n, &cols),
            y,
            row_keys,
            col_names: col_order.to_vec(),
            standardized: standardize,
        },
        warnings,
    ))
}

/// Z-scores with the sample SD; `false` for a constant or single-value column.
fn standardize_column(c: &mut [f64]) -> bool {
    let m = mean(c);
    let s = sd(c);
    if !(s > 0.0) || !(s > 1e-12 * libm::fabs(m)) {
        return false;
    }
    for v in c.iter_mut() {
        *v = (*v - m) / s;
    }
    true
}

/// Builds a design row from a feature vector in registry order.
pub fn row_from_values(key: RowKey, names: &[String], values: &[f64], response: f64) -> DesignRow {
    DesignRow { key, features: names.iter().cloned().zip(values.iter().copied()).collect(), response }
}

/// Feature vector of a window whose extraction failed entirely.
pub fn nan_row(p: usize) -> Vec<f64> {
    vec![f64::NAN; p]
}
