use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use physiosel_core::dataset::{natural_cmp, DesignRow, RawSession, RowKey, ECG, EDA};

use crate::config::DataConfig;
use crate::error::{CliError, Result};

fn data_file(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}

/// Participants to load: the configured list, or every file stem present in
/// both the signal and the annotation directory, in natural order.
pub fn participants(cfg: &DataConfig) -> Result<Vec<String>> {
    for dir in [&cfg.physiological_dir, &cfg.annotation_dir] {
        if !dir.is_dir() {
            return Err(CliError::Config(format!("data directory {} does not exist", dir.display())));
        }
    }
    let mut out: Vec<String> = if cfg.participants.is_empty() {
        let rd = std::fs::read_dir(&cfg.physiological_dir).map_err(|e| CliError::io(&cfg.physiological_dir, e))?;
        let mut v = Vec::new();
        for entry in rd {
            let path = entry.map_err(|e| CliError::io(&cfg.physiological_dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some(cfg.extension.as_str()) {
                continue;
            }
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                if data_file(&cfg.annotation_dir, stem, &cfg.extension).is_file() {
                    v.push(stem.to_string());
                }
            }
        }
        v
    } else {
        cfg.participants.clone()
    };
    out.sort_by(|a, b| natural_cmp(a, b));
    for p in &out {
        for dir in [&cfg.physiological_dir, &cfg.annotation_dir] {
            let f = data_file(dir, p, &cfg.extension);
            if !f.is_file() {
                return Err(CliError::Config(format!("missing data file {}", f.display())));
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("no participant files found".into()));
    }
    Ok(out)
}

/// Canonical spelling of a label: integral numbers lose their fraction.
pub fn normalize_label(s: &str) -> String {
    let t = s.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", v as i64),
        _ => t.to_string(),
    }
}

struct Columns {
    numeric: Vec<Vec<f64>>,
    labels: Vec<String>,
}

fn read_columns(path: &Path, delimiter: char, numeric: &[&str], label: &str) -> Result<Columns> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr =
        csv::ReaderBuilder::new().delimiter(delimiter as u8).trim(csv::Trim::All).from_reader(BufReader::new(file));
    let parse_err = |line: u64, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("column '{name}' not found in {}", path.display())))
    };
    let idx: Vec<usize> = numeric.iter().map(|n| find(n)).collect::<Result<_>>()?;
    let lab = find(label)?;
    let mut cols = vec![Vec::new(); numeric.len()];
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        for (c, &i) in cols.iter_mut().zip(&idx) {
            let field = rec.get(i).unwrap_or("");
            let v = field
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("'{}' is not a number in column '{}'", field, &headers[i])))?;
            c.push(v);
        }
        labels.push(normalize_label(rec.get(lab).unwrap_or("")));
    }
    Ok(Columns { numeric: cols, labels })
}

/// Reads one participant's signal and annotation files.
pub fn load_session(cfg: &DataConfig, participant: &str) -> Result<RawSession> {
    let c = &cfg.columns;
    let phys_path = data_file(&cfg.physiological_dir, participant, &cfg.extension);
    let mut phys = read_columns(&phys_path, cfg.delimiter, &[&c.phys_time, &c.ecg, &c.eda], &c.phys_video)?;
    let annot_path = data_file(&cfg.annotation_dir, participant, &cfg.extension);
    let mut ann = read_columns(&annot_path, cfg.delimiter, &[&c.annot_time, &c.arousal], &c.annot_video)?;
    let scale = |v: Vec<f64>| v.into_iter().map(|t| t * cfg.time_scale).collect::<Vec<f64>>();
    let eda = phys.numeric.pop().unwrap();
    let ecg = phys.numeric.pop().unwrap();
    let phys_time = scale(phys.numeric.pop().unwrap());
    let arousal = ann.numeric.pop().unwrap();
    let annot_time = scale(ann.numeric.pop().unwrap());
    let mut channels = BTreeMap::new();
    channels.insert(ECG.to_string(), ecg);
    channels.insert(EDA.to_string(), eda);
    Ok(RawSession {
        participant_id: participant.to_string(),
        fs_phys: cfg.fs_phys,
        phys_time,
        channels,
        phys_labels: phys.labels,
        fs_annot: cfg.fs_annot,
        annot_time,
        arousal,
        annot_labels: ann.labels,
    })
}

pub const HASH_PREFIX: &str = "# config_sha256=";

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn write_features(path: &Path, hash: &str, names: &[String], rows: &[DesignRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "{HASH_PREFIX}{hash}").map_err(io)?;
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["participant".to_string(), "video".into(), "response".into()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header).map_err(|e| CliError::Data(e.to_string()))?;
    for r in rows {
        let mut rec = vec![r.key.participant.clone(), r.key.video.clone(), fmt17(r.response)];
        rec.extend(names.iter().map(|n| fmt17(r.features[n])));
        wtr.write_record(&rec).map_err(|e| CliError::Data(e.to_string()))?;
    }
    wtr.flush().map_err(io)?;
    Ok(())
}

pub struct FeatureFile {
    pub config_hash: Option<String>,
    pub names: Vec<String>,
    pub rows: Vec<DesignRow>,
}

pub fn read_features(path: &Path, stage_missing: &'static str) -> Result<FeatureFile> {
    if !path.is_file() {
        return Err(CliError::Dependency { stage: stage_missing, path: path.to_path_buf() });
    }
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first).map_err(|e| CliError::io(path, e))?;
    let config_hash = first.trim_end().strip_prefix(HASH_PREFIX).map(str::to_string);
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let parse_err = |line: u64, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.len() < 4 || &headers[0] != "participant" || &headers[1] != "video" || &headers[2] != "response" {
        return Err(parse_err(
            if config_hash.is_some() { 2 } else { 1 },
            "header must start with participant,video,response and list at least one feature".into(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(3).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("'{}' is not a number (column '{}')", &rec[i], &headers[i])))
        };
        let response = num(2)?;
        let mut features = BTreeMap::new();
        for (j, n) in names.iter().enumerate() {
            features.insert(n.clone(), num(3 + j)?);
        }
        rows.push(DesignRow { key: RowKey::new(&rec[0], &rec[1]), features, response });
    }
    Ok(FeatureFile { config_hash, names, rows })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path, stage: &'static str) -> Result<String> {
    if !path.is_file() {
        return Err(CliError::Dependency { stage, path: path.to_path_buf() });
    }
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_normalized() {
        assert_eq!(normalize_label(" 3.0 "), "3");
        assert_eq!(normalize_label("3.5"), "3.5");
        assert_eq!(normalize_label("fear"), "fear");
    }

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
