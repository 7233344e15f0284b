#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const FS_PHYS: f64 = 250.0;
pub const FS_ANNOT: f64 = 20.0;

const WAVES: [(f64, f64, f64); 5] =
    [(-0.20, 0.15, 0.025), (-0.03, -0.10, 0.010), (0.00, 1.00, 0.008), (0.03, -0.25, 0.010), (0.25, 0.30, 0.040)];

pub struct Recording {
    /// (label, seconds) of consecutive segments.
    pub segments: Vec<(String, f64)>,
    pub flat_ecg: bool,
    pub arousal_level: f64,
    pub seed: u64,
}

fn ecg(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| 0.01 * rng.random_range(-1.0..1.0)).collect();
    let mut b = 0.4;
    let end = n as f64 / FS_PHYS;
    while b < end {
        let lo = ((b - 0.4) * FS_PHYS).max(0.0) as usize;
        let hi = (((b + 0.5) * FS_PHYS) as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(hi).skip(lo) {
            let t = i as f64 / FS_PHYS - b;
            for (o, a, w) in WAVES {
                *v += a * (-0.5 * ((t - o) / w).powi(2)).exp();
            }
        }
        b += rng.random_range(0.75..0.95);
    }
    x
}

fn eda(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|i| 4.0 + 0.3 * (i as f64 / FS_PHYS / 60.0)).collect();
    let mut onset = 2.0;
    let end = n as f64 / FS_PHYS;
    while onset < end {
        let amp = rng.random_range(0.05..0.4);
        let start = (onset * FS_PHYS) as usize;
        for (i, v) in x.iter_mut().enumerate().skip(start) {
            let t = (i - start) as f64 / FS_PHYS;
            *v += amp * ((-t / 4.0).exp() - (-t / 0.7).exp());
        }
        onset += rng.random_range(5.0..15.0);
    }
    for v in &mut x {
        *v += 0.002 * Distribution::<f64>::sample(&StandardNormal, rng);
    }
    x
}

/// Writes the signal and annotation files of one participant.
pub fn write_recording(phys_dir: &Path, annot_dir: &Path, stem: &str, r: &Recording) {
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let total: f64 = r.segments.iter().map(|s| s.1).sum();
    let n = (total * FS_PHYS).round() as usize;
    let e = if r.flat_ecg { vec![0.0; n] } else { ecg(n, &mut rng) };
    let g = eda(n, &mut rng);
    let label_at = |t: f64| {
        let mut acc = 0.0;
        for (l, d) in &r.segments {
            acc += d;
            if t < acc {
                return l.clone();
            }
        }
        r.segments.last().unwrap().0.clone()
    };
    let mut s = String::from("daqtime,ecg,gsr,video\n");
    for i in 0..n {
        let t = i as f64 / FS_PHYS;
        let _ = writeln!(s, "{},{:.6},{:.6},{}", t * 1000.0, e[i], g[i], label_at(t));
    }
    std::fs::write(phys_dir.join(format!("{stem}.csv")), s).unwrap();
    let na = (total * FS_ANNOT).round() as usize;
    let mut a = String::from("jstime,arousal,video\n");
    for i in 0..na {
        let t = i as f64 / FS_ANNOT;
        let v = r.arousal_level + 0.2 * (t / 7.0).sin() + 0.05 * rng.random_range(-1.0..1.0);
        let _ = writeln!(a, "{},{:.4},{}", t * 1000.0, v, label_at(t));
    }
    std::fs::write(annot_dir.join(format!("{stem}.csv")), a).unwrap();
}

pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("phys")).unwrap();
        std::fs::create_dir_all(dir.path().join("annot")).unwrap();
        std::fs::create_dir_all(dir.path().join("out")).unwrap();
        Workspace { dir }
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.path().join("out").join(name)
    }

    pub fn add(&self, stem: &str, r: &Recording) {
        write_recording(&self.path().join("phys"), &self.path().join("annot"), stem, r);
    }

    /// Writes `config.json` with `extra` merged into the top-level object.
    pub fn config(&self, videos: &[&str], extra: serde_json::Value) -> PathBuf {
        let mut cfg = serde_json::json!({
            "data": {
                "physiological_dir": "phys",
                "annotation_dir": "annot",
                "fs_phys": FS_PHYS,
                "fs_annot": FS_ANNOT,
                "videos": videos,
            },
            "output_dir": "out",
        });
        if let (Some(base), Some(add)) = (cfg.as_object_mut(), extra.as_object()) {
            for (k, v) in add {
                if let (Some(b), Some(a)) = (base.get_mut(k).and_then(|x| x.as_object_mut()), v.as_object()) {
                    for (kk, vv) in a {
                        b.insert(kk.clone(), vv.clone());
                    }
                } else {
                    base.insert(k.clone(), v.clone());
                }
            }
        }
        let p = self.path().join("config.json");
        std::fs::write(&p, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        p
    }

    pub fn run(&self, args: &[&str]) -> Output {
        let cfg = self.path().join("config.json");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_physiosel"));
        cmd.arg("--config").arg(&cfg).args(args).env("RUST_LOG", "warn");
        cmd.output().unwrap()
    }
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Feature table with `participants × videos` rows; `slopes[j]` is the
/// coefficient of feature `j` in the response.
pub fn write_feature_table(path: &Path, participants: usize, videos: usize, p: usize, slopes: &[f64], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("# config_sha256=synthetic\nparticipant,video,response");
    for j in 0..p {
        let _ = write!(s, ",f{j}");
    }
    s.push('\n');
    let explained: f64 = slopes.iter().map(|b| b * b).sum();
    let noise = (1.0 - explained).max(0.05).sqrt();
    for i in 0..participants {
        for v in 0..videos {
            let x: Vec<f64> = (0..p).map(|_| Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
            let e: f64 = Distribution::<f64>::sample(&StandardNormal, &mut rng);
            let y = slopes.iter().zip(&x).map(|(b, xv)| b * xv).sum::<f64>() + noise * e;
            let _ = write!(s, "p{},{},{y:.16e}", i + 1, v + 1);
            for xv in &x {
                let _ = write!(s, ",{xv:.16e}");
            }
            s.push('\n');
        }
    }
    std::fs::write(path, s).unwrap();
}
