mod common;

use common::{stderr, stdout, write_feature_table, Recording, Workspace};
use serde_json::json;

fn rec(seed: u64, flat_ecg: bool, video_secs: f64) -> Recording {
    Recording {
        segments: vec![("0".into(), 3.0), ("1".into(), video_secs), ("0".into(), 2.0)],
        flat_ecg,
        arousal_level: 3.0 + seed as f64,
        seed,
    }
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn two_participants_one_video_give_two_rows_deterministically() {
    let ws = Workspace::new();
    ws.add("p10", &rec(1, false, 120.0));
    ws.add("p2", &rec(2, false, 120.0));
    ws.config(&["1"], json!({}));
    let o = ws.run(&["extract"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read_to_string(ws.out("features.csv")).unwrap();
    assert!(first.starts_with("# config_sha256="));
    let rows = data_rows(&first);
    assert_eq!(rows.len(), 2);
    // natural order: p2 before p10
    assert!(rows[0].starts_with("p2,1,") && rows[1].starts_with("p10,1,"));
    let header = first.lines().nth(1).unwrap();
    assert_eq!(header.split(',').count(), 3 + 162);
    assert!(rows.iter().all(|r| r.split(',').skip(2).all(|v| v.parse::<f64>().unwrap().is_finite())));
    let o = ws.run(&["extract", "--threads", "2"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(ws.out("features.csv")).unwrap(), first);
}

#[test]
fn flat_ecg_window_is_imputed_and_logged() {
    let ws = Workspace::new();
    ws.add("p1", &rec(1, false, 118.0));
    ws.add("p2", &rec(2, true, 118.0));
    ws.config(&["1"], json!({}));
    let o = ws.run(&["extract"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("rr-prep"), "{}", stderr(&o));
    let text = std::fs::read_to_string(ws.out("features.csv")).unwrap();
    assert_eq!(data_rows(&text).len(), 2);
}

#[test]
fn short_segment_is_skipped_with_a_data_exit_code() {
    let ws = Workspace::new();
    ws.add("p1", &rec(1, false, 118.0));
    ws.add("p2", &rec(2, false, 60.0));
    ws.config(&["1"], json!({}));
    let o = ws.run(&["extract"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("participant p2, video 1"), "{}", stderr(&o));
    let text = std::fs::read_to_string(ws.out("features.csv")).unwrap();
    assert_eq!(data_rows(&text).len(), 1);
}

#[test]
fn missing_column_is_a_config_error() {
    let ws = Workspace::new();
    ws.add("p1", &rec(1, false, 118.0));
    ws.config(&["1"], json!({"data": {"columns": {"ecg": "ECG_lead_II"}}}));
    let o = ws.run(&["extract"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("ECG_lead_II"));
}

#[test]
fn out_of_range_alpha_is_a_config_error() {
    let ws = Workspace::new();
    ws.config(&["1"], json!({}));
    let o = ws.run(&["select", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn malformed_feature_table_reports_the_line() {
    let ws = Workspace::new();
    ws.config(&["1"], json!({}));
    std::fs::write(
        ws.out("features.csv"),
        "# config_sha256=x\nparticipant,video,response,a,b\np1,1,0.5,1,2\np2,1,0.1,oops,3\n",
    )
    .unwrap();
    let o = ws.run(&["select"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("features.csv:4: parse error"), "{}", stderr(&o));
}

#[test]
fn later_stages_name_the_missing_stage() {
    let ws = Workspace::new();
    ws.config(&["1"], json!({}));
    let o = ws.run(&["select"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'extract' stage"), "{}", stderr(&o));
    let o = ws.run(&["report"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'select' stage"), "{}", stderr(&o));
}

#[test]
fn planted_design_runs_through_every_stage() {
    let ws = Workspace::new();
    ws.config(&["1"], json!({"selector": {"k": 40, "seed": 5}}));
    write_feature_table(&ws.out("features.csv"), 30, 8, 20, &[0.5, 0.0, 0.0, 0.4], 7);
    let o = ws.run(&["select"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sel_text = std::fs::read_to_string(ws.out("selection.json")).unwrap();
    let sel: serde_json::Value = serde_json::from_str(&sel_text).unwrap();
    let picked: Vec<&str> = sel["selected"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(picked.contains(&"f0") && picked.contains(&"f3"), "{picked:?}");
    assert_eq!(sel["features_config_sha256"], "synthetic");
    assert_eq!(sel["config"]["selector"]["k"], 40);
    assert!(std::fs::read_to_string(ws.out("alpha_sweep.svg")).unwrap().starts_with("<svg"));

    let o = ws.run(&["fit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ws.out("model.json")).unwrap()).unwrap();
    let coefs = model["classical"]["coefficients"].as_array().unwrap();
    assert_eq!(coefs[0]["name"], "(Intercept)");
    let f0 = coefs.iter().find(|c| c["name"] == "f0").unwrap();
    let (est, se) = (f0["estimate"].as_f64().unwrap(), f0["se"].as_f64().unwrap());
    assert!((est - 0.5).abs() <= 3.0 * se, "{est} ± {se}");
    assert!(std::fs::read_to_string(ws.out("effects.svg")).unwrap().contains("<circle"));

    let o = ws.run(&["report"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(ws.out("report.txt")).unwrap();
    assert!(report.contains("100% confirmation rate"), "{report}");
    assert!(report.contains(&format!("selection config_sha256: {}", sel["config_sha256"].as_str().unwrap())));
    assert!(ws.out("report_models.csv").is_file() && ws.out("report_selection.csv").is_file());
    let again = ws.run(&["report"]);
    assert!(again.status.success());
    assert_eq!(std::fs::read_to_string(ws.out("report.txt")).unwrap(), report);

    // selection and fit are byte-identical on a rerun, with any pool size
    let model_text = std::fs::read_to_string(ws.out("model.json")).unwrap();
    assert!(ws.run(&["select", "--threads", "3"]).status.success());
    assert!(ws.run(&["fit", "--threads", "1"]).status.success());
    assert_eq!(std::fs::read_to_string(ws.out("selection.json")).unwrap(), sel_text);
    assert_eq!(std::fs::read_to_string(ws.out("model.json")).unwrap(), model_text);
}

#[test]
fn null_design_has_nothing_to_fit() {
    let ws = Workspace::new();
    ws.config(&["1"], json!({"selector": {"k": 30}}));
    write_feature_table(&ws.out("features.csv"), 20, 8, 30, &[], 11);
    std::fs::write(ws.out("model.json"), "stale").unwrap();
    let o = ws.run(&["select"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sel: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ws.out("selection.json")).unwrap()).unwrap();
    assert_eq!(sel["selected"], json!([]));
    let o = ws.run(&["fit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nothing to fit"));
    assert!(!ws.out("model.json").exists());
    let o = ws.run(&["report"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("no discoveries at target FDR 10%"));
}

#[test]
fn synth_bench_writes_the_fdr_table() {
    let ws = Workspace::new();
    ws.config(
        &["1"],
        json!({
            "selector": {"k": 20},
            "bench": {"n": 60, "p": 20, "reps": 50, "alphas": [0.1], "variants": ["plain", "da-nn"],
                      "designs": [{"name": "null", "correlation": {"kind": "independent"}, "support": 0, "effect": 0.0}]}
        }),
    );
    let o = ws.run(&["synth-bench"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(ws.out("fdr_report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "design,correlation,variant,alpha,reps,fdr,fdr_se,tpr,tpr_se,mean_selected,bound,pass");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("null,independent,plain,0.1,50,"));
    assert!(stdout(&o).contains("da-nn"));
    let o = ws.run(&["synth-bench", "--reps", "10"]);
    assert_eq!(o.status.code(), Some(4));
}
