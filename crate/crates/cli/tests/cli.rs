mod common;

use common::{campaign, run_cli, write_json};
use rww_core::domain::Rating;
use rww_core::interface::{dataset_header, save_dataset, PredictResponse};
use rww_core::pipeline::{generate_synthetic, SynthSpec};
use rww_cli::{EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_bundled_model_json() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("campaign.json");
    write_json(&req, &campaign(Rating::Full));
    let (code, out, err) = run_cli(&["--format", "json", "predict", "--campaign", path_str(&req)]);
    assert_eq!(code, EXIT_OK, "{err}");
    let r: PredictResponse = serde_json::from_str(&out).unwrap();
    assert!((r.ln_amount - 9.85).abs() <= 1e-12);
    assert_eq!(r.model_id, "paper-baseline");
    assert!(err.is_empty());
}

#[test]
fn predict_table_output() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("campaign.json");
    write_json(&req, &campaign(Rating::Full));
    let (code, out, _) = run_cli(&["predict", "--model", "paper-baseline", "--campaign", path_str(&req)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ln_amount   9.8500"), "{out}");
    assert!(out.contains("Q01"));
}

#[test]
fn kappa_from_token_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.json");
    std::fs::write(&a, "0, 0.5 1\n1").unwrap();
    std::fs::write(&b, "[0, 0.5, 1, 0.5]").unwrap();
    let (code, out, _) = run_cli(&["kappa", "--a", path_str(&a), "--b", path_str(&b)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("kappa       0.7143"), "{out}");
    assert!(out.contains("repeatable  no"));

    let (code, out, _) = run_cli(&["--format", "json", "kappa", "--a", path_str(&a), "--b", path_str(&b), "--weights", "none"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["kappa"].as_f64().unwrap() - 0.4375 / 0.6875).abs() < 1e-12);
}

#[test]
fn kappa_rejects_off_grid_rating() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    std::fs::write(&a, "0 0.7").unwrap();
    let (code, out, err) = run_cli(&["kappa", "--a", path_str(&a), "--b", path_str(&a)]);
    assert_eq!(code, EXIT_DATA);
    assert!(out.is_empty());
    assert!(err.contains("0.7"), "{err}");
}

#[test]
fn train_on_empty_dataset_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("empty.csv");
    std::fs::write(&data, dataset_header().join(",") + "\n").unwrap();
    let (code, out, err) = run_cli(&["train", "--data", path_str(&data)]);
    assert_eq!(code, EXIT_DATA);
    assert!(out.is_empty());
    assert!(err.contains("dataset is empty"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run_cli(&[]).0, EXIT_USAGE);
    assert_eq!(run_cli(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run_cli(&["kappa", "--a", "x"]).0, EXIT_USAGE);
    assert_eq!(run_cli(&["--format", "yaml", "screen", "--data", "x"]).0, EXIT_USAGE);
    let (code, out, _) = run_cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("predict"));
}

#[test]
fn unknown_model_and_missing_file() {
    let (code, _, err) = run_cli(&["predict", "--model", "nope", "--campaign", "nope.json"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("unknown model"), "{err}");
    let (code, _, err) = run_cli(&["screen", "--data", "/nonexistent/data.csv"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("/nonexistent/data.csv"), "{err}");
}

#[test]
fn train_then_predict_with_interval() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let model = dir.path().join("model.json");
    let baseline = rww_core::interface::paper_baseline();
    let spec = SynthSpec::from_model(&baseline, 127, 0.5, 11);
    save_dataset(&generate_synthetic(&spec).unwrap(), &data).unwrap();

    let (code, out, err) = run_cli(&["train", "--data", path_str(&data), "--out", path_str(&model), "--name", "trained"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("selected"));
    assert!(out.contains("Q01"), "{out}");

    let req = dir.path().join("campaign.json");
    write_json(&req, &campaign(Rating::Partial));
    let (code, out, err) = run_cli(&[
        "--format", "json", "predict", "--model", path_str(&model), "--campaign", path_str(&req), "--interval", "0.9",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let r: PredictResponse = serde_json::from_str(&out).unwrap();
    assert_eq!(r.model_id, "trained");
    let iv = r.interval.expect("trained model carries its design");
    assert!(iv.lower < r.ln_amount && r.ln_amount < iv.upper);
}

#[test]
fn screen_and_slice_training() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let spec = SynthSpec::from_model(&rww_core::interface::paper_baseline(), 127, 0.5, 5);
    save_dataset(&generate_synthetic(&spec).unwrap(), &data).unwrap();

    let (code, out, _) = run_cli(&["--format", "json", "screen", "--data", path_str(&data)]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let dropped: Vec<&str> = v["prevalence"]["dropped"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(dropped, ["Q02", "Q17", "Q22", "Q26"]);

    let (code, out, err) = run_cli(&["--format", "json", "train", "--data", path_str(&data), "--mode", "platform=KS"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let forced: Vec<&str> = v["forced_terms"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(!forced.contains(&"platform_dummy"));
    for q in ["Q01", "Q08", "Q12", "Q16", "Q25"] {
        assert!(forced.contains(&q));
    }

    let (code, _, err) = run_cli(&["train", "--data", path_str(&data), "--mode", "platform=XX"]);
    assert_eq!(code, EXIT_DATA, "{err}");
}

#[test]
fn simulate_emits_dataset_and_runs_trials() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    let mut synth = SynthSpec::new(127, 9.0, 0.3, 1);
    synth.planted = [("Q01", 2.0), ("Q12", 1.5)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let spec = serde_json::json!({ "synth": synth, "trials": 4 });
    write_json(&spec_path, &spec);

    let csv = dir.path().join("syn.csv");
    let (code, out, err) = run_cli(&["simulate", "--spec", path_str(&spec_path), "--emit-dataset", path_str(&csv)]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("127 campaigns"));
    assert_eq!(rww_core::interface::load_dataset(&csv).unwrap().len(), 127);

    let (code, out, err) = run_cli(&["--format", "json", "simulate", "--spec", path_str(&spec_path), "--trials", "3"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trials"], 3);
    assert_eq!(v["recall"], 1.0);
}
