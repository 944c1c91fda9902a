use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use doubleforms::toolkit::io::{load_form, save_form};
use doubleforms::toolkit::random::{constant_curvature, default_terms, random_bianchi_22};
use doubleforms::weitzenboeck::np_definition;
use doubleforms::AlgebraContext;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doubleforms")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

fn tensor_file(dir: &Path, seed: u64, n: usize) -> String {
    let path = dir.join(format!("w{seed}.json"));
    let w = random_bianchi_22(seed, default_terms(n), AlgebraContext::new(n).unwrap());
    save_form(w.form(), &path).unwrap();
    path.to_str().unwrap().to_owned()
}

const WITNESS: &str = r#"{"n": 4, "entries": [{"ij": [1, 2], "kl": [3, 4], "value": 1}]}"#;

#[test]
fn small_verify_passes_and_mutation_fails() {
    let ok = run(&["verify", "--n-max", "4", "--seeds", "2", "--trials", "5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).trim_end().ends_with("PASS"));
    let bad = run(&["verify", "--n-max", "4", "--seeds", "2", "--trials", "5", "--omega-coefficient", "-1.9"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("fitted_factor="));
}

#[test]
fn verify_json_report() {
    let o = run(&["verify", "--n-max", "4", "--seeds", "1", "--trials", "3", "--seed", "7", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["summary"]["pass"], true);
    assert!(v["records"].as_array().unwrap().len() > 100);
    assert!(v.get("timings").is_none());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "--n-min", "6", "--n-max", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--n-max", "9"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--unknown"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "--input", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn weitzenboeck_output_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor_file(dir.path(), 3, 5);
    let out = dir.path().join("n2.json");
    for method in ["definition", "formula"] {
        let o = run(&["weitzenboeck", "--input", &input, "--p", "2", "--method", method, "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let got = load_form(&out).unwrap();
        let w = random_bianchi_22(3, default_terms(5), AlgebraContext::new(5).unwrap());
        let expected = np_definition(&w, 2).unwrap();
        assert!((&got - &expected).norm() <= 1e-9 * expected.norm(), "{method}");
    }
    let o = run(&["weitzenboeck", "--input", &input, "--p", "1", "--method", "formula"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("closed-formula range"));
    let o = run(&["weitzenboeck", "--input", &input, "--p", "2", "--json"]);
    assert_eq!(json(&o)["p"], 2);
}

#[test]
fn bianchi_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    fs::write(&path, WITNESS).unwrap();
    let p = path.to_str().unwrap();
    let strict = run(&["decompose", "--input", p, "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("Bianchi"));
    let warn = run(&["decompose", "--input", p, "--json"]);
    assert_eq!(warn.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&warn.stderr).contains("continuing"));
    let projected = run(&["decompose", "--input", p, "--project", "--json"]);
    assert_eq!(projected.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&projected.stderr).contains("projected"));
    assert_eq!(run(&["decompose", "--input", p, "--strict", "--project"]).status.code(), Some(2));
}

#[test]
fn decompose_constant_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    save_form(constant_curvature(1.0, AlgebraContext::new(5).unwrap()).form(), &path).unwrap();
    let v = json(&run(&["decompose", "--input", path.to_str().unwrap(), "--json"]));
    assert!((v["omega0"].as_f64().unwrap() - 0.5).abs() < 1e-14);
    assert!(v["omega2_norm"].as_f64().unwrap() < 1e-13);
    assert!(v["reassembly_residual"].as_f64().unwrap() < 1e-14);
}

#[test]
fn spectrum_sectional_and_pcurvature() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    save_form(constant_curvature(1.0, AlgebraContext::new(5).unwrap()).form(), &path).unwrap();
    let p = path.to_str().unwrap();

    let v = json(&run(&["spectrum", "--input", p, "--p", "2", "--samples", "5", "--seed", "1", "--json"]));
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(eig.len(), 10);
    assert!(eig.iter().all(|e| (e - 6.0).abs() < 1e-12));
    assert!((v["min_sampled_sectional"].as_f64().unwrap() - 6.0).abs() < 1e-12);

    let v = json(&run(&["sectional", "--input", p, "--p", "2", "--samples", "4", "--seed", "1", "--json"]));
    for s in v["samples"].as_array().unwrap() {
        assert!((s["value"].as_f64().unwrap() - 6.0).abs() < 1e-12);
        assert!((s["frame_sum"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    }

    // s_p of g²/2 is (n−p)(n−p−1)/2
    let v = json(&run(&["pcurvature", "--input", p, "--p", "1", "--samples", "4", "--json"]));
    let (min, max) = (v["min"].as_f64().unwrap(), v["max"].as_f64().unwrap());
    assert!((min - 6.0).abs() < 1e-12 && (max - 6.0).abs() < 1e-12);
    assert_eq!(run(&["pcurvature", "--input", p, "--p", "4"]).status.code(), Some(2));
}

#[test]
fn sectional_frame_sum_on_random_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor_file(dir.path(), 9, 6);
    let v = json(&run(&["sectional", "--input", &input, "--p", "3", "--samples", "5", "--json"]));
    for s in v["samples"].as_array().unwrap() {
        let (a, b) = (s["value"].as_f64().unwrap(), s["frame_sum"].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
