use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mpgabor"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--out").arg(dir).env("MPGABOR_THREADS", "1").output().expect("binary runs")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn table(path: PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn decompose_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    assert_eq!(run(&a, &["decompose", "--free-particle-t", "1", "--d", "1"]).status.code(), Some(0));
    let rep = json(a.join("decompose.json"));
    assert!((rep["sigma"][0].as_f64().unwrap() - 2.414213562373095).abs() < 1e-12);
    assert_eq!(rep["u"]["d"], 1);

    let b = tmp.path().join("b");
    assert_eq!(run(&b, &["decompose", "--identity", "--d", "2"]).status.code(), Some(0));
    assert_eq!(json(b.join("decompose.json"))["sigma"], serde_json::json!([1.0, 1.0]));

    let c = tmp.path().join("c");
    assert_eq!(run(&c, &["decompose", "--seed", "7", "--sigma-max", "8", "--d", "2"]).status.code(), Some(0));
    assert!(json(c.join("decompose.json"))["reconstruction_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn gabor_identity_is_stft() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["gabor", "--identity"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = table(tmp.path().join("gabor.csv"));
    assert_eq!(header, ["w1", "w2", "z1", "z2", "re", "im", "abs"]);
    let meta = json(tmp.path().join("gabor.json"));
    assert_eq!(rows.len() as u64, meta["sources"].as_u64().unwrap() * meta["targets_per_source"].as_u64().unwrap());
    for r in &rows {
        let dist2 = (r[0] - r[2]).powi(2) + (r[1] - r[3]).powi(2);
        let exact = 0.5f64.sqrt() * (-std::f64::consts::PI * dist2 / 2.0).exp();
        assert!((r[6] - exact).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn gabor_free_particle_peaks_on_graph() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["gabor", "--free-particle-t", "1"]).status.code(), Some(0));
    let (_, rows) = table(tmp.path().join("gabor.csv"));
    let step = 0.25;
    let mut sources: Vec<(f64, f64)> = rows.iter().map(|r| (r[2], r[3])).collect();
    sources.dedup();
    assert_eq!(sources.len(), 3);
    for (z1, z2) in sources {
        let best = rows
            .iter()
            .filter(|r| r[2] == z1 && r[3] == z2)
            .max_by(|a, b| a[6].total_cmp(&b[6]))
            .unwrap();
        let (sx, sxi) = (z1 + 2.0 * z2, z2);
        assert!((best[0] - sx).abs() <= step && (best[1] - sxi).abs() <= step, "{best:?}");
    }
}

#[test]
fn verify_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("dispersion");
    assert_eq!(run(&d, &["verify", "dispersion"]).status.code(), Some(0));
    let slope = json(d.join("dispersion.json"))["fit"]["slope"].as_f64().unwrap();
    assert!((-0.55..=-0.45).contains(&slope));

    let l = tmp.path().join("lemmas");
    assert_eq!(run(&l, &["verify", "lemmas", "--s", "2", "--d", "1"]).status.code(), Some(0));
    let rep = json(l.join("lemmas.json"));
    for b in rep["bounds"].as_array().unwrap() {
        assert!(b["max_ratio"].as_f64().unwrap().is_finite());
    }
    assert_eq!(rep["skipped"].as_array().unwrap().len(), 1);

    let b = tmp.path().join("box");
    assert_eq!(run(&b, &["verify", "box"]).status.code(), Some(0));
    assert_eq!(json(b.join("box.json"))["measured_extent_increasing"], true);
}

#[test]
fn envelope_reports_family_result() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["verify", "envelope", "--family", "free-particle", "--N", "4"]);
    let rep = json(tmp.path().join("envelope.json"));
    let passed = rep["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 4 }));
    assert!(rep["family"]["refined_spread"].as_f64().unwrap() <= 100.0);
    assert_eq!(rep["family"]["naive_increasing_along_free"], true);
    if !passed {
        let fail = json(tmp.path().join("failure.json"));
        assert_eq!(fail["kind"], "assertion");
        assert_eq!(fail["config_hash"], rep["config_hash"]);
    }
}

#[test]
fn validation_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&tmp.path().join("a"), &["decompose", "--d", "7"]).status.code(), Some(2));
    let fail = json(tmp.path().join("a/failure.json"));
    assert_eq!(fail["code"], 2);

    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"d": 1, "operator": {"kind": "matrix", "rows": [[2, 0], [0, 2]]}}"#).unwrap();
    let out = run(&tmp.path().join("b"), &["decompose", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    fs::write(&cfg, r#"{"d": 1, "unknown": 3}"#).unwrap();
    assert_eq!(run(&tmp.path().join("c"), &["decompose", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn outputs_carry_the_config_hash_and_reproduce() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    assert_eq!(run(&a, &["gabor", "--seed", "3", "--sigma-max", "2"]).status.code(), Some(0));
    let resolved = a.join("config.resolved.json");
    let hash = json(a.join("gabor.json"))["config_hash"].as_str().unwrap().to_string();
    let csv = fs::read_to_string(a.join("gabor.csv")).unwrap();
    assert!(csv.starts_with(&format!("# config_hash={hash}\n")));

    let first: Vec<Vec<u8>> = ["gabor.csv", "gabor.json"].iter().map(|f| fs::read(a.join(f)).unwrap()).collect();
    let out = bin()
        .args(["gabor", "--config", resolved.to_str().unwrap()])
        .env("MPGABOR_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let second: Vec<Vec<u8>> = ["gabor.csv", "gabor.json"].iter().map(|f| fs::read(a.join(f)).unwrap()).collect();
    assert!(first == second);
}
