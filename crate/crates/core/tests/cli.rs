use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdyn")).args(args).output().expect("pdyn runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const HEADER: &str = "[sequence]\ngallery = \"tent\"\n\n[process]\ndelta = 0.01\n\n";

#[test]
fn empty_analysis_block_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.toml", &format!("{HEADER}[analysis]\n"));
    let out = pdyn(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_key_names_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.toml", &format!("{HEADER}[analysis]\nkind = \"periodic\"\nperiod = 1\ncolour = 3\n"));
    let out = pdyn(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 10"), "{err}");
}

#[test]
fn verb_must_match_the_analysis_kind() {
    let out = pdyn(&["decompose", config("tent-period2.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_decomposition_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "d.toml",
        "[sequence]\ngallery = \"truncated-tent\"\n\n[analysis]\nkind = \"decompose\"\nlevel = 5\n\n[output]\njson = \"d.json\"\n",
    );
    let out = pdyn(&["--out", dir.path().to_str().unwrap(), "run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "failed");
    assert_eq!(report["error"]["diagnostics"]["error"], "overlap");
}

#[test]
fn period_two_tent_points_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdyn(&["--out", dir.path().to_str().unwrap(), "run", config("tent-period2.toml").to_str().unwrap()]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tent-period2.json")).unwrap()).unwrap();
    let pts: Vec<f64> = report["result"]["points"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(pts.len(), 2);
    assert!((pts[0] - 0.4).abs() < 1e-9 && (pts[1] - 0.8).abs() < 1e-9, "{pts:?}");
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("example1-simulate.toml");
    let mut outputs = Vec::new();
    for w in ["1", "8"] {
        let d = dir.path().join(w);
        let out = pdyn(&["--workers", w, "--out", d.to_str().unwrap(), "simulate", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut files: Vec<_> = fs::read_dir(&d).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        outputs.push(files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_override_changes_the_run() {
    let cfg = config("example1-escape.toml");
    let dir = tempfile::tempdir().unwrap();
    let report = |extra: &[&str], sub: &str| {
        let d = dir.path().join(sub);
        let mut args = vec!["--trials", "2000", "--out", d.to_str().unwrap()];
        args.extend_from_slice(extra);
        args.extend(["trap", cfg.to_str().unwrap()]);
        let out = pdyn(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_str::<Value>(&fs::read_to_string(d.join("example1-escape.json")).unwrap()).unwrap()
    };
    let a = report(&[], "a");
    let b = report(&["--seed", "99"], "b");
    assert_ne!(a["result"]["probability"], b["result"]["probability"]);
    assert_eq!(a["config"]["process"]["trials"], 2000);
    assert_eq!(b["config"]["process"]["seed"], 99);
}

#[test]
fn gallery_lists_and_builds() {
    let out = pdyn(&["gallery", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["tent", "example1", "truncated-tent", "example2"] {
        assert!(text.contains(name), "{text}");
    }
    let out = pdyn(&["gallery", "build", "tent"]);
    assert!(out.status.success());
    let map: perturbed_dynamics::maps::PiecewiseLinearMap = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(map, perturbed_dynamics::gallery::tent());

    assert_eq!(pdyn(&["gallery", "build", "no-such-map"]).status.code(), Some(1));
}

#[test]
fn plot_renders_csv_and_map_literals() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "t.csv", "trial,step,x\n0,0,0.1\n0,1,0.2\n0,2,0.4\n1,0,0.9\n1,1,0.2\n");
    let svg = dir.path().join("t.svg");
    let out = pdyn(&["--out", svg.to_str().unwrap(), "plot", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(perturbed_dynamics::plot::polylines(&text).len(), 2);

    let map = write(dir.path(), "m.json", r#"{"breakpoints": [0, 0.5, 1], "values": [0, 1, 0]}"#);
    let out = pdyn(&["plot", map.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("<svg"));

    assert_eq!(pdyn(&["plot"]).status.code(), Some(1));
}
