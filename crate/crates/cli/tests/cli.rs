use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robin-mc"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

/// Data rows of a CSV artifact, skipping the `#` preamble.
fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let data = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, data)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn neumann_solve_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--config",
            config("neumann-interval.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (h, data) = rows(&dir.path().join("neumann.csv"));
    assert_eq!(
        h,
        [
            "problem_id",
            "estimator_kind",
            "t_or_alpha",
            "x0",
            "x1",
            "mean",
            "std_error",
            "n_paths",
            "h",
            "scheme"
        ]
    );
    assert_eq!(data.len(), 4);
    for r in &data {
        assert_eq!(r[col(&h, "mean")], "1");
        assert_eq!(r[col(&h, "std_error")], "0");
    }
    let text = fs::read_to_string(dir.path().join("neumann.csv")).unwrap();
    assert!(text.starts_with("# robin-mc "));
    assert!(text.contains("# convention half-laplacian"));
    let report: Value =
        serde_json::from_slice(&fs::read(dir.path().join("neumann.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["sim"]["horizon"], 0.25);
    assert!(report["version"]
        .as_str()
        .unwrap()
        .starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn robin_solve_reports_the_oracle_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "solve",
            "--config",
            config("robin-interval.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: Value =
        serde_json::from_slice(&fs::read(dir.path().join("robin-interval.json")).unwrap()).unwrap();
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        assert!(r["oracle"].is_f64());
        assert!(r["allowance"].as_f64().unwrap() > 0.0);
        assert_eq!(r["within_tolerance"], true, "{r}");
    }
    assert_eq!(report["convention"], "half-laplacian");
    assert_eq!(report["seed"], 20240601);
}

#[test]
fn reruns_give_identical_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("robin-square.json");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["solve", "--config", cfg.to_str().unwrap()], &a)
        .status
        .success());
    assert!(run(
        &["solve", "--threads", "1", "--config", cfg.to_str().unwrap()],
        &b
    )
    .status
    .success());
    let read = |d: &Path| fs::read(d.join("robin-square.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn seed_flag_changes_the_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("robin-interval.json");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["solve", "--config", cfg.to_str().unwrap()], &a)
        .status
        .success());
    assert!(run(
        &["solve", "--seed", "99", "--config", cfg.to_str().unwrap()],
        &b
    )
    .status
    .success());
    let (h, ra) = rows(&a.join("robin-interval.csv"));
    let (_, rb) = rows(&b.join("robin-interval.csv"));
    assert_ne!(ra[0][col(&h, "mean")], rb[0][col(&h, "mean")]);
}

#[test]
fn missing_domain_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "bad.json",
        r#"{"problem": {"id": "x", "measure": [{"type": "neumann"}], "function": {"name": "one"},
            "t": 0.1, "points": [[0.5]]}, "sim": {"h": 0.001, "n_paths": 10}}"#,
    );
    let out = run(&["solve", "--config", p.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `domain`"));
}

#[test]
fn unknown_keys_and_names_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let base = fs::read_to_string(config("neumann-interval.json")).unwrap();
    let extra = write_config(
        dir.path(),
        "extra.json",
        &base.replace("\"seed\": 1", "\"seed\": 1, \"speed\": 2"),
    );
    let out = run(&["solve", "--config", extra.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));
    let func = write_config(
        dir.path(),
        "func.json",
        &base.replace("\"one\"", "\"three\""),
    );
    let out = run(&["solve", "--config", func.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radial-bump"));
    let out = run(&["solve"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_lists_the_available_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "nosuch"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in [
        "sandwich",
        "monotone",
        "resolvent",
        "equivalence",
        "mu-convergence",
        "revuz",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = run(&["verify", "--seed", "7", "monotone"], &a);
    let ob = run(&["verify", "--seed", "7", "monotone"], &b);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(oa.stdout, ob.stdout);
    let read = |d: &Path| fs::read(d.join("verify-monotone.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    let v: Value = serde_json::from_slice(&read(&a)).unwrap();
    assert_eq!(v["options"]["seed"], 7);
    assert_eq!(v["report"]["passed"], true);
}

#[test]
fn verify_sandwich_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "sandwich"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn paths_study_stderr_scales_as_inverse_root_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "study",
            "paths",
            "--config",
            config("robin-interval.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let (h, data) = rows(&dir.path().join("study-paths.csv"));
    assert_eq!(h, ["parameter", "mean", "stderr", "oracle", "gap"]);
    let se: Vec<f64> = data.iter().map(|r| r[2].parse().unwrap()).collect();
    for w in se.windows(2) {
        let ratio = w[0] / w[1] / 10f64.sqrt();
        assert!(
            (ratio - 1.0).abs() <= 0.2,
            "stderr ratio {ratio} times sqrt(10)"
        );
    }
}

#[test]
fn step_size_study_gap_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("robin-interval.json"))
        .unwrap()
        .replace("\"t\": 0.25", "\"t\": 0.1");
    let p = write_config(dir.path(), "c.json", &text);
    let out = run(
        &["study", "step-size", "--config", p.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let (_, data) = rows(&dir.path().join("study-step-size.csv"));
    let h: Vec<f64> = data.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(h, [4e-4, 1e-4, 2.5e-5]);
    let gap: Vec<f64> = data.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(gap.windows(2).all(|w| w[1] < w[0]), "{gap:?}");
}

#[test]
fn mu_ladder_gap_to_neumann_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "study",
            "mu-ladder",
            "--config",
            config("robin-disk-resolvent.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, data) = rows(&dir.path().join("study-mu-ladder.csv"));
    let k: Vec<f64> = data.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(k, [1.0, 2.0, 4.0, 8.0, 16.0]);
    let gap: Vec<f64> = data.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(gap.windows(2).all(|w| w[1] <= w[0]), "{gap:?}");
    assert!(
        data.iter().all(|r| !r[3].is_empty()),
        "disk oracle for a constant function"
    );
}

#[test]
fn dirichlet_config_rejects_the_mu_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "study",
            "mu-ladder",
            "--config",
            config("dirichlet-interval.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
