//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

fn wisolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wisolab"))
        .args(args)
        .env_remove("WISOLAB_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn classify_model_case_row() {
    let o = wisolab(&[
        "classify", "--N", "2", "--k", "0", "--l", "0", "--alpha", "-0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "N,k,l,alpha,tag,cond_1_1,cond_1_2,cond_1_3,nec1,nec2"
    );
    assert!(lines[1].starts_with("2,0,0,-0.5,NoSolutionStableHalfBalls,"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifest: "));
}

#[test]
fn eigen_json() {
    let o = wisolab(&["eigen", "--N", "2", "--alpha", "-0.5", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["mu1"].as_f64(), Some(0.5));
}

#[test]
fn invalid_alpha_exits_2() {
    let o = wisolab(&["classify", "--N", "2", "--alpha", "-1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    assert_eq!(wisolab(&["classify", "--bogus"]).status.code(), Some(2));
    assert_eq!(wisolab(&[]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let o = wisolab(&["eigen", "--N", "7", "--alpha", "-0.9", "--tol", "1e-15"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"eigen\"\nformat = \"csv\"\n[params]\nN = 3\nalpha = -0.5\n",
    )
    .unwrap();
    let o = wisolab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let out = stdout(&o);
    assert!(
        out.lines().nth(1).unwrap().starts_with("3,-0.5,1.5,"),
        "{out}"
    );
    // the flag wins over the file
    let o = wisolab(&["--config", cfg.to_str().unwrap(), "eigen", "--alpha", "0"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("3,0,2,"));

    std::fs::write(&cfg, "command = \"eigen\"\ncolour = \"red\"\n").unwrap();
    let o = wisolab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let j = dir.path().join("run.json");
    std::fs::write(
        &j,
        r#"{"command": "classify", "grid": {"N": [2, 3], "alpha": [-0.5, 0.5]}}"#,
    )
    .unwrap();
    let o = wisolab(&["--config", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn output_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = wisolab(&[
        "sweep",
        "--N",
        "2",
        "--alpha",
        "-0.5",
        "-o",
        out.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(read(&out).starts_with("t,ratio,measure,perimeter,error\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("sweep.csv.summary.json"))).unwrap();
    assert!((summary["fitted_slope"].as_f64().unwrap() + 1.0 / 3.0).abs() < 0.01);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("sweep.csv.manifest.json"))).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["params"]["alpha"], -0.5);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wisolab"))
        .args(["vanish", "--points", "10"])
        .env("WISOLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(read(&dir.path().join("vanish.csv")).lines().count(), 11);
    assert!(dir.path().join("vanish.csv.manifest.json").exists());
}

#[test]
fn outputs_identical_across_worker_counts() {
    let args = [
        "sweep", "--N", "3", "--k", "0.5", "--alpha", "-0.3", "--family", "on-wall",
    ];
    let one = wisolab(&[&args[..], &["--jobs", "1"]].concat());
    let four = wisolab(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let again = wisolab(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn verify_only_and_fault_injection() {
    let o = wisolab(&["verify", "--only", "eigen"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    assert!(out.contains("4 of 4 criteria passed"));

    let o = wisolab(&["verify", "--only", "5,12", "--sigma-scale", "1.001"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(
        out.contains("FAIL [ 5]") && out.contains("FAIL [12]"),
        "{out}"
    );

    assert_eq!(
        wisolab(&["verify", "--only", "plots"]).status.code(),
        Some(2)
    );
}

#[test]
fn counterexample_and_ratio_json() {
    let o = wisolab(&["counterexample"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["result"]["relative_margin"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["result"]["certificate"]["radii_fit"]["holds"], true);

    let o = wisolab(&["ratio", "--N", "3", "--alpha", "0", "--domain", "half-ball"]);
    let v = json(&o);
    assert!((v["result"]["ratio"].as_f64().unwrap() - 3.838316585).abs() < 1e-8);
    assert_eq!(
        wisolab(&["ratio", "--N", "3", "--alpha", "0", "--t", "2"])
            .status
            .code(),
        Some(2)
    );
}
