#![allow(clippy::approx_constant)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn spectrakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectrakit"))
        .args(args)
        .env_remove("SPECTRAKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn run_ok(args: &[&str]) -> Output {
    let o = spectrakit(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

#[test]
fn validate_lists_violations() {
    let bad = fixture("bad.json");
    let o = spectrakit(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let rules: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["rule"].as_str().unwrap())
        .collect();
    assert_eq!(rules, ["aperiodic-simple-cycle", "illegal-limit-block"]);
    assert_eq!(v["violations"][0]["message"], "aperiodic block must not be a simple cycle");

    let good = fixture("shift2.json");
    let v = json(&run_ok(&["validate", good.to_str().unwrap()]));
    assert_eq!(v["valid"], true);
}

#[test]
fn malformed_json_reports_position() {
    let o = spectrakit(&["spectrum", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "malformed");
    assert!(err["message"].as_str().unwrap().starts_with("line 3, column 33"));
}

#[test]
fn unsupported_requests_exit_2() {
    let zero = fixture("zero_core.json");
    let o = spectrakit(&["essential", zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = spectrakit(&["classify", zero.to_str().unwrap(), "--logmod", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&run_ok(&["classify", zero.to_str().unwrap(), "--re", "0", "--im", "0"]));
    assert_eq!(v["status"]["nul"], 1);
    assert_eq!(v["status"]["def"], 1);
    assert_eq!(v["status"]["index"], 0);
}

#[test]
fn shift_outputs() {
    let shift = fixture("shift2.json");
    let shift = shift.to_str().unwrap();
    let spectrum = run_ok(&["spectrum", shift]);
    golden("shift2.spectrum.json", &stdout(&spectrum));

    let essential = run_ok(&["essential", shift]);
    assert_eq!(json(&essential)["rho_e"], 0.6931);
    golden("shift2.essential.json", &stdout(&essential));

    let classify = run_ok(&["classify", shift, "--logmod", "0", "--phase", "0"]);
    let v = json(&classify);
    assert_eq!(v["status"]["kind"], "fredholm");
    assert_eq!((v["status"]["nul"].as_u64(), v["status"]["def"].as_u64()), (Some(1), Some(0)));
    assert_eq!(v["status"]["index"], 1);
    golden("shift2.classify.json", &stdout(&classify));

    let cartesian = run_ok(&["classify", shift, "--re", "-1", "--im", "0"]);
    assert_eq!(json(&cartesian)["status"]["index"], 1);

    let reversed = fixture("shift2_reversed.json");
    let v = json(&run_ok(&["classify", reversed.to_str().unwrap(), "--logmod", "0"]));
    assert_eq!(v["status"]["index"], -1);
    assert_eq!(v["deficiency_trajectories"][0], "t");
}

#[test]
fn renders_match_golden_files() {
    for name in ["shift2", "mixed", "finite"] {
        let path = fixture(&format!("{name}.json"));
        let path = path.to_str().unwrap();
        golden(&format!("{name}.ascii"), &stdout(&run_ok(&["render", path])));
        golden(
            &format!("{name}.svg"),
            &stdout(&run_ok(&["render", path, "--format", "svg"])),
        );
    }
    golden(
        "mixed.essential.json",
        &stdout(&run_ok(&["essential", fixture("mixed.json").to_str().unwrap()])),
    );
}

#[test]
fn output_is_byte_stable() {
    let mixed = fixture("mixed.json");
    for args in [
        vec!["spectrum", mixed.to_str().unwrap()],
        vec!["essential", mixed.to_str().unwrap()],
        vec!["render", mixed.to_str().unwrap(), "--format", "svg"],
        vec!["verify", mixed.to_str().unwrap()],
    ] {
        assert_eq!(run_ok(&args).stdout, run_ok(&args).stdout);
    }
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("spectrum.json");
    let o = run_ok(&[
        "spectrum",
        fixture("shift2.json").to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["radial"][0][1], 0.6931);
}

#[test]
fn verify_passes_and_honours_seed() {
    for name in ["shift2.json", "mixed.json", "finite.json"] {
        let path = fixture(name);
        let text = stdout(&run_ok(&["verify", path.to_str().unwrap()]));
        assert!(!text.contains("FAIL"), "{name}: {text}");
    }
    let path = fixture("mixed.json");
    let seeded = Command::new(env!("CARGO_BIN_EXE_spectrakit"))
        .args(["verify", path.to_str().unwrap(), "--samples", "10"])
        .env("SPECTRAKIT_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(seeded.status.code(), Some(0));
    let bad_seed = Command::new(env!("CARGO_BIN_EXE_spectrakit"))
        .args(["verify", path.to_str().unwrap()])
        .env("SPECTRAKIT_SEED", "seventeen")
        .output()
        .unwrap();
    assert_eq!(bad_seed.status.code(), Some(1));
}

#[test]
fn finite_system_eigenvalues() {
    let v = json(&run_ok(&["spectrum", fixture("finite.json").to_str().unwrap()]));
    assert_eq!(v["radial"].as_array().unwrap().len(), 0);
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    let v = json(&run_ok(&["essential", fixture("finite.json").to_str().unwrap()]));
    assert_eq!(v["rho_e"], Value::Null);
}

#[test]
fn classify_requires_lambda() {
    let o = spectrakit(&["classify", fixture("shift2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
