//! End-to-end tests of the `skelab` binary: the determinism contract
//! (byte-identical outputs regardless of parallelism), the golden-file
//! regression surface, and config diagnostics.

use std::fs;
use std::path::Path;
use std::process::Command;

fn skelab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skelab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const MOMENTS_SMALL: &str = r#"
kind = "moments"
seed = 42

[kinetic.noise.stable]
alpha = 1.5

[kinetic.drift.homogeneous]
gamma = 0.5
f1 = 1.0
fm1 = -1.0

[moments]
kappa = 0.5
horizon = 20.0
n-paths = 120
n-checkpoints = 8
slope-tol = 0.5
"#;

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn outputs_are_byte_identical_across_parallelism_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "m.toml", MOMENTS_SMALL);
    for (out, jobs) in [("a", "1"), ("b", "4"), ("c", "4")] {
        let status = skelab()
            .args(["run"])
            .arg(&cfg)
            .args(["--out"])
            .arg(tmp.path().join(out))
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert!(status.success(), "run {out} failed");
    }
    let a = dir_contents(&tmp.path().join("a"));
    let b = dir_contents(&tmp.path().join("b"));
    let c = dir_contents(&tmp.path().join("c"));
    assert!(!a.is_empty());
    assert_eq!(a, b, "jobs=1 vs jobs=4 outputs differ");
    assert_eq!(b, c, "repeat run outputs differ");
}

#[test]
fn seed_override_changes_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "m.toml", MOMENTS_SMALL);
    for (out, seed) in [("a", "42"), ("b", "43")] {
        let status = skelab()
            .args(["run"])
            .arg(&cfg)
            .args(["--out"])
            .arg(tmp.path().join(out))
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read_to_string(tmp.path().join("a/moments.csv")).unwrap();
    let b = fs::read_to_string(tmp.path().join("b/moments.csv")).unwrap();
    assert_ne!(a, b, "different seeds produced identical estimates");
}

/// The triplet-limit experiment is pure quadrature: its report is the
/// golden regression surface for the limit algebra and config plumbing.
#[test]
fn triplet_limit_matches_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "t.toml",
        r#"
kind = "triplet-limit"

[kinetic.noise.triplet]
gaussian = 0.0
drift = 1.0

[kinetic.noise.triplet.measure.power-law]
alpha = 1.5

[kinetic.noise.triplet.measure.power-law.g.step]
c-plus = 2.0
c-minus = 1.0
"#,
    );
    let status =
        skelab().args(["run"]).arg(&cfg).args(["--out"]).arg(tmp.path().join("out")).status().unwrap();
    assert!(status.success());
    for name in ["triplet_limit.csv", "triplet_limit_summary.csv"] {
        let got = fs::read_to_string(tmp.path().join("out").join(name)).unwrap();
        let want = fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name),
        )
        .unwrap();
        assert_eq!(got, want, "golden mismatch for {name}");
    }
}

#[test]
fn metric_self_test_passes() {
    let tmp = tempfile::tempdir().unwrap();
    // Write one path and hand it to the metric experiment twice: the
    // distances must be exactly zero.
    let path_csv = tmp.path().join("p.csv");
    let mut text = String::from("time,value,is_jump\n");
    for k in 0..200 {
        let t = 0.05 + k as f64 * 0.15;
        text.push_str(&format!("{t},{},0\n", (t * 0.7).sin()));
    }
    fs::write(&path_csv, text).unwrap();
    let cfg = write_config(
        tmp.path(),
        "me.toml",
        &format!(
            "kind = \"metric\"\n[metric]\npath-a = {p:?}\npath-b = {p:?}\n",
            p = path_csv.to_str().unwrap()
        ),
    );
    let out = tmp.path().join("out");
    let status = skelab().args(["run"]).arg(&cfg).args(["--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let metric = fs::read_to_string(out.join("metric.csv")).unwrap();
    assert!(metric.contains("d_u,0\n"), "{metric}");
    assert!(metric.contains("d_s_upper,0\n"), "{metric}");
}

#[test]
fn branches_table_lists_expected_rows() {
    let out = skelab().args(["branches", "--alpha", "1.5", "--gamma", "1", "--beta", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("stable"), "{text}");
    // gamma = 1: p = 1 and theta = 1/alpha = 0.6667.
    assert!(text.contains("1.0000") && text.contains("0.6667"), "{text}");
}

#[test]
fn bad_config_reports_the_offending_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "kind = \"moments\"\nmystery-knob = 1\n");
    let out = skelab().args(["run"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("mystery-knob"), "{err}");
}

#[test]
fn failed_verdict_sets_exit_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    // An impossible tolerance forces a verdict failure.
    let cfg = write_config(
        tmp.path(),
        "m.toml",
        &MOMENTS_SMALL.replace("slope-tol = 0.5", "slope-tol = 0.000001"),
    );
    let status = skelab()
        .args(["run"])
        .arg(&cfg)
        .args(["--out"])
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
