use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn hweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hweyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn list_table_and_filters() {
    let o = hweyl(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("kodaira_thurston"));

    let o = hweyl(&["list", "--tags", "kähler"]);
    let text = stdout(&o);
    assert!(text.contains("fubini_study_cp2") && !text.contains("kodaira_thurston"));

    let o = hweyl(&["list", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "list");
    assert_eq!(v["manifolds"].as_array().unwrap().len(), 8);

    let o = hweyl(&["list", "--tags", "compact", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 3);

    assert_eq!(hweyl(&["list", "--tags", "bogus"]).status.code(), Some(2));
}

#[test]
fn check_flat_torus_is_fast_and_passes() {
    let t = Instant::now();
    let o = hweyl(&["check", "flat_torus", "--format", "text"]);
    assert!(t.elapsed() < Duration::from_secs(10));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("result: pass\n"));
}

#[test]
fn check_fubini_study_json() {
    let o = hweyl(&["check", "fubini_study_cp2", "--points", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    let eq82 = v["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["id"] == "EQ82")
        .unwrap();
    assert!(eq82["max_rel_residual"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["settings"]["seed"], 7);
}

#[test]
fn check_is_byte_identical_across_runs() {
    let args = [
        "check",
        "kahler_potential_generic",
        "--points",
        "10",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    assert_eq!(hweyl(&args).stdout, hweyl(&args).stdout);
    let csv = [
        "check",
        "kahler_potential_generic",
        "--points",
        "10",
        "--seed",
        "3",
        "--format",
        "csv",
    ];
    assert_eq!(hweyl(&csv).stdout, hweyl(&csv).stdout);
}

#[test]
fn deliberate_violation_exits_one() {
    let o = hweyl(&["check", "kodaira_thurston", "--identities", "EQ01", "--format", "text"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated (expected: strictly almost Kähler)"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["check"],
        vec!["check", "nowhere"],
        vec!["check", "flat_torus", "--points", "0"],
        vec!["check", "flat_torus", "--tol-pass", "1e-3", "--tol-fail", "1e-6"],
        vec!["check", "flat_torus", "--identities", "EQ999"],
        vec!["check", "flat_torus", "--format", "yaml"],
        vec!["check", "flat_torus", "--frobnicate"],
        vec!["frobnicate"],
    ] {
        let o = hweyl(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = hweyl(&["check", "flat_torus", "--points", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["manifold"], "flat_torus");
}

#[test]
fn config_file_drives_check_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("warped.cfg");
    std::fs::write(
        &path,
        "[manifold]\nid = warped\ncoords = x, y, z, t\ndomain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]\n\
[metric]\ng_11 = exp(0.3*x^2)\ng_22 = exp(0.3*x^2)\ng_33 = 1\ng_44 = 1\n\
[structure]\nJ_2_1 = 1\nJ_1_2 = -1\nJ_4_3 = 1\nJ_3_4 = -1\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let o = hweyl(&["check", "--config", cfg, "--points", "5", "--format", "text"]);
    assert!(stdout(&o).starts_with("warped:"), "{}", stderr(&o));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = hweyl(&["classify", "--config", cfg]);
    assert!(stdout(&o).contains("warped: Kähler"), "{}", stdout(&o));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(
        &bad,
        "[manifold]\nid = bad\ncoords = x, y, z, t\ndomain = [0,1],[0,1],[0,1],[0,1]\n[metric]\ng_11 = x +\n",
    )
    .unwrap();
    let o = hweyl(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 6"));
}

#[test]
fn classify_verdicts() {
    let o = hweyl(&["classify", "kodaira_thurston"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("almost-Kähler non-Kähler"));
    let o = hweyl(&["classify", "perturbed_j", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"]["verdict"], "generic almost-Hermitian");
}

#[test]
fn integrate_densities_and_formulas() {
    let o = hweyl(&["integrate", "flat_torus", "--density", "qJ", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap().abs() < 1e-10);

    let o = hweyl(&[
        "integrate",
        "kodaira_thurston",
        "--formula",
        "eq117",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let vol = v["report"]["volume"].as_f64().unwrap();
    assert!(v["formulas"][0]["value"].as_f64().unwrap().abs() < 1e-6 * vol);

    let o = hweyl(&["integrate", "fubini_study_cp2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not compact"));
}
