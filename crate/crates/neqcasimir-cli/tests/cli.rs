use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn neqcasimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neqcasimir")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(&format!("{key},"))).unwrap();
    line.split(',').nth(1).unwrap().parse().unwrap()
}

fn write_scenario(dir: &Path, grid: &str) -> PathBuf {
    let material = workspace().join("materials/sic.json");
    let text = format!(
        r#"{{
  "name": "cli-test",
  "provider": "thin",
  "cylinder1": {{"radius": {{"value": 0.1, "unit": "um"}}, "material": "{m}"}},
  "cylinder2": {{"radius": {{"value": 0.1, "unit": "um"}}, "material": "{m}"}},
  "environment_temperature": {{"value": 0, "unit": "K"}},
  "cases": [{{"t1": {{"value": 0, "unit": "K"}}, "t2": {{"value": 300, "unit": "K"}}}}],
  "separations": {grid},
  "controls": {{"rel_tol": 0.001}}
}}"#,
        m = material.display()
    );
    let path = dir.join("scenario.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_then_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"unit": "um", "values": [10, 12, 14]}"#);
    let csv = dir.path().join("out.csv");
    let out = neqcasimir(&["run", scenario.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);

    let zeros = neqcasimir(&["zeros", csv.to_str().unwrap(), "--cylinder", "2"]);
    assert!(zeros.status.success());
    let listing = stdout(&zeros);
    let mut lines = listing.lines();
    assert_eq!(lines.next(), Some("case,d_m,stability,bracket_low_m,bracket_high_m"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let d: f64 = first[1].parse().unwrap();
    assert!((10e-6..14e-6).contains(&d));
    assert!(first[2] == "stable" || first[2] == "unstable");

    let none = neqcasimir(&["zeros", csv.to_str().unwrap()]);
    assert_eq!(stdout(&none).lines().count(), 1);
}

#[test]
fn run_writes_to_stdout_without_output_field() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"unit": "um", "values": [3]}"#);
    let a = neqcasimir(&["run", scenario.to_str().unwrap()]);
    let b = neqcasimir(&["run", scenario.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("repulsive") || stdout(&a).contains("attractive"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"unit": "um", "values": [3, 2]}"#);
    let out = neqcasimir(&["run", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("separations"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"name\": \"x\", \"provider\": \"thin\",\n \"oops\": 1}").unwrap();
    let out = neqcasimir(&["run", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let missing = neqcasimir(&["run", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    let unit = neqcasimir(&["compare-weight", "--density", "19300", "--radius", "20 parsecs"]);
    assert_eq!(unit.status.code(), Some(2));
}

#[test]
fn weight_and_ampere_comparisons() {
    let weight = neqcasimir(&["compare-weight", "--density", "19300", "--radius", "20nm"]);
    assert!(weight.status.success());
    let w = value(&stdout(&weight), "weight_N_over_length");
    assert!((w / 0.24e-15 - 1.0).abs() < 0.05);

    let ampere = neqcasimir(&["compare-ampere", "--i1", "17uA", "--i2", "17uA", "--d", "0.4um"]);
    assert!(ampere.status.success());
    let a = value(&stdout(&ampere), "ampere_N_over_length");
    assert!((a / 0.15e-15 - 1.0).abs() < 0.1);
}

#[test]
fn comparison_against_a_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"unit": "um", "values": [3]}"#);
    let out = neqcasimir(&[
        "compare-weight",
        "--density",
        "3210",
        "--radius",
        "0.1um",
        "--scenario",
        scenario.to_str().unwrap(),
        "--at",
        "3um",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let ratio = value(&text, "ratio");
    let noneq = value(&text, "nonequilibrium_N_per_m");
    let weight = value(&text, "weight_N_per_m");
    assert!((ratio - noneq.abs() / weight).abs() <= 1e-5 * ratio);
}

#[test]
fn stand_in_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("eq.csv");
    let out = neqcasimir(&[
        "stand-in", "--kind", "conductor", "--radius", "20nm", "--temperature", "2400", "--start", "0.1um", "--stop",
        "10um", "--points", "5", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().next(), Some("d_m,F_eq_N_per_m"));
    assert_eq!(text.lines().count(), 6);

    let material = workspace().join("materials/sic.json");
    let out = neqcasimir(&[
        "stand-in", "--kind", "dielectric", "--material", material.to_str().unwrap(), "--radius", "0.1um",
        "--temperature", "300", "--start", "1um", "--stop", "2um", "--points", "2",
    ]);
    assert!(out.status.success());
    let rows: Vec<f64> = stdout(&out).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(rows.iter().all(|&f| f < 0.0) && rows[0] < rows[1]);

    let missing = neqcasimir(&["stand-in", "--kind", "dielectric", "--radius", "0.1um", "--temperature", "300", "--start", "1um", "--stop", "2um"]);
    assert_eq!(missing.status.code(), Some(2));
}
