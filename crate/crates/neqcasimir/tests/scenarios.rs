use neqcasimir::cli::{self, find_zeros, parse_output, CliError, Scenario, ScenarioInput, Target, TemperatureCase};
use std::path::{Path, PathBuf};

const UM: f64 = 1e-6;

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn preset(name: &str) -> Scenario {
    Scenario::load(&workspace().join("scenarios").join(name)).unwrap()
}

fn small(mut s: Scenario, grid: &[f64], cases: Vec<TemperatureCase>) -> Scenario {
    s.d_grid = grid.iter().map(|v| v * UM).collect();
    s.cases = cases;
    s
}

fn case(t1: f64, t2: f64) -> TemperatureCase {
    TemperatureCase { label: format!("T1={t1}K T2={t2}K"), t1, t2 }
}

fn columns(text: &str) -> Vec<String> {
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    header.split(',').map(str::to_string).collect()
}

#[test]
fn every_preset_loads() {
    for name in ["sic_fig2a.json", "sic_fig2b.json", "tungsten_fig3a.json", "tungsten_fig3b.json"] {
        let s = preset(name);
        assert!(!s.cases.is_empty() && !s.d_grid.is_empty(), "{name}");
        assert!(s.d_grid.windows(2).all(|w| w[0] < w[1]), "{name}");
    }
}

#[test]
fn equal_temperatures_leave_only_the_equilibrium_force() {
    let s = small(preset("sic_fig2b.json"), &[1.0, 4.0], vec![case(300.0, 300.0)]);
    assert_eq!(s.system.t_env, 300.0);
    let rows = cli::run(&s).unwrap();
    for row in &rows {
        let b = &row.breakdown;
        assert_eq!(b.total_1, b.eq);
        assert_eq!(b.total_2, -b.eq);
    }
    let mut no_eq = s.clone();
    no_eq.equilibrium = None;
    let text = cli::to_csv(&no_eq, &cli::run(&no_eq).unwrap()).unwrap();
    let (_, out) = parse_output(&text, "eq").unwrap();
    assert!(out.iter().all(|r| r.f1_total == 0.0 && r.f2_total == 0.0));
    assert!(!text.contains("-0,") && text.contains(",zero"));
}

#[test]
fn reruns_are_byte_identical_and_round_trip() {
    let s = small(preset("sic_fig2a.json"), &[2.0, 5.0, 9.0], vec![case(0.0, 300.0), case(300.0, 0.0)]);
    let first = cli::to_csv(&s, &cli::run(&s).unwrap()).unwrap();
    let second = cli::to_csv(&s, &cli::run(&s).unwrap()).unwrap();
    assert_eq!(first, second);
    let (parsed, rows) = parse_output(&first, "run").unwrap();
    assert_eq!(parsed.d_grid, s.d_grid);
    assert_eq!(parsed.cases, s.cases);
    assert_eq!(parsed.equilibrium, s.equilibrium);
    assert_eq!(rows.len(), 6);
    let cols = columns(&first);
    let expected: Vec<&str> = cli::CSV_COLUMNS.iter().copied().chain(["T_env_K"]).collect();
    assert_eq!(cols, expected);
}

#[test]
fn monotone_curve_has_no_zeros() {
    let s = small(preset("sic_fig2a.json"), &[0.5, 0.8, 1.2], vec![case(300.0, 300.0)]);
    let text = cli::to_csv(&s, &cli::run(&s).unwrap()).unwrap();
    let (s, rows) = parse_output(&text, "mono").unwrap();
    assert!(rows.windows(2).all(|w| w[0].f1_total < w[1].f1_total));
    assert!(find_zeros(&s, &rows, Target::Cylinder1).unwrap().is_empty());
}

#[test]
fn zeros_are_bracketed_and_classified() {
    let s = small(preset("sic_fig2a.json"), &[10.0, 12.0, 14.0], vec![case(0.0, 300.0)]);
    let text = cli::to_csv(&s, &cli::run(&s).unwrap()).unwrap();
    let (s, rows) = parse_output(&text, "osc").unwrap();
    let zeros = find_zeros(&s, &rows, Target::Cylinder2).unwrap();
    assert!(!zeros.is_empty());
    for z in &zeros {
        assert!(z.bracket.0 <= z.d && z.d <= z.bracket.1);
        assert!(z.bracket.1 - z.bracket.0 <= 2e-3 * z.d);
        let expected = cli::classify(z.force_at_bracket.0, z.force_at_bracket.1);
        assert_eq!(z.stability, expected);
    }
}

#[test]
fn malformed_scenarios_fail_with_usage_exit_code() {
    let good = std::fs::read_to_string(workspace().join("scenarios/sic_fig2a.json")).unwrap();
    let unknown = good.replacen("\"provider\"", "\"colour\": 1, \"provider\"", 1);
    let e = ScenarioInput::parse(&unknown, "bad.json").unwrap_err();
    assert!(matches!(e, CliError::Schema { .. }));
    assert_eq!(e.exit_code(), 2);
    let truncated = &good[..good.len() / 2];
    assert_eq!(ScenarioInput::parse(truncated, "cut.json").unwrap_err().exit_code(), 2);
    let unit = good.replacen("\"unit\": \"um\"", "\"unit\": \"parsec\"", 1);
    let e = ScenarioInput::parse(&unit, "u.json").unwrap().resolve(&workspace().join("scenarios")).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    let e = ScenarioInput::parse(&good, "m.json").unwrap().resolve(Path::new("/nonexistent")).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(parse_output("d_m\n1e-6\n", "no-header.csv").is_err());
}
