use std::path::Path;
use std::process::{Command, Output};

use sensefuse_cli::config::TABLE1_CFG;

fn sensefuse(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensefuse"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<String> {
    // Drop the timing column, which is not deterministic.
    csv.lines()
        .skip(1)
        .map(|l| l.rsplit_once(',').expect("solve_ms column").0.to_string())
        .collect()
}

#[test]
fn sweep_writes_36_rows_deterministically_and_a_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = sensefuse(
        &[
            "sweep",
            "--epsilon-range",
            "0.5:6.0:12",
            "--out",
            "a.csv",
            "--format",
            "plot",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 37);
    assert!(a.starts_with("epsilon,variant,throughput,interference,pf_0,"));
    let script = std::fs::read_to_string(dir.path().join("a.py")).unwrap();
    assert!(script.contains("\"a.csv\""));

    let again = sensefuse(&["sweep", "--out", "b.csv"], dir.path());
    assert_eq!(again.status.code(), Some(0));
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(data_rows(&a), data_rows(&b));

    let variants: Vec<&str> = a
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(variants, ["joint", "radio0", "radio1"]);
}

#[test]
fn solve_single_budget_succeeds_and_reports_each_variant() {
    let dir = tempfile::tempdir().unwrap();
    let out = sensefuse(&["solve", "--epsilon", "2", "--out", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for v in ["variant joint", "variant radio0", "variant radio1"] {
        assert!(text.contains(v));
    }
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn infeasible_budget_exits_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = sensefuse(&["solve", "--epsilon", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.cfg"), "").unwrap();
    let out = sensefuse(&["solve", "--config", "empty.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let short = TABLE1_CFG.replace(", 15]", "]");
    std::fs::write(dir.path().join("short.cfg"), short).unwrap();
    let out = sensefuse(&["solve", "--config", "short.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("throughput_rates") && err.contains("line "),
        "{err}"
    );

    let out = sensefuse(&["sweep", "--epsilon-range", "3:1:4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_status_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = sensefuse(&["solve", "--config", "missing.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = sensefuse(&["sweep", "--out", "no/such/dir/x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_is_reproducible_and_tolerates_small_samples() {
    let dir = tempfile::tempdir().unwrap();
    let a = sensefuse(&["validate", "--trials", "100", "--seed", "9"], dir.path());
    let b = sensefuse(&["validate", "--trials", "100", "--seed", "9"], dir.path());
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stdout)
    );
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with(char::is_numeric))
            .count(),
        8
    );
}

#[test]
fn oracle_refuses_large_instances_and_runs_on_small_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = sensefuse(&["oracle", "--resolution", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let small = r#"
[scenario]
num_bands = 1
num_radios = 1
samples_per_band = 100
noise_variance = 1.0
channel_gains = [[0.3]]

[policy]
miss_caps = 0.1
false_alarm_caps = 0.5
interference_costs = 1.0
throughput_rates = 1.0
interference_budget = 1.0
"#;
    std::fs::write(dir.path().join("small.cfg"), small).unwrap();
    let out = sensefuse(
        &["oracle", "--config", "small.cfg", "--resolution", "300"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("difference"));
}
