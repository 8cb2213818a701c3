//! End-to-end tests of the `extremal` binary: output formats, config
//! round-trips, plot files, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use extremal::rat::Rat;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extremal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout_of(args)).expect("stdout should be JSON")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("extremal-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const REFERENCE: &[&str] = &["--factor", "d=1,s=-2/1,x=1/2", "--kappa", "1"];

#[test]
fn classify_reports_regime_as_json() {
    let v = json_of(&[&["classify"], REFERENCE].concat());
    assert_eq!(v["command"], "classify");
    assert_eq!(v["regime"], "ExistsExtremal");
    assert_eq!(v["class"]["kappa"], "1/1");
    assert_eq!(v["class"]["factors"][0]["x"], "1/2");
}

#[test]
fn report_round_trips_as_config() {
    let dir = temp_dir("roundtrip");
    let first = stdout_of(&[&["classify"], &["--factor", "d=2,s=-3/2,x=1/3", "--kappa", "5/4"][..]].concat());
    let path = dir.join("report.json");
    std::fs::write(&path, &first).unwrap();
    let second = stdout_of(&["--config", path.to_str().unwrap()]);
    assert_eq!(first, second, "re-ingested report must reproduce itself");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn toml_config_with_flag_override() {
    let dir = temp_dir("toml");
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        r#"
command = "delta"
[class]
kappa = "1/1"
[[class.factors]]
d = 1
s = "-2/1"
x = "1/2"
"#,
    )
    .unwrap();
    let v = json_of(&["--config", path.to_str().unwrap()]);
    assert_eq!(v["delta"], "19/22");
    // The kappa flag overrides the file's class block.
    let v2 = json_of(&["delta", "--config", path.to_str().unwrap(), "--kappa", "2/1"]);
    assert_eq!(v2["class"]["kappa"], "2/1");
    assert_ne!(v2["delta"], "19/22");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tf_xs_encloses_the_boundary() {
    let v = json_of(&["tf-xs", "--s", "-2/1", "--width", "1/1024"]);
    let lo: Rat = v["enclosure"][0].as_str().unwrap().parse().unwrap();
    let hi: Rat = v["enclosure"][1].as_str().unwrap().parse().unwrap();
    assert!(Rat::new(1, 2) < lo && lo < hi && hi < Rat::one());
    assert!(&hi - &lo <= Rat::new(1, 1024));
}

#[test]
fn flat_base_profile_is_the_angle_linear_part() {
    let v = json_of(&[
        "extremal-poly",
        "--factor",
        "d=1,s=0,x=1/2",
        "--kappa",
        "3/2",
    ]);
    let f_omega = v["f_omega"].as_array().unwrap();
    let f_lin = v["f_lin"].as_array().unwrap();
    assert_eq!(f_omega.len(), f_lin.len());
    let kappa = Rat::new(3, 2);
    for (fo, fl) in f_omega.iter().zip(f_lin) {
        let fo: Rat = fo.as_str().unwrap().parse().unwrap();
        let fl: Rat = fl.as_str().unwrap().parse().unwrap();
        assert_eq!(fo, &kappa * &fl);
    }
}

#[test]
fn validation_failures_exit_2_and_name_the_field() {
    let cases: &[(&[&str], &str)] = &[
        (&["classify", "--factor", "d=1,s=-2/1,x=3/2"], "x"),
        (&["classify", "--factor", "d=0,s=1,x=1/2"], "d"),
        (&["classify", "--factor", "d=1,s=1,x=1/2", "--kappa", "0"], "kappa"),
        (&["delta", "--factor", "d=1,s=-2/1,x=19/20"], "regime"),
        (&["tf-xs", "--s", "-2/1", "--width", "0"], "width"),
        (&["tf-xs", "--s", "1/2"], "s"),
        (&["tf-sweep"], "--s"),
        (&["classify"], "class"),
    ];
    for (args, needle) in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let err = String::from_utf8_lossy(&out.stderr).to_lowercase();
        assert!(
            err.contains(&needle.to_lowercase()),
            "stderr {err:?} should mention {needle:?}"
        );
    }
}

#[test]
fn unknown_file_command_exits_2() {
    let dir = temp_dir("unknown");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "command = \"frobnicate\"\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn profile_samples_csv_has_exact_boundary_zeros() {
    let dir = temp_dir("samples");
    stdout_of(&[
        "extremal-poly",
        "--factor",
        "d=1,s=-2/1,x=1/2",
        "--grid",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(dir.join("f_omega_samples.csv")).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "z,f_omega");
    assert_eq!(lines.len(), 6, "header plus one row per sample");
    assert_eq!(lines[1], "-1/1,0/1");
    assert_eq!(lines[5], "1/1,0/1");
    assert_eq!(lines[3], "0/1,19/22");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn calabi_demo_csv_is_positive_and_decreasing() {
    let dir = temp_dir("calabi");
    stdout_of(&[
        "energy-demo",
        "--demo",
        "calabi",
        "--steps",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(dir.join("energy_demo_calabi.csv")).unwrap();
    let mut prev = f64::INFINITY;
    let mut rows = 0;
    for line in text.trim_end().lines().skip(1) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(value > 0.0, "row {line:?} not positive");
        assert!(value < prev, "row {line:?} not decreasing");
        prev = value;
        rows += 1;
    }
    assert_eq!(rows, 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv_row_count_matches_grid() {
    let dir = temp_dir("sweep");
    let v = json_of(&[
        "tf-sweep",
        "--s",
        "-2/1",
        "--grid",
        "6",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    let text = std::fs::read_to_string(dir.join("tf_sweep.csv")).unwrap();
    assert_eq!(text.trim_end().lines().count(), 7, "header plus grid rows");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn text_format_uses_plain_lines() {
    let text = stdout_of(&[&["classify", "--format", "text"], REFERENCE].concat());
    assert!(text.starts_with("command: classify"));
    assert!(text.contains("regime: ExistsExtremal"));
    assert!(!text.contains('{'));
}

#[test]
fn seed_is_recorded_but_harmless() {
    let with_seed = json_of(&[&["classify", "--seed", "42"], REFERENCE].concat());
    assert_eq!(with_seed["seed"], 42);
    let without = json_of(&[&["classify"], REFERENCE].concat());
    assert!(without.get("seed").is_none());
    assert_eq!(with_seed["regime"], without["regime"]);
}
