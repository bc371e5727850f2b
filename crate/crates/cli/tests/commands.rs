use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use regsel_cli::parse_config;

fn regsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regsel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_the_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"snapshot_steps": [151, 157, 159, 163]}"#,
    );
    let out = dir.path().join("out");
    let o = regsel(&[
        "run",
        "--config",
        &cfg,
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
        "--svg",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in [
        "metrics.csv",
        "events.jsonl",
        "final_state.json",
        "config_echo.json",
        "burst.json",
        "timeseries.svg",
        "snapshot_151.svg",
        "snapshot_157.svg",
        "snapshot_159.svg",
        "snapshot_163.svg",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 502);

    // flags override the file and land in the echo
    let echo = parse_config(&out.join("config_echo.json")).unwrap();
    assert_eq!(echo.seed, 9);
    assert_eq!(echo.snapshot_steps, vec![151, 157, 159, 163]);
    let state: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("final_state.json")).unwrap()).unwrap();
    assert_eq!(state.as_array().unwrap().len(), 100);
}

#[test]
fn echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = regsel(&[
        "run",
        "--seed",
        "31",
        "--steps",
        "80",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let echo = a.join("config_echo.json");
    let o = regsel(&[
        "run",
        "--config",
        echo.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for name in [
        "metrics.csv",
        "events.jsonl",
        "final_state.json",
        "config_echo.json",
        "burst.json",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let bad_key = write(dir.path(), "bad.json", r#"{"horizon": 3}"#);
    let o = regsel(&["run", "--config", &bad_key, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon"));

    let zero = write(dir.path(), "zero.json", r#"{"n_systems": 0}"#);
    let o = regsel(&["run", "--config", &zero, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_systems"));

    let o = regsel(&["run", "--nonsense"]);
    assert_eq!(o.status.code(), Some(1));

    let o = regsel(&[
        "sweep",
        "--epsilon",
        "0.1",
        "--energy",
        "1",
        "--seeds",
        "2",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1), "unbounded sweep must be refused");

    let missing = dir.path().join("nope.json");
    let o = regsel(&["run", "--config", missing.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));

    // output path blocked by a regular file
    let blocker = write(dir.path(), "blocker", "x");
    let o = regsel(&["run", "--steps", "1", "--out", &format!("{blocker}/sub")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_and_oracle_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "budget.json",
        r#"{"energy_mode": "budget", "n_systems": 30, "steps": 100}"#,
    );
    let out = dir.path().join("sweep");
    let o = regsel(&[
        "sweep",
        "--config",
        &cfg,
        "--epsilon",
        "0.05,0.2",
        "--energy",
        "0.5,2,4",
        "--seeds",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["seeds"].as_array().unwrap().len(), 3);
    assert!(json.get("capacity_lifetime_spearman").is_some());

    let out = dir.path().join("oracle");
    let o = regsel(&[
        "oracle",
        "--grid",
        "0:1:0.25",
        "--samples",
        "2000",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("survival_curve.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "delta,probability");
    assert_eq!(lines[1], "0,0");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("1,"));
}
