use std::fs;
use std::process::Command;

use oscillab::{presets_table, run, RunConfig, Scenario};

fn base(scenario: &str) -> RunConfig {
    RunConfig { scenario: Some(scenario.to_string()), ..RunConfig::default() }
}

#[test]
fn preset_b_run_passes_and_pins_the_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base("preset-b");
    config.output_dir = Some(dir.path().display().to_string());
    let outcome = run(&config).unwrap();

    assert!(outcome.summary.pass);
    assert_eq!(outcome.summary.scenario, "preset-b");
    assert!(outcome.csv_path.ends_with("preset-b-42.csv"));

    let csv = fs::read_to_string(&outcome.csv_path).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,re_mean_a,im_mean_a,mean_n,re_mean_adag_a2,im_mean_adag_a2,trace_err,tail_pop"
    );
    // 0.5 time units at dt 1e-3, recorded every step, plus the header.
    assert_eq!(csv.lines().count(), 502);
    assert!(outcome.json_path.exists());
    assert!(outcome.svg_path.as_ref().unwrap().exists());
}

#[test]
fn identical_configs_produce_byte_identical_artifacts() {
    let mut config = base("sde");
    config.sigma_w2 = Some(0.1);
    config.interpretation = Some("stratonovich".into());
    config.n_traj = Some(500);
    config.seed = Some(3);

    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config.clone();
        c.output_dir = Some(dir.path().display().to_string());
        let outcome = run(&c).unwrap();
        (
            fs::read(&outcome.csv_path).unwrap(),
            fs::read(&outcome.json_path).unwrap(),
        )
    };
    let (csv_a, json_a) = run_once();
    let (csv_b, json_b) = run_once();
    assert_eq!(csv_a, csv_b);
    // Different output directories, same config: the summary still matches
    // byte for byte because artifacts are referenced by file name.
    assert_eq!(json_a, json_b);
}

#[test]
fn changing_the_seed_changes_ensemble_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base("sde");
    config.sigma_w2 = Some(0.1);
    config.interpretation = Some("ito".into());
    config.n_traj = Some(200);
    config.output_dir = Some(dir.path().display().to_string());

    config.seed = Some(1);
    let first = fs::read(run(&config).unwrap().csv_path).unwrap();
    config.seed = Some(2);
    let second = fs::read(run(&config).unwrap().csv_path).unwrap();
    assert_ne!(first, second);
}

#[test]
fn presets_table_has_three_rows_with_pinned_populations() {
    let table = presets_table();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("preset-a"));
    assert!(rows[0].contains("n_up=0.8 n_dn=0.2 n_upp=0.5 n_ddn=0.5"));
    assert!(rows[1].starts_with("preset-b"));
    assert!(rows[1].contains("n_up=0 n_dn=0 n_upp=0.5 n_ddn=0.5"));
    assert!(rows[2].starts_with("preset-c"));
    assert!(rows[2].contains("n_up=1 n_dn=0 n_upp=0 n_ddn=1"));
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"scenario": "vdp", "mu": 0.5, "stiffness": 2.0}"#).unwrap();
    let err = RunConfig::from_file(&path).unwrap_err();
    assert!(format!("{err:#}").contains("stiffness"), "got: {err:#}");
}

#[test]
fn scenarios_reject_keys_they_do_not_consume() {
    let mut config = base("preset-b");
    config.n_up = Some(0.3);
    let err = config.check_keys().unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("preset-b") && msg.contains("n_up"), "got: {msg}");

    let mut config = base("vdp");
    config.mu = Some(1.0);
    config.dim = Some(20);
    let err = config.check_keys().unwrap_err();
    assert!(err.to_string().contains("dim"), "got: {err}");
}

#[test]
fn missing_required_keys_are_named() {
    let config = base("sde");
    let err = config.check_keys().unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("requires key"), "got: {msg}");

    let mut config = base("me");
    config.gamma1 = Some(1.0);
    config.gamma2 = Some(0.1);
    config.n_up = Some(0.5);
    config.n_dn = Some(0.5);
    config.n_upp = Some(0.5);
    // n_ddn missing
    let err = config.check_keys().unwrap_err();
    assert!(err.to_string().contains("n_ddn"), "got: {err}");
}

#[test]
fn string_overrides_parse_into_typed_fields() {
    let mut config = base("vdp");
    config.set("mu", "2.5").unwrap();
    config.set("record_stride", "20").unwrap();
    config.set("rotating_frame", "false").unwrap();
    assert_eq!(config.mu, Some(2.5));
    assert_eq!(config.record_stride, Some(20));
    assert_eq!(config.rotating_frame, Some(false));
    assert_eq!(config.scenario().unwrap(), Scenario::Vdp);

    assert!(config.set("mu", "fast").is_err());
    let err = config.set("color", "red").unwrap_err();
    assert!(err.to_string().contains("color"));
}

#[test]
fn binary_presets_prints_three_lines() {
    let out = Command::new(env!("CARGO_BIN_EXE_oscillab"))
        .arg("presets")
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn binary_run_honors_output_dir_env_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    fs::write(&cfg_path, r#"{"scenario": "vdp", "mu": 0.5, "t_final": 30.0}"#).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_oscillab"))
        .args(["run", "--config"])
        .arg(&cfg_path)
        .args(["--seed", "5", "--t-final", "40.0"])
        .env("OSCILLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.path().join("vdp-5.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    // The flag wins over the file's t_final.
    assert!(last.starts_with("40,"), "got: {last}");
    assert!(dir.path().join("vdp-5.json").exists());

    let printed = String::from_utf8(out.stdout).unwrap();
    assert!(printed.contains("limit_cycle_period"));
    assert!(printed.contains("PASS"));
}

#[test]
fn binary_assert_flag_turns_failed_metrics_into_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // A nearly-linear coupling: the factor-two negative control then stays
    // below its required deviation floor, failing that metric on purpose.
    let out = Command::new(env!("CARGO_BIN_EXE_oscillab"))
        .args([
            "run",
            "--scenario",
            "equivalence",
            "--lambda",
            "0.00002",
            "--t-final",
            "10.0",
            "--assert",
        ])
        .env("OSCILLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let printed = String::from_utf8(out.stdout).unwrap();
    assert!(printed.contains("FAIL"), "got: {printed}");
}

#[test]
fn binary_reports_hard_errors_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_oscillab"))
        .args(["run", "--scenario", "sde", "--interpretation", "sideways"])
        .args(["--sigma-w2", "0.1"])
        .env("OSCILLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sideways"));
}
