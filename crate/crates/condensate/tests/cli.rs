//! End-to-end tests of the `condensate` binary: exit codes, determinism,
//! config handling, and the resumable sweep manifest.
//!
//! Runs stay deliberately tiny — the point here is plumbing, not physics
//! (the acceptance suite covers that).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_condensate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Drops the timestamp line, the only allowed run-to-run difference.
fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|line| !line.starts_with("# generated:") && !line.contains("\"generated\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("condensate-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

#[test]
fn help_and_version_exit_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
    assert!(run(&["simulate", "--help"]).status.success());
}

#[test]
fn missing_subcommand_exits_one() {
    let output = bin().output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn unknown_config_key_exits_one_with_location() {
    let dir = temp_dir("badkey");
    let config = dir.join("bad.toml");
    write(&config, "[model]\ninteraction = 9.2\nbogus = true\n");
    let output = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("bogus"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn out_of_range_value_exits_one() {
    // ε ≥ 1 is not a meaningful modulation depth.
    let output = run(&["simulate", "--epsilon", "1.5", "--omega", "2.0", "--tau-end", "1"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn unreadable_config_exits_one() {
    let output = run(&["simulate", "--config", "/nonexistent/nowhere.toml"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn computational_failure_exits_two_with_partial_output() {
    let dir = temp_dir("escape");
    let out = dir.join("escape.csv");
    // Resonant drive in a small box: the density must reach the boundary.
    let output = run(&[
        "gpe",
        "--epsilon",
        "0.15",
        "--omega",
        "2.04",
        "--tau-end",
        "400",
        "--output-interval",
        "1.0",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# incomplete:"), "partial file must say why");
    // The partial series must hold actual data rows.
    assert!(text.lines().filter(|l| !l.starts_with('#')).count() > 10);
}

#[test]
fn acceptance_failure_exits_three() {
    // Criterion 4 is the documented honest-red: the damped threshold
    // measures ≈ 2γ, outside the quoted window.
    let output = run(&["verify", "--criterion", "4"]);
    assert_eq!(output.status.code(), Some(3), "{}", stderr(&output));
    let report = stdout(&output);
    assert!(report.contains("\"failed\": 1"), "{report}");
}

#[test]
fn passing_criterion_exits_zero_with_json_report() {
    let output = run(&["verify", "--criterion", "1"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["passed"], 1);
    assert_eq!(report["criteria"][0]["id"], 1);
    assert_eq!(report["criteria"][0]["passed"], true);
}

// ---------------------------------------------------------------------------
// Determinism
// ---------------------------------------------------------------------------

#[test]
fn identical_runs_differ_only_in_timestamp() {
    let a = run(&["simulate", "--tau-end", "5", "--epsilon", "0.1", "--omega", "2.0"]);
    std::thread::sleep(std::time::Duration::from_millis(1100));
    let b = run(&["simulate", "--tau-end", "5", "--epsilon", "0.1", "--omega", "2.0"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip_timestamp(&stdout(&a)), strip_timestamp(&stdout(&b)));
}

#[test]
fn sweep_output_is_worker_count_independent() {
    let args = |workers: &'static str| {
        vec![
            "sweep",
            "--omega-start",
            "1.95",
            "--omega-stop",
            "2.05",
            "--omega-steps",
            "3",
            "--epsilon-start",
            "0.05",
            "--epsilon-stop",
            "0.05",
            "--epsilon-steps",
            "1",
            "--workers",
            workers,
        ]
    };
    let one = run(&args("1"));
    let four = run(&args("4"));
    assert!(one.status.success() && four.status.success());
    assert_eq!(strip_timestamp(&stdout(&one)), strip_timestamp(&stdout(&four)));
}

#[test]
fn worker_env_var_overrides_flag() {
    // An unparsable value must abort with a validation error even though a
    // valid flag is present: the environment wins.
    let output = bin()
        .args(["sweep", "--workers", "2", "--omega-steps", "1", "--epsilon-steps", "1"])
        .env("CONDENSATE_WORKERS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("CONDENSATE_WORKERS"));
}

// ---------------------------------------------------------------------------
// Config file + flag overrides
// ---------------------------------------------------------------------------

#[test]
fn flags_override_config_file() {
    let dir = temp_dir("override");
    let config = dir.join("run.toml");
    write(
        &config,
        "[model]\nkind = \"mathieu\"\n\n[trap]\nepsilon = 0.05\nomega = 2.0\n\n\
         [simulate]\ntau_end = 3.0\noutput_interval = 1.0\n",
    );
    let from_file = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(from_file.status.success());
    let text = stdout(&from_file);
    assert!(text.contains("# model: mathieu"), "{text}");
    assert!(text.contains("# epsilon: 0.05"), "{text}");

    let overridden = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--epsilon",
        "0.2",
    ]);
    assert!(overridden.status.success());
    assert!(stdout(&overridden).contains("# epsilon: 0.2"));
}

#[test]
fn json_format_mirrors_csv_content() {
    let csv = run(&["simulate", "--tau-end", "1", "--output-interval", "0.5"]);
    let json = run(&[
        "simulate",
        "--tau-end",
        "1",
        "--output-interval",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(csv.status.success() && json.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["tau", "v", "vdot", "energy"]));
    let rows = doc["rows"].as_array().unwrap();
    // τ = 0, 0.5, 1 plus the initial sample convention.
    assert_eq!(rows.len(), stdout(&csv).lines().filter(|l| !l.starts_with('#')).count() - 1);
    assert_eq!(rows[0][0], serde_json::json!(0.0));
}

#[test]
fn anisotropic_trap_gives_three_width_columns() {
    let dir = temp_dir("aniso");
    let config = dir.join("run.toml");
    write(
        &config,
        "[model]\nkind = \"variational3d\"\n\n[trap]\nlambda0_axes = [1.0, 1.0, 2.8284271247461903]\n\n\
         [simulate]\ntau_end = 1.0\noutput_interval = 0.5\n",
    );
    let output = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("tau,v_x,v_y,v_z,vdot_x,vdot_y,vdot_z,energy"), "{text}");
}

#[test]
fn config_output_path_is_respected() {
    let dir = temp_dir("outpath");
    let out = dir.join("series.csv");
    let config = dir.join("run.toml");
    write(
        &config,
        &format!(
            "[output]\npath = \"{}\"\n\n[simulate]\ntau_end = 1.0\noutput_interval = 0.5\n",
            out.display()
        ),
    );
    let output = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(output.status.success());
    assert!(stdout(&output).is_empty());
    assert!(out.exists());
}

// ---------------------------------------------------------------------------
// Resumable sweep manifest
// ---------------------------------------------------------------------------

fn sweep_args(dir: &Path, extra: &[&str]) -> Vec<String> {
    let out = dir.join("map.csv");
    let mut args: Vec<String> = [
        "sweep",
        "--omega-start",
        "1.95",
        "--omega-stop",
        "2.05",
        "--omega-steps",
        "2",
        "--epsilon-start",
        "0.05",
        "--epsilon-stop",
        "0.1",
        "--epsilon-steps",
        "2",
        "--output",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.push(out.display().to_string());
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

#[test]
fn finished_sweep_removes_its_manifest() {
    let dir = temp_dir("manifest-clean");
    let output = bin().args(sweep_args(&dir, &[])).output().unwrap();
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(dir.join("map.csv").exists());
    assert!(!dir.join("map.csv.manifest.json").exists());
}

#[test]
fn resume_without_a_manifest_behaves_like_a_fresh_run() {
    let fresh_dir = temp_dir("manifest-fresh");
    let resume_dir = temp_dir("manifest-noresume");
    let fresh = bin().args(sweep_args(&fresh_dir, &[])).output().unwrap();
    assert!(fresh.status.success());
    let resumed = bin()
        .args(sweep_args(&resume_dir, &["--resume"]))
        .output()
        .unwrap();
    assert!(resumed.status.success(), "{}", stderr(&resumed));
    let reference = std::fs::read_to_string(fresh_dir.join("map.csv")).unwrap();
    let replay = std::fs::read_to_string(resume_dir.join("map.csv")).unwrap();
    assert_eq!(strip_timestamp(&reference), strip_timestamp(&replay));
}

#[test]
fn resume_rejects_a_manifest_from_different_settings() {
    let dir = temp_dir("manifest-mismatch");
    let manifest = dir.join("map.csv.manifest.json");
    write(
        &manifest,
        "{\"config\":\"[something]\\nelse = true\\n\",\"rows\":[]}",
    );
    let output = bin()
        .args(sweep_args(&dir, &["--resume"]))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{}", stderr(&output));
    assert!(stderr(&output).contains("different configuration"));
}

#[test]
fn resume_takes_completed_rows_from_the_manifest() {
    let dir = temp_dir("manifest-honored");
    let out = dir.join("map.csv");

    // Interrupt the sweep after its rows are computed by making the final
    // output write fail: a directory at the output path. The per-row
    // manifest lands next to it and survives the failed run.
    std::fs::create_dir_all(&out).unwrap();
    let broken = bin().args(sweep_args(&dir, &[])).output().unwrap();
    assert_eq!(broken.status.code(), Some(2), "{}", stderr(&broken));
    let manifest_path = dir.join("map.csv.manifest.json");
    assert!(manifest_path.exists(), "manifest must survive a failed run");

    // Tamper with one completed cell. If the resumed run recomputed the
    // rows instead of trusting the manifest, the marker would vanish.
    let manifest = std::fs::read_to_string(&manifest_path).unwrap();
    let tampered = manifest.replacen("\"note\":null", "\"note\":\"from-manifest\"", 1);
    assert_ne!(manifest, tampered, "expected a tamperable cell");
    write(&manifest_path, &tampered);

    std::fs::remove_dir(&out).unwrap();
    let resumed = bin()
        .args(sweep_args(&dir, &["--resume"]))
        .output()
        .unwrap();
    assert!(resumed.status.success(), "{}", stderr(&resumed));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("from-manifest"), "rows were recomputed: {text}");
    assert!(!manifest_path.exists(), "manifest removed after success");
}
