//! Process-level tests of the `refit` binary: exit codes, file outputs,
//! reproducibility across thread counts, and report re-rendering.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_refit")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn refit")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("refit-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_line_dataset(path: &Path) {
    let mut text = String::from("x1,x2,y\n");
    for i in 0..40 {
        let x1 = i as f64 / 10.0;
        let x2 = (i as f64 * 0.7).sin();
        let y = 2.0 * x1 - x2 + (i as f64 * 1.3).sin() * 0.2;
        text.push_str(&format!("{x1},{x2},{y}\n"));
    }
    std::fs::write(path, text).unwrap();
}

/// Minimal XML well-formedness check: every opened tag is closed in order,
/// attributes are quoted, exactly one root element.
fn assert_well_formed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0usize;
    let mut rest = text.trim();
    assert!(rest.starts_with('<'), "must start with a tag");
    while let Some(open) = rest.find('<') {
        let close = rest[open..].find('>').expect("unclosed angle bracket") + open;
        let tag = &rest[open + 1..close];
        if let Some(name) = tag.strip_prefix('/') {
            let top = stack
                .pop()
                .unwrap_or_else(|| panic!("stray closing tag {name}"));
            assert_eq!(top, name, "mismatched closing tag");
            if stack.is_empty() {
                roots += 1;
            }
        } else if tag.ends_with('/') {
            if stack.is_empty() {
                roots += 1;
            }
        } else {
            let name: String = tag
                .split(|c: char| c.is_whitespace())
                .next()
                .unwrap()
                .to_string();
            // Attribute values must be double-quoted: an even quote count
            // and no stray `=` outside quotes.
            let quotes = tag.matches('"').count();
            assert_eq!(quotes % 2, 0, "unbalanced quotes in <{tag}>");
            stack.push(name);
        }
        rest = &rest[close + 1..];
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    assert_eq!(roots, 1, "expected exactly one root element");
}

#[test]
fn completed_test_exits_zero_and_writes_consistent_files() {
    let dir = tempdir("basic");
    write_line_dataset(&dir.join("data.csv"));
    let out = run_in(
        &dir,
        &[
            "test",
            "data.csv",
            "--response",
            "y",
            "--seed",
            "11",
            "--permutations",
            "99",
            "--out",
            "result.json",
            "--csv",
            "reference.csv",
            "--svg",
            "hist.svg",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(out.status.code(), Some(0));

    let json = std::fs::read_to_string(dir.join("result.json")).unwrap();
    let report = refit::report::parse_outcome_json(&json).unwrap();
    assert!(report.outcome.is_self_consistent());
    assert_eq!(report.outcome.reference.len(), 99);
    assert_eq!(report.manifest.master_seed, 11);
    assert!(report.manifest.wall_clock_seconds.is_none());

    let csv = std::fs::read_to_string(dir.join("reference.csv")).unwrap();
    assert_eq!(csv.lines().count(), 100); // header + 99 values

    let svg = std::fs::read_to_string(dir.join("hist.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert_eq!(svg.matches("class=\"marker\"").count(), 2);

    // The side manifest carries the wall clock.
    let side = std::fs::read_to_string(dir.join("result.json.manifest.json")).unwrap();
    let manifest: refit::report::RunManifest = serde_json::from_str(&side).unwrap();
    assert!(manifest.wall_clock_seconds.is_some());
    assert_eq!(manifest.command[0], "test");
}

#[test]
fn acceptance_exit_code_is_zero_too() {
    // A null dataset: the test should not reject, and still exit 0.
    let dir = tempdir("null");
    let sim = run_in(
        &dir,
        &[
            "simulate",
            "--scenario",
            "null_bivariate",
            "--n",
            "50",
            "--seed",
            "8",
            "--out",
            "data.csv",
        ],
    );
    assert_eq!(sim.status.code(), Some(0));
    let out = run_in(
        &dir,
        &["test", "data.csv", "--seed", "3", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report =
        refit::report::parse_outcome_json(&std::fs::read_to_string(dir.join("r.json")).unwrap())
            .unwrap();
    assert!(!report.outcome.reject, "unexpected rejection on noise");
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempdir("usage");
    let out = run_in(&dir, &["test", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run_in(&dir, &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn swept_parameter_cannot_also_be_fixed() {
    let dir = tempdir("axis-clash");
    let out = run_in(
        &dir,
        &[
            "sweep",
            "--scenario",
            "bivariate_normal",
            "--param-rho",
            "0.3",
            "--grid",
            "0.0,0.5",
            "--replications",
            "2",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--param-rho"), "stderr: {stderr}");
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempdir("runtime");
    let out = run_in(&dir, &["test", "missing.csv"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed cell: row and column must be named.
    std::fs::write(dir.join("bad.csv"), "x1,y\nabc,1\n2,3\n").unwrap();
    let out = run_in(&dir, &["test", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 2"), "stderr: {stderr}");
    assert!(stderr.contains("x1"), "stderr: {stderr}");
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempdir("help");
    assert_eq!(run_in(&dir, &["--help"]).status.code(), Some(0));
    assert_eq!(run_in(&dir, &["--version"]).status.code(), Some(0));
}

#[test]
fn simulate_then_test_round_trip() {
    let dir = tempdir("simulate");
    let out = run_in(
        &dir,
        &[
            "simulate",
            "--scenario",
            "log_quad",
            "--n",
            "200",
            "--seed",
            "9",
            "--out",
            "sim.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run_in(
        &dir,
        &["test", "sim.csv", "--seed", "9", "--out", "sim.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report =
        refit::report::parse_outcome_json(&std::fs::read_to_string(dir.join("sim.json")).unwrap())
            .unwrap();
    // Strong functional signal: this should reject.
    assert!(report.outcome.reject);
    // Input digest recorded for the dataset.
    assert_eq!(report.manifest.input_digests.len(), 1);
}

#[test]
fn report_subcommand_rerenders_saved_outcomes() {
    let dir = tempdir("report");
    write_line_dataset(&dir.join("data.csv"));
    run_in(
        &dir,
        &["test", "data.csv", "--seed", "4", "--out", "r.json"],
    );

    let out = run_in(
        &dir,
        &["report", "r.json", "--format", "svg", "--out", "again.svg"],
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.join("again.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert_eq!(svg.matches("class=\"marker\"").count(), 2);

    let out = run_in(
        &dir,
        &["report", "r.json", "--format", "csv", "--out", "again.csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("again.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201); // header + default B = 200

    let out = run_in(
        &dir,
        &[
            "report",
            "r.json",
            "--format",
            "json",
            "--out",
            "again.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.join("r.json")).unwrap(),
        std::fs::read(dir.join("again.json")).unwrap(),
        "json re-render must be byte-identical"
    );
}

#[test]
fn thread_count_never_changes_output_bytes() {
    // Identical invocation up to --threads, writing to the same path.
    let dir = tempdir("threads");
    write_line_dataset(&dir.join("data.csv"));
    let mut snapshots = Vec::new();
    for threads in ["1", "3"] {
        let out = run_in(
            &dir,
            &[
                "test",
                "data.csv",
                "--seed",
                "21",
                "--threads",
                threads,
                "--out",
                "r.json",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
        snapshots.push(std::fs::read(dir.join("r.json")).unwrap());
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn rerunning_the_manifest_command_reproduces_the_result() {
    let dir = tempdir("manifest");
    write_line_dataset(&dir.join("data.csv"));
    run_in(
        &dir,
        &[
            "test",
            "data.csv",
            "--seed",
            "14",
            "--threads",
            "2",
            "--out",
            "first.json",
        ],
    );
    let manifest: refit::report::RunManifest = serde_json::from_str(
        &std::fs::read_to_string(dir.join("first.json.manifest.json")).unwrap(),
    )
    .unwrap();

    // Re-execute the recorded command with the output redirected.
    let mut args: Vec<String> = manifest.command.clone();
    let out_pos = args.iter().position(|a| a == "--out").unwrap();
    args[out_pos + 1] = "second.json".into();
    let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run_in(&dir, &arg_refs);
    assert_eq!(out.status.code(), Some(0));

    let first = refit::report::parse_outcome_json(
        &std::fs::read_to_string(dir.join("first.json")).unwrap(),
    )
    .unwrap();
    let second = refit::report::parse_outcome_json(
        &std::fs::read_to_string(dir.join("second.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(first.outcome, second.outcome);
}

#[test]
fn sweep_writes_curves_and_is_thread_independent() {
    let dir = tempdir("sweep");
    let args_base = [
        "sweep",
        "--scenario",
        "bivariate_normal",
        "--n",
        "40",
        "--grid",
        "0.0,0.5",
        "--replications",
        "5",
        "--permutations",
        "60",
        "--seed",
        "17",
    ];
    let mut snapshots = Vec::new();
    for threads in ["1", "2"] {
        let mut args: Vec<&str> = args_base.to_vec();
        args.extend([
            "--threads",
            threads,
            "--out",
            "s.json",
            "--csv",
            "curve.csv",
        ]);
        let out = run_in(&dir, &args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        snapshots.push(std::fs::read(dir.join("s.json")).unwrap());
    }
    assert_eq!(snapshots[0], snapshots[1]);
    let csv = std::fs::read_to_string(dir.join("curve.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "grid_value,rejection_rate,replications"
    );
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn series_pipeline_runs_end_to_end() {
    let dir = tempdir("series");
    // Two channels, 24 samples each; the response depends on the first
    // harmonic amplitude of channel a.
    let mut series = String::from("obs_id,channel,t_index,value\n");
    let mut responses = String::from("obs_id,va\n");
    for obs in 0..14 {
        let amp = 0.5 + obs as f64 * 0.25;
        for t in 0..24 {
            let angle = 2.0 * std::f64::consts::PI * t as f64 / 24.0;
            let a = amp * angle.cos() + 0.1 * (angle * 3.0).sin();
            let b = 0.3 * angle.sin();
            series.push_str(&format!("serve{obs:02},a,{t},{a}\n"));
            series.push_str(&format!("serve{obs:02},b,{t},{b}\n"));
        }
        let noise = ((obs * obs) as f64 * 0.437).sin() * 0.05;
        responses.push_str(&format!("serve{obs:02},{}\n", amp * 2.0 + noise));
    }
    std::fs::write(dir.join("series.csv"), series).unwrap();
    std::fs::write(dir.join("responses.csv"), responses).unwrap();

    let out = run_in(
        &dir,
        &[
            "test",
            "responses.csv",
            "--response",
            "va",
            "--series",
            "series.csv",
            "--fourier-k",
            "2",
            "--seed",
            "5",
            "--permutations",
            "120",
            "--out",
            "series_outcome.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = refit::report::parse_outcome_json(
        &std::fs::read_to_string(dir.join("series_outcome.json")).unwrap(),
    )
    .unwrap();
    assert!(report.outcome.reject, "clear dependence must be detected");
    assert_eq!(report.manifest.input_digests.len(), 2);
}
