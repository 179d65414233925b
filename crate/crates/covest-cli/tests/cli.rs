//! Black-box tests of the covest binary: file formats, exit codes, the
//! golden estimation run, and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use covest_core::model::{apply_mask, sample_gaussian};
use covest_core::{CovarianceSpec, RngSeed};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_covest")
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("failed to launch covest")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

/// The committed 50x5 fixture: an AR(0.6) covariance, 80% observation
/// probability, missing entries written as NA. Regenerating it must
/// reproduce the committed bytes exactly.
fn golden_input_text() -> String {
    let sigma = CovarianceSpec::Explicit {
        rows: (0..5i32)
            .map(|i| (0..5i32).map(|j| 0.6f64.powi((i - j).abs())).collect())
            .collect(),
    }
    .build()
    .unwrap();
    let seed = RngSeed(424_242);
    let x = sample_gaussian(&sigma, 50, seed.substream(0)).unwrap();
    let data = apply_mask(&x, 0.8, seed.substream(1)).unwrap();
    let mut text = String::new();
    for i in 0..50 {
        let fields: Vec<String> = (0..5)
            .map(|j| {
                if data.observed(i, j) {
                    format!("{}", data.y().get(i, j))
                } else {
                    "NA".to_string()
                }
            })
            .collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    text
}

/// Writes the golden fixture files. Run explicitly after an intentional
/// change to the generator or the output format:
/// `cargo test -p covest-cli --test cli -- --ignored regenerate_golden`
#[test]
#[ignore]
fn regenerate_golden_fixtures() {
    let dir = fixture_dir();
    fs::create_dir_all(&dir).unwrap();
    let input = dir.join("golden_input.csv");
    fs::write(&input, golden_input_text()).unwrap();
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--out",
        dir.join("golden_sigma.csv").to_str().unwrap(),
        "--report",
        dir.join("golden_report.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
}

#[test]
fn golden_estimate_is_bit_identical() {
    let dir = fixture_dir();
    let committed_input = fs::read_to_string(dir.join("golden_input.csv")).unwrap();
    assert_eq!(
        committed_input,
        golden_input_text(),
        "fixture input no longer reproduces; regenerate deliberately if the format changed"
    );

    let tmp = tempfile::tempdir().unwrap();
    let sigma_path = tmp.path().join("sigma.csv");
    let report_path = tmp.path().join("report.json");
    let out = run(&[
        "estimate",
        "--input",
        dir.join("golden_input.csv").to_str().unwrap(),
        "--out",
        sigma_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let sigma = fs::read(&sigma_path).unwrap();
    let report = fs::read(&report_path).unwrap();
    assert_eq!(sigma, fs::read(dir.join("golden_sigma.csv")).unwrap());
    assert_eq!(report, fs::read(dir.join("golden_report.json")).unwrap());
}

#[test]
fn estimate_identity_pipeline_matches_sample_covariance() {
    // Fully observed two-column data with delta = 1 and lambda = 0: the
    // output is the plain sample covariance.
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    fs::write(&input, "1,2\n-1,0\n3,1\n0,-2\n").unwrap();
    let out_path = tmp.path().join("sigma.csv");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--delta",
        "1",
        "--lambda",
        "0",
        "--out",
        out_path.to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    // (1/4) sum of outer products: [[11,5],[5,9]] / 4, reproduced to
    // within the eigendecomposition round-trip tolerance.
    let expected = [[2.75, 1.25], [1.25, 2.25]];
    for (i, line) in text.lines().enumerate() {
        for (j, field) in line.split(',').enumerate() {
            let v: f64 = field.parse().unwrap();
            assert!((v - expected[i][j]).abs() <= 1e-12, "entry ({i},{j}): {v}");
        }
    }
}

#[test]
fn estimate_all_masked_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    fs::write(&input, "NA,NA\nNA,NA\n").unwrap();
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    let msg = stderr(&out);
    assert!(msg.contains("delta"), "{msg}");
    // No partial outputs.
    assert!(!tmp.path().join("s.csv").exists());
    assert!(!tmp.path().join("r.json").exists());
}

#[test]
fn estimate_parse_error_exits_2_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    fs::write(&input, "1,2\n3,oops\n").unwrap();
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains(":2:2:"), "{msg}");
}

#[test]
fn estimate_mask_file_mode_and_shape_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    // Genuine zeros stay distinguishable from masked entries.
    fs::write(&input, "0,2\n4,9\n").unwrap();
    let mask = tmp.path().join("mask.csv");
    fs::write(&mask, "1,0\n1,1\n").unwrap();
    let report_path = tmp.path().join("r.json");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--mask",
        mask.to_str().unwrap(),
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["delta_used"], serde_json::json!(0.75));

    let bad_mask = tmp.path().join("bad_mask.csv");
    fs::write(&bad_mask, "1,0,1\n1,1,0\n").unwrap();
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--mask",
        bad_mask.to_str().unwrap(),
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn estimate_mask_conflicts_with_missing_token() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    fs::write(&input, "1\n").unwrap();
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--mask",
        input.to_str().unwrap(),
        "--missing-token",
        "NA",
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn estimate_does_not_mutate_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("data.csv");
    fs::write(&input, "1,NA\n2,3\n").unwrap();
    let before = fs::read(&input).unwrap();
    let _ = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--out",
        tmp.path().join("s.csv").to_str().unwrap(),
        "--report",
        tmp.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(before, fs::read(&input).unwrap());
}

fn tiny_config() -> &'static str {
    r#"{
        "seed": 11,
        "covariance": {"spiked": {"dim": 4, "eigenvalues": [1.0], "tail": 0.1}},
        "n_grid": [50],
        "delta_grid": [1.0],
        "replicates": 3
    }"#
}

#[test]
fn simulate_tiny_config_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, tiny_config()).unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    }
    for name in ["results.csv", "results.json", "verdicts.json"] {
        let a = fs::read(dir_a.join(name)).unwrap();
        let b = fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // Single-row CSV plus header.
    let csv = fs::read_to_string(dir_a.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn simulate_unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(
        &config,
        tiny_config().replacen("\"seed\": 11,", "\"seed\": 11, \"typo_key\": true,", 1),
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("typo_key"), "{}", stderr(&out));
}

#[test]
fn simulate_verdict_failure_exits_4_and_no_verdict_downgrades() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    // An impossible n-slope band forces a verdict failure.
    fs::write(
        &config,
        r#"{
            "seed": 12,
            "covariance": {"spiked": {"dim": 4, "eigenvalues": [1.0], "tail": 0.1}},
            "n_grid": [50, 100, 200],
            "delta_grid": [1.0],
            "replicates": 5,
            "verdicts": {"n_slope_range": [0.5, 0.6]}
        }"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 4, "{}", stderr(&out));
    // Outputs are still written for inspection.
    let verdicts: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("verdicts.json")).unwrap()).unwrap();
    assert_eq!(verdicts["all_pass"], serde_json::json!(false));

    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--no-verdict",
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
}

#[test]
fn calibrate_zero_coverage_reports_smallest_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, tiny_config()).unwrap();
    let out_path = tmp.path().join("cal.json");
    let out = run(&[
        "calibrate",
        "--config",
        config.to_str().unwrap(),
        "--coverage",
        "0",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["selected"], serde_json::json!(0.125));
}

#[test]
fn calibrate_increasing_coverage_never_decreases_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, tiny_config()).unwrap();
    let mut last = 0.0;
    for coverage in ["0", "0.5", "0.9"] {
        let out_path = tmp.path().join(format!("cal_{coverage}.json"));
        let out = run(&[
            "calibrate",
            "--config",
            config.to_str().unwrap(),
            "--coverage",
            coverage,
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
        let c = doc["selected"].as_f64().unwrap();
        assert!(c >= last, "constant decreased: {c} < {last}");
        last = c;
    }
}

#[test]
fn calibrate_unreachable_target_exits_5() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    // With delta = 0.01 and a single sample, most replicates observe
    // nothing: the debiased estimate is zero, the data-driven lambda is
    // zero, and no constant can cover the event.
    fs::write(
        &config,
        r#"{
            "seed": 99,
            "covariance": {"identity": {"dim": 2}},
            "n_grid": [1],
            "delta_grid": [0.01],
            "replicates": 20
        }"#,
    )
    .unwrap();
    let out = run(&[
        "calibrate",
        "--config",
        config.to_str().unwrap(),
        "--coverage",
        "0.5",
        "--out",
        tmp.path().join("cal.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 5, "{}", stderr(&out));
    assert!(!tmp.path().join("cal.json").exists());
}
