//! End-to-end tests driving the built binary on fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinfo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn chi_orthogonal_pair_is_one_bit() {
    let out = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "chi",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["chi"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn chi_bb84_is_one_bit() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "chi",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["chi"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn chi_single_member_is_zero() {
    let out = run(&[
        "--input",
        fixture("single_member.json").to_str().unwrap(),
        "--json",
        "chi",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["chi"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn measure_bb84_z_extracts_half_bit() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "measure",
        "Z",
        "--venn",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["I"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(v["balance_defect"].as_f64().unwrap().abs() < 1e-8);
    assert!(v["venn3"].is_object());
}

#[test]
fn measure_orthogonal_matching_basis_saturates() {
    let out = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "measure",
        "Z",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["I"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn measure_identity_extracts_nothing() {
    let out = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "measure",
        "identity",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["I"].as_f64().unwrap().abs() < 1e-9);
    let chi = v["chi"].as_f64().unwrap();
    assert!((v["residual"].as_f64().unwrap() - chi).abs() < 1e-9);
}

#[test]
fn measure_povm_routes_through_dilation() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "measure",
        "trine",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["dilated"].as_bool().unwrap());
    let i = v["I"].as_f64().unwrap();
    let chi = v["chi"].as_f64().unwrap();
    assert!(i <= chi + 1e-9);
}

#[test]
fn measure_unknown_name_exits_4() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "measure",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sequential_repeat_second_step_is_zero() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "sequential",
        "ZZ",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let steps = v["step_informations"].as_array().unwrap();
    assert!((steps[0].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(steps[1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn sequential_zx_bounded_and_single_matches_measure() {
    let out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "sequential",
        "ZX",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["margin"].as_f64().unwrap() >= -1e-9);

    let single = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "sequential",
        "single",
    ]);
    let sv = json_of(&single);
    let measure = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "measure",
        "Z",
    ]);
    let mv = json_of(&measure);
    let seq_total = sv["cumulative"].as_array().unwrap()[0].as_f64().unwrap();
    assert!((seq_total - mv["I"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn optimize_finds_known_optima() {
    let out = run(&[
        "--input",
        fixture("orthogonal_pair.json").to_str().unwrap(),
        "--json",
        "--seed",
        "3",
        "optimize",
        "--restarts",
        "4",
        "--steps",
        "2000",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["best_I"].as_f64().unwrap() >= 1.0 - 1e-6);
    assert!(v["gap"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn check_small_suite_passes_and_is_deterministic() {
    let args = [
        "--json",
        "--seed",
        "11",
        "check",
        "--dims",
        "2",
        "--count",
        "60",
    ];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["passed"].as_bool(), Some(true));
}

#[test]
fn parse_error_exits_2() {
    let out = run(&["--input", "/nonexistent.json", "chi"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_psd_state_exits_3() {
    let out = run(&[
        "--input",
        fixture("non_psd.json").to_str().unwrap(),
        "chi",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("positive"), "stderr: {err}");
}

#[test]
fn human_and_json_report_identical_values() {
    let json_out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "--json",
        "measure",
        "Z",
    ]);
    let text_out = run(&[
        "--input",
        fixture("bb84.json").to_str().unwrap(),
        "measure",
        "Z",
    ]);
    let v = json_of(&json_out);
    let text = String::from_utf8_lossy(&text_out.stdout);
    let i = v["I"].as_f64().unwrap();
    assert!(text.contains(&format!("I = {i:.6}")));
    let chi = v["chi"].as_f64().unwrap();
    assert!(text.contains(&format!("chi = {chi:.6}")));
}
