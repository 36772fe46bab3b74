//! End-to-end tests of the command-line binary: exact stdout, exit codes
//! (0 success, 1 domain failure, 2 usage), file output, and environment
//! variable handling.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mildcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mildcurve")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("mildcurve-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn cohomology_prints_the_profile() {
    let out = mildcurve(&["cohomology", "--p", "3", "--S", "13", "--T", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "h=(1,0,1,0), chi=2\n");
    assert!(stderr(&out).is_empty());
}

#[test]
fn cohomology_structured_output_is_json() {
    let out =
        mildcurve(&["cohomology", "--p", "3", "--S", "13", "--T", "11", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let profile: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(profile["h"], serde_json::json!([1, 0, 1, 0]));
    assert_eq!(profile["chi"], serde_json::json!(2));
}

#[test]
fn kummer_reports_the_dimension() {
    let out = mildcurve(&["kummer", "--p", "3", "--S", "", "--T", "11,13"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "dim=2\n");
}

#[test]
fn find_s0_reports_the_auxiliary_set() {
    let out = mildcurve(&["find-s0", "--p", "3", "--S", "", "--T", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("S0=[7, 13]\ntested="), "got: {}", stdout(&out));
}

#[test]
fn linking_prints_the_table() {
    let out = mildcurve(&["linking", "--p", "3", "--S", "", "--T", ""]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("S0=[7, 13]\n"));
    assert!(text.contains("Q=[277, 19]\n"));
    assert!(text.contains("marking=[]\n"));
    assert!(text.contains("root(7)=3\n"));
    assert!(text.contains("root(13)=2\n"));
    assert!(text.contains("l(13,7)=0\n"));
    assert!(text.contains("l(7,13)=2\n"));
}

#[test]
fn usage_errors_exit_two() {
    let missing_value = mildcurve(&["cohomology", "--p"]);
    assert_eq!(missing_value.status.code(), Some(2));
    let unknown = mildcurve(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let composite = mildcurve(&["cohomology", "--p", "4", "--S", "13"]);
    assert_eq!(composite.status.code(), Some(1));
    assert!(stderr(&composite).starts_with("error:"), "got: {}", stderr(&composite));
    let even = mildcurve(&["certify", "--p", "2", "--S", "", "--T", ""]);
    assert_eq!(even.status.code(), Some(1));
    let overlap = mildcurve(&["cohomology", "--p", "3", "--S", "11", "--T", "11"]);
    assert_eq!(overlap.status.code(), Some(1));
}

#[test]
fn verify_accepts_fresh_and_rejects_tampered_certificates() {
    let cert_path = scratch("verify-roundtrip.json");
    let made = mildcurve(&[
        "certify",
        "--p",
        "3",
        "--S",
        "",
        "--T",
        "",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(made.status.code(), Some(0));

    let good = mildcurve(&["verify", cert_path.to_str().unwrap()]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(stdout(&good), "valid=true\n");

    let text = std::fs::read_to_string(&cert_path).unwrap();
    assert_eq!(text.matches("\"mild\": true").count(), 1);
    let tampered_path = scratch("verify-tampered.json");
    std::fs::write(&tampered_path, text.replace("\"mild\": true", "\"mild\": false")).unwrap();
    let bad = mildcurve(&["verify", tampered_path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout(&bad), "valid=false\n");
}

#[test]
fn verify_errors_on_unreadable_or_malformed_input() {
    let missing = mildcurve(&["verify", "/nonexistent/cert.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).starts_with("error:"));

    let garbled_path = scratch("garbled.json");
    std::fs::write(&garbled_path, "not a certificate").unwrap();
    let garbled = mildcurve(&["verify", garbled_path.to_str().unwrap()]);
    assert_eq!(garbled.status.code(), Some(1));
    assert!(stderr(&garbled).starts_with("error:"));
}

#[test]
fn out_flag_always_writes_structured_json() {
    let path = scratch("profile.json");
    let text_run = mildcurve(&[
        "cohomology",
        "--p",
        "3",
        "--S",
        "13",
        "--T",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(text_run.status.code(), Some(0));
    assert_eq!(stdout(&text_run), "h=(1,0,1,0), chi=2\n");
    let structured_run =
        mildcurve(&["cohomology", "--p", "3", "--S", "13", "--T", "11", "--format", "structured"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&structured_run));
}

#[test]
fn env_var_caps_the_search_and_flags_override_it() {
    let exe = env!("CARGO_BIN_EXE_mildcurve");
    let capped = Command::new(exe)
        .args(["find-s0", "--p", "3", "--S", "", "--T", ""])
        .env("MILDCURVE_MAX_PRIME", "5")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert!(stderr(&capped).starts_with("error:"), "got: {}", stderr(&capped));

    let overridden = Command::new(exe)
        .args(["find-s0", "--p", "3", "--S", "", "--T", "", "--max-prime", "10000000"])
        .env("MILDCURVE_MAX_PRIME", "5")
        .output()
        .unwrap();
    assert_eq!(overridden.status.code(), Some(0));

    let garbage = Command::new(exe)
        .args(["find-s0", "--p", "3", "--S", "", "--T", ""])
        .env("MILDCURVE_MAX_PRIME", "many")
        .output()
        .unwrap();
    assert_eq!(garbage.status.code(), Some(1));
}

#[test]
fn enlarge_reports_each_probed_prime() {
    let cert_path = scratch("enlarge-base.json");
    let made = mildcurve(&[
        "certify",
        "--p",
        "3",
        "--S",
        "",
        "--T",
        "",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(made.status.code(), Some(0));

    let yes = mildcurve(&["enlarge", cert_path.to_str().unwrap(), "--extra", "31"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(
        stdout(&yes),
        "outcome=sufficient_yes\n31: in_certified_set=false image_nonzero=true\n"
    );

    let silent = mildcurve(&["enlarge", cert_path.to_str().unwrap(), "--extra", "31,3541"]);
    assert_eq!(silent.status.code(), Some(0));
    assert_eq!(
        stdout(&silent),
        "outcome=inconclusive\n\
         31: in_certified_set=false image_nonzero=true\n\
         3541: in_certified_set=false image_nonzero=false\n"
    );
}

#[test]
fn certify_text_summary_names_the_curve_and_verdicts() {
    let out = mildcurve(&["certify", "--p", "3", "--S", "", "--T", ""]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p=3 S=[] T=[]\nS0=[7, 13]\nQ=[277, 19]\nh=(1,4,4,0), chi=1\n"));
    assert!(text.contains(
        "verdicts: vdim_zero=true shape_ok=true vv_zero=true rank_full=true \
         mild=true cd2=true kpi1=true ramified_everywhere=true"
    ));
    assert!(text.contains("claims: local_realization=true free_product=true\n"));
}
