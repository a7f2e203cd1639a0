use std::process::{Command, Output};

use bwsos_core::report::Report;

fn bwsos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwsos")).args(args).env_remove("BWSOS_TOL").output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::from_json(&String::from_utf8_lossy(&out.stdout)).expect("json report")
}

#[test]
fn certify_general_three() {
    let out = bwsos(&["certify", "--class", "general", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.control_sums["gamma"], "1/2");
    assert_eq!(r.control_sums["defect"], "8/1");
    assert!(r.timing_ms.is_none());
    let v = serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap();
    assert_eq!(Report::from_json(&v.to_string()).unwrap(), r);
}

#[test]
fn exit_codes() {
    assert_eq!(bwsos(&["toeplitz", "--n", "8"]).status.code(), Some(2));
    assert_eq!(bwsos(&["toeplitz", "--n", "7"]).status.code(), Some(0));
    assert_eq!(bwsos(&["tables", "--which", "1"]).status.code(), Some(3));
    assert_eq!(bwsos(&["tables", "--which", "2"]).status.code(), Some(0));
    assert_eq!(bwsos(&["fixture", "hankel3"]).status.code(), Some(0));
    assert_eq!(bwsos(&["bogus"]).status.code(), Some(64));
    assert_eq!(bwsos(&["tables", "--which", "4"]).status.code(), Some(64));
    assert_eq!(bwsos(&["certify", "--class", "nope", "--n", "3"]).status.code(), Some(64));
    assert_eq!(bwsos(&["certify", "--class", "general", "--n", "6"]).status.code(), Some(64));
    assert_eq!(bwsos(&["--help"]).status.code(), Some(0));
    assert_eq!(bwsos(&["--version"]).status.code(), Some(0));
}

#[test]
fn toeplitz_eight_reports_bracket() {
    let r = report(&bwsos(&["toeplitz", "--n", "8"]));
    assert!(r.control_sums.contains_key("bracket_lo"));
    assert!(r.failed().iter().all(|v| v.name == "S_psd"));
}

#[test]
fn exact_reports_are_byte_identical() {
    for args in [&["certify", "--class", "tri", "--n", "4"][..], &["fixture", "hankel3"], &["toeplitz", "--n", "5"]] {
        assert_eq!(bwsos(args).stdout, bwsos(args).stdout, "{args:?}");
    }
}

#[test]
fn certificate_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cyclic5.cert");
    let p = path.to_str().unwrap();
    assert_eq!(bwsos(&["certify", "--class", "cyclic-hankel", "--n", "5", "--cert", p]).status.code(), Some(0));
    let out = bwsos(&["verify", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out).verdicts.iter().any(|v| v.name == "sos_identity" && v.pass));

    // double the coefficient of the first square
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let k = lines.iter().position(|l| l.starts_with("sq ")).unwrap();
    let mut tok: Vec<String> = lines[k].split(' ').map(String::from).collect();
    let (num, den) = tok[1].split_once('/').unwrap();
    tok[1] = format!("{}/{den}", 2 * num.parse::<i64>().unwrap());
    lines[k] = tok.join(" ");
    let tampered = lines.join("\n");
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(bwsos(&["verify", p]).status.code(), Some(2));

    std::fs::write(&path, "not a certificate").unwrap();
    assert_eq!(bwsos(&["verify", p]).status.code(), Some(64));
}

#[test]
fn text_output_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let out = bwsos(&["fixture", "hankel3", "--format", "text", "--timing", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("[PASS] (exact) S_matches_printed"));
    assert!(text.contains("timing:"));
}

#[test]
fn explore_hankel_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h3.cert");
    let out = bwsos(&["explore", "--class", "hankel", "--n", "3", "--max-denominator", "4", "--cert", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("bwsos v1 hankel 3 0/1\ny 1 2 4 5 -1/1\n"), "{text}");
    assert_eq!(bwsos(&["verify", path.to_str().unwrap()]).status.code(), Some(0));
}
