use mcf_core::convergents::ConvergentTableJson;
use mcf_core::cubic_rep::ComparisonReport;
use mcf_core::jacobi_perron::{ExpansionReport, ExpansionStatus};
use mcf_core::periodicity::{ConverseReport, ConverseVerdict, ForwardReport};
use serde::de::DeserializeOwned;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn mcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json<T: DeserializeOwned>(out: &Output) -> T {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("output parses under its schema")
}

#[test]
fn expand_golden_ratio() {
    let r: ExpansionReport = json(&mcf(&["expand", &data("golden.json")]));
    assert_eq!(r.m, 1);
    assert_eq!(r.status, ExpansionStatus::CycleDetected { preperiod: 0, period: 1 });
    assert!(r.quotients.iter().all(|q| q == &["1"]));
}

#[test]
fn expand_rational_pair_terminates() {
    let r: ExpansionReport = json(&mcf(&["expand", &data("rational_pair.json")]));
    assert!(matches!(r.status, ExpansionStatus::Terminated { .. }));
    assert_eq!(r.quotients[0], ["2", "2"]);
}

#[test]
fn expand_cube_root_pair_reports_status() {
    let r: ExpansionReport = json(&mcf(&["--max-iter", "200", "expand", &data("cbrt2_pair.json")]));
    assert_eq!(r.m, 2);
    assert_eq!(r.quotients[0], ["1", "1"]);
    // Whatever the status, it must be one of the three documented kinds.
    let text = serde_json::to_string(&r.status).unwrap();
    assert!(["terminated", "cycle_detected", "truncated"].iter().any(|k| text.contains(k)));
}

#[test]
fn expand_many_files_gives_array() {
    let out = mcf(&["expand", &data("golden.json"), &data("sqrt2.json")]);
    let reports: Vec<ExpansionReport> = json(&out);
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[1].status, ExpansionStatus::CycleDetected { preperiod: 1, period: 1 });
}

#[test]
fn expand_csv_and_text() {
    let out = mcf(&["--format", "csv", "expand", &data("sqrt2.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().take(3).collect::<Vec<_>>(), ["n,a1", "0,1", "1,2"]);
    let out = mcf(&["--format", "text", "expand", &data("golden.json")]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("m = 1, status: CycleDetected(0, 1)"));
}

#[test]
fn convergents_of_sqrt2() {
    let t: ConvergentTableJson = json(&mcf(&["convergents", "--depth", "5", &data("sqrt2.json")]));
    let last = t.rows.last().unwrap();
    assert_eq!(last.n, 5);
    // 1, 3/2, 7/5, 17/12, 41/29, 99/70
    assert_eq!(last.convergent.as_ref().unwrap(), &["99/70"]);
    let out = mcf(&["--format", "csv", "convergents", "--depth", "3", &data("sqrt2.json")]);
    assert!(out.status.success());
}

#[test]
fn verify_forward_examples() {
    let r: ForwardReport = json(&mcf(&["verify-forward", &data("all_ones_spec.json")]));
    assert!(r.passed);
    assert_eq!(r.recurrence.char_poly, "x^3 - x^2 - x - 1");
    let r: ForwardReport = json(&mcf(&["verify-forward", "--horizon", "100", &data("sqrt2_spec.json")]));
    assert!(r.passed);
    assert_eq!(r.recurrence.char_poly, "x^2 - 2x - 1");
}

#[test]
fn verify_forward_batch() {
    let v: serde_json::Value = json(&mcf(&["verify-forward", "--batch", "40", "--seed", "3"]));
    assert_eq!(v["cases"], 40);
    assert_eq!(v["passed"], 40);
}

#[test]
fn verify_forward_short_horizon_is_input_error() {
    let out = mcf(&["verify-forward", "--horizon", "3", &data("all_ones_spec.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_converse_quadratics() {
    for f in ["golden.json", "sqrt2.json"] {
        let r: ConverseReport = json(&mcf(&["verify-converse", &data(f)]));
        assert_eq!(r.verdict, ConverseVerdict::FitAndPeriodic);
        assert!(r.consistent);
    }
}

#[test]
fn cubic_reports() {
    let r: ComparisonReport = json(&mcf(&["cubic", &data("cubic_cbrt2.json")]));
    assert_eq!(r.n_matrix.trace, "3");
    assert_eq!(r.n_matrix.det, "5");
    assert_eq!(r.jacobi.rows.len(), 31);
    let r: ComparisonReport = json(&mcf(&["cubic", "--depth", "12", &data("cubic_tribonacci.json")]));
    assert_eq!(r.representation.pre[0], ["0", "1"]);
    let out = mcf(&["--format", "csv", "cubic", "--depth", "4", &data("cubic_cbrt2.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("side,n,c1,c2,err1_lo,err1_hi,err2_lo,err2_hi"));
    assert_eq!(text.lines().count(), 1 + 2 * 5);
}

#[test]
fn cubic_degenerate_exits_2() {
    let out = mcf(&["cubic", &data("cubic_degenerate.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pq + r = 0"));
}

#[test]
fn lrs_fit_examples() {
    let v: serde_json::Value = json(&mcf(&["lrs-fit", &data("fibonacci.txt")]));
    assert_eq!(v["fit"]["order"], 2);
    assert_eq!(v["fit"]["coeffs"], serde_json::json!(["1", "1"]));
    let v: serde_json::Value = json(&mcf(&["lrs-fit", &data("primes.txt")]));
    assert!(v["fit"].is_null());
    let v: serde_json::Value = json(&mcf(&["lrs-fit", &data("powers_of_6.json")]));
    assert_eq!(v["fit"]["order"], 1);
    assert_eq!(v["char_poly"], "x - 6");
}

#[test]
fn lrs_fit_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mcf"))
        .args(["lrs-fit", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"1 2 4 8 16 32 64 128 256 512 1024 2048")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let v: serde_json::Value = json(&out);
    assert_eq!(v["char_poly"], "x - 2");
}

#[test]
fn malformed_input_reports_position() {
    let dir = std::env::temp_dir().join(format!("mcf-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"values\": [\n    {\"coords\": [\"1/0\"]}\n  ]\n}\n").unwrap();
    let out = mcf(&["expand", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("values[0]"));

    std::fs::write(&bad, "{\n  \"values\": [\n    {\"coords\": [1]\n  ]\n}\n").unwrap();
    let out = mcf(&["expand", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line "));

    let out = mcf(&["--precision", "-1", "cubic", &data("cubic_cbrt2.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = mcf(&["--max-iter", "0", "expand", &data("golden.json")]);
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}
