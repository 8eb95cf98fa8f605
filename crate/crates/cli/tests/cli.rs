//! End-to-end CLI checks: file formats, exit codes, round trips.

use std::fs;
use std::process::{Command, Output};

fn polycs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polycs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn plan_prints_table_and_exit_codes() {
    let out = polycs(&["plan", "--n", "20000", "--k", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,q,m,feasible");
    assert_eq!(lines[1], "bp,37,1369,yes");
    assert_eq!(lines[2], "expander,89,7921,yes");
    assert_eq!(lines[3], "new,29,841,yes");

    // expander at k = 9 pushes m to the dimension: flagged, exit 2
    let out = polycs(&["plan", "--n", "20000", "--k", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("near-degenerate"));
}

#[test]
fn matrix_export_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mat.csv");
    let out = polycs(&[
        "build-matrix",
        "--q",
        "5",
        "--r",
        "3",
        "--n",
        "125",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# devore q=5 r=3 n=125");
    assert_eq!(lines.len(), 126);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 6); // j plus q row indices
    }
}

#[test]
fn encode_decode_round_trip_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let mat_path = dir.path().join("mat.csv");
    let x_path = dir.path().join("x.json");
    let y_path = dir.path().join("y.csv");
    let xhat_path = dir.path().join("xhat.json");

    polycs(&[
        "build-matrix",
        "--q",
        "5",
        "--r",
        "3",
        "--n",
        "125",
        "--out",
        mat_path.to_str().unwrap(),
    ]);
    fs::write(&x_path, r#"{"n":125,"entries":[[7,3.5]]}"#).unwrap();

    // encode against the exported file (header carries q, r, n)
    let out = polycs(&[
        "encode",
        "--matrix",
        mat_path.to_str().unwrap(),
        "--x",
        x_path.to_str().unwrap(),
        "--out",
        y_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let y_text = fs::read_to_string(&y_path).unwrap();
    assert_eq!(y_text.lines().count(), 25);
    assert_eq!(y_text.lines().filter(|l| *l == "3.5").count(), 5);

    // decode against the inline spec form
    let out = polycs(&[
        "decode",
        "--method",
        "new",
        "--matrix",
        "q=5,r=3,n=125",
        "--y",
        y_path.to_str().unwrap(),
        "--out",
        xhat_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let xhat: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&xhat_path).unwrap()).unwrap();
    assert_eq!(xhat["n"], 125);
    assert_eq!(xhat["entries"][0][0], 7);
    assert_eq!(xhat["entries"][0][1], 3.5);
}

#[test]
fn decode_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let y_path = dir.path().join("y.csv");
    // dense irregular measurements: majorities exist but no equal groups
    let values: Vec<String> = (0..25).map(|i| format!("{}", 1.0 + (i as f64) * 0.173)).collect();
    fs::write(&y_path, values.join("\n")).unwrap();
    let out = polycs(&[
        "decode",
        "--method",
        "new",
        "--matrix",
        "q=5,r=3,n=125",
        "--y",
        y_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bench_smoke_and_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    let results_path = dir.path().join("results.csv");
    let spec = format!(
        r#"{{"n":125,"k":1,"methods":["new"],"trials":2,"seed":7,"out":{:?}}}"#,
        results_path.to_str().unwrap()
    );
    fs::write(&spec_path, &spec).unwrap();
    let out = polycs(&["bench", "--spec", spec_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&results_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "trial,method,exact,l2_err,linf_err,support_match,time_ms,iters"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,new,true,0,0,true,"));

    // q override forcing m >= n is refused with exit 2
    let bad = r#"{"n":125,"k":1,"methods":["new"],"trials":1,"seed":7,"q":13}"#;
    fs::write(&spec_path, bad).unwrap();
    let out = polycs(&["bench", "--spec", spec_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_modes() {
    let out = polycs(&["verify", "--matrix", "q=5,r=3,n=125", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 violations"));

    let out = polycs(&[
        "verify",
        "--matrix",
        "q=29,r=3,n=20000",
        "--pairs",
        "20000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max inner product"));

    // exhaustive mode over the size guard is refused
    let out = polycs(&["verify", "--matrix", "q=29,r=3,n=20000", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rejects_bad_matrix_specs() {
    let out = polycs(&["verify", "--matrix", "q=4,r=3,n=10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = polycs(&["decode", "--method", "magic", "--matrix", "q=5,r=3,n=125", "--y", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
}
