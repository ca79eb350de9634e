use std::process::{Command, Output};

use mergelab::qstate::{ghz, state_from_json, state_to_json};
use mergelab::region::CostRegion;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mergelab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const RANDOM_M2: [&str; 8] = ["--generator", "random", "--dims", "2,2", "--dR", "2", "--dB", "2"];

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn input_errors_exit_three() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    let o = run(&["region", "--generator", "random", "--dims", "2,2", "--dR", "2", "--dB", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"layout\": [\n}").unwrap();
    let o = run(&["entropy", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let o = run(&["entropy", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn quick_selftest_passes() {
    let o = run(&["selftest", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().count() >= 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn region_json_round_trips() {
    let o = run(&[&["region"], &RANDOM_M2[..], &["--seed", "4", "--eps", "0.1", "--point", "3,3"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let regions = v["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 2);
    for r in regions {
        let text = r.to_string();
        let parsed = CostRegion::from_json(&text).unwrap();
        assert_eq!(CostRegion::from_json(&parsed.to_json()).unwrap(), parsed);
    }
    assert!(v["corners"].is_array());
    assert!(v["membership"]["inside"].is_boolean());
}

#[test]
fn region_svg_and_empty_plot() {
    let o = run(&[&["region"], &RANDOM_M2[..], &["--seed", "4", "--format", "svg"]].concat());
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("(bits)"));

    // Three senders have no two-dimensional picture.
    let o = run(&[
        "region",
        "--generator",
        "random",
        "--dims",
        "2,2,2",
        "--dR",
        "2",
        "--dB",
        "2",
        "--seed",
        "4",
        "--format",
        "svg",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn state_file_drives_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz.json");
    let psi = ghz(&["C1", "C2", "B"]).unwrap();
    std::fs::write(&path, state_to_json(&psi)).unwrap();
    assert_eq!(state_from_json(&std::fs::read_to_string(&path).unwrap()).unwrap().layout(), psi.layout());

    let o = run(&["entropy", "--input", path.to_str().unwrap(), "--partition", "C1|B", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("quantity,systems,value,gap"));
    let cond = text.lines().find(|l| l.starts_with("condVN")).unwrap();
    let value: f64 = cond.split(',').nth(2).unwrap().parse().unwrap();
    assert!(value.abs() < 1e-12, "{cond}");
}

#[test]
fn embezzle_csv_layout() {
    let o = run(&["embezzle", "--d", "8,16", "--eps", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,alpha,eps,hmin_exact,gersh_bound,singlet,hmax,smooth_bound,thm4_sum,prop5_lower"
    );
    assert_eq!(lines.count(), 2);
    assert_eq!(run(&["embezzle", "--d", "8,16", "--format", "svg"]).status.code(), Some(3));
}

#[test]
fn split_reports_csv() {
    let o = run(&[
        "split",
        "--generator",
        "random",
        "--dims",
        "2,2",
        "--dB",
        "2",
        "--partition",
        "C1|C2",
        "--K",
        "2",
        "--L",
        "1",
        "--M",
        "2",
        "--N",
        "1",
        "--samples",
        "6",
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("seed,q1,q2,delta1,delta2,end_error,bound"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn simulate_writes_timing_sidecar_only_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let args = [&["simulate"], &RANDOM_M2[..], &["--K", "1,1", "--L", "2,1", "--samples", "4", "--seed", "9"]].concat();
    let o = run(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(!csv.contains("wall"));
    let timing = std::fs::read_to_string(dir.path().join("sim.csv.timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), 5);
    assert_eq!(stdout(&run(&args)), csv);
}
