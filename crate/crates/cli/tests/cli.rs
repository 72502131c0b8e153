//! End-to-end runs of the `clc` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn clc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = clc(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn rates(v: &serde_json::Value) -> Vec<f64> {
    v["rates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["rate"].as_f64().unwrap())
        .collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-4)
}

#[test]
fn palace_table() {
    let path = fixture("palace_1652.txt");
    let o = clc(&["run", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("ranking: b > a = e = f > d > c"), "{text}");
    assert!(text.contains("2.6667") && text.contains("5.1667"));
}

#[test]
fn palace_intermediates_are_exact() {
    let path = fixture("palace_1652.txt");
    let v = json(&["run", path.to_str().unwrap(), "--json", "--intermediates"]);
    assert_eq!(v["schema"], 1);
    let order: Vec<&str> = v["intermediates"]["order"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(order, ["b", "a", "e", "f", "d", "c"]);
    // π[a][d] = 19/6 out of V = 6.
    assert_eq!(
        v["intermediates"]["exact"]["projected_scores"][0][3],
        "19/36"
    );
    assert_eq!(
        v["intermediates"]["exact"]["projected_turnouts"][0][3],
        "8/9"
    );
    let text = stdout(&clc(&["run", path.to_str().unwrap(), "--intermediates"]));
    assert!(text.contains("16/3") && text.contains("14/3") && text.contains("13/6"));
}

#[test]
fn pcs_margin_based() {
    let path = fixture("pcs_2006.txt");
    let v = json(&[
        "run",
        path.to_str().unwrap(),
        "--variant",
        "margin-based",
        "--approval-only",
        "--json",
    ]);
    assert!(close(&rates(&v), &[2.8919, 2.8919, 2.9324, 3.0135, 3.2703]));
    assert_eq!(
        v["ranking"],
        serde_json::json!([["A", "B"], ["C"], ["D"], ["E"]])
    );
}

#[test]
fn debian_matrix() {
    let path = fixture("debian_2006.csv");
    let v = json(&["run", "--matrix", path.to_str().unwrap(), "--json"]);
    assert_eq!(v["total_voters"], "421");
    assert!(close(
        &rates(&v),
        &[4.1105, 5.9145, 3.6926, 3.6784, 4.1105, 6.7197, 4.5720, 5.8100]
    ));
    assert_eq!(v["rates"][0]["rank"], v["rates"][4]["rank"]);
}

#[test]
fn json_is_byte_identical() {
    for (file, extra) in [
        ("palace_1652.txt", vec![]),
        ("debian_2006.csv", vec!["--matrix"]),
    ] {
        let path = fixture(file);
        let mut args = vec![
            "run",
            path.to_str().unwrap(),
            "--json",
            "--intermediates",
            "--variant",
            "balanced",
        ];
        args.extend(extra);
        let a = clc(&args);
        let b = clc(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn alternative_formula_and_total_voters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.txt");
    std::fs::write(&path, "candidates: a b c\na>b>c\n").unwrap();
    let p = path.to_str().unwrap();
    assert!(close(
        &rates(&json(&["run", p, "--json"])),
        &[1.0, 2.0, 3.0]
    ));
    assert!(close(
        &rates(&json(&["run", p, "--json", "--formula", "alt"])),
        &[1.0, 2.0, 3.0]
    ));
    // A second, silent voter halves every score: r = 3 - row sum.
    let v = json(&["run", p, "--json", "--total-voters", "2"]);
    assert_eq!(v["total_voters"], "2");
    assert!(close(&rates(&v), &[2.0, 2.5, 3.0]));
}

#[test]
fn errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "candidates: a b\na>z\n").unwrap();
    let o = clc(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");

    let small = dir.path().join("small.txt");
    std::fs::write(&small, "a>b\na>b\n").unwrap();
    assert_eq!(
        clc(&["run", small.to_str().unwrap(), "--total-voters", "1"])
            .status
            .code(),
        Some(2)
    );

    let matrix = dir.path().join("m.csv");
    std::fs::write(&matrix, ",a,b\na,*,x\nb,1,*\n").unwrap();
    assert_eq!(
        clc(&["run", "--matrix", matrix.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        clc(&["run", dir.path().join("missing").to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(clc(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_order_independence() {
    let o = clc(&[
        "verify",
        "--suite",
        "order-independence",
        "--cases",
        "200",
        "--seed",
        "7",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS order-independence"));
}

#[test]
fn verify_approval_agreement_includes_fixture() {
    let o = clc(&["verify", "--suite", "approval-agreement", "--cases", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cases   21"));
}

#[test]
fn verify_all_is_reproducible() {
    let a = clc(&["verify", "--suite", "all", "--cases", "50", "--seed", "3"]);
    assert!(a.status.success(), "{}", stdout(&a));
    let b = clc(&["verify", "--suite", "all", "--cases", "50", "--seed", "3"]);
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.rsplit_once("  ").map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}
