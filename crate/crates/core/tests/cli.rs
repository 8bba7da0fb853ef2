mod common;

use std::fs;
use std::path::Path;

use kirkman::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

fn kirkman(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("kirkman").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("kts9.json");
    let g = kirkman(&["generate", "kts", "--exponent", "2", "--out", path(&file)]);
    assert_eq!(g.code, EXIT_OK, "{}", g.stderr);
    let v = kirkman(&["verify", "--design", path(&file)]);
    assert_eq!(v.code, EXIT_OK, "{}", v.stdout);
    assert!(v.stdout.starts_with("KTS(9): 4 classes, 12 blocks, min_sum 9 (bound 9)"));
    assert!(!v.stdout.contains("FAIL"));

    let file = dir.path().join("kqs16.json");
    assert_eq!(kirkman(&["generate", "kqs", "--exponent", "2", "--out", path(&file)]).code, EXIT_OK);
    let v = kirkman(&["verify", "--design", path(&file)]);
    assert_eq!(v.code, EXIT_OK);
    assert!(v.stdout.contains("min_sum 18 (bound 18)"));
}

#[test]
fn verify_reports_a_witness_for_a_broken_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    let text = common::read("kts9_storage").replacen("[0,1,8]", "[0,1,7]", 1);
    fs::write(&file, text).unwrap();
    let v = kirkman(&["verify", "--design", path(&file)]);
    assert_eq!(v.code, EXIT_FAILED);
    assert!(v.stdout.contains("FAIL"));
    assert!(v.stdout.contains("[0, 7]"), "{}", v.stdout);

    let j = kirkman(&["verify", "--design", path(&file), "--format", "json"]);
    assert_eq!(j.code, EXIT_FAILED);
    let report: serde_json::Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn plan_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("catalog.csv");
    let rows: String = (0..9).map(|i| format!("c{i},{}\n", 9 - i)).collect();
    fs::write(&catalog, format!("id,score\n{rows}")).unwrap();
    let design = common::data_path("kts9_storage");
    let t = kirkman(&["plan", "--design", path(&design), "--catalog", path(&catalog)]);
    assert_eq!(t.code, EXIT_OK, "{}", t.stderr);
    assert!(t.stdout.contains("| A      | c0, c1, c8"), "{}", t.stdout);
    assert!(t.stdout.contains("| I        | A, H, L |"));

    let c = kirkman(&["plan", "--design", path(&design), "--catalog", path(&catalog), "--format", "csv"]);
    assert_eq!(c.code, EXIT_OK);
    assert!(c.stdout.starts_with("server,chunks,sum\nA,c0 c1 c8,9\n"));

    let s = kirkman(&["plan", "--design", path(&design), "--catalog", path(&catalog), "--format", "structured"]);
    let plan: serde_json::Value = serde_json::from_str(&s.stdout).unwrap();
    assert_eq!(plan["servers"].as_array().unwrap().len(), 12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kirkman(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(kirkman(&[]).code, EXIT_USAGE);
    let design = common::data_path("kts9_storage");
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("c.csv");
    fs::write(&catalog, "a,1\nb,2\nc,3\nd,4\ne,5\nf,6\ng,7\nh,8\ni,9\n").unwrap();
    let bad = kirkman(&["plan", "--design", path(&design), "--catalog", path(&catalog), "--format", "xml"]);
    assert_eq!(bad.code, EXIT_USAGE);
    assert!(bad.stderr.starts_with("error:"));
    assert_eq!(kirkman(&["generate", "kts", "--exponent", "0"]).code, EXIT_USAGE);
    assert_eq!(kirkman(&["generate", "kqs", "--exponent", "-1"]).code, EXIT_USAGE);
    assert_eq!(kirkman(&["factorize", "--order", "7"]).code, EXIT_USAGE);
    assert_eq!(kirkman(&["verify", "--design", "/nonexistent/x.json"]).code, EXIT_USAGE);
    assert_eq!(kirkman(&["--help"]).code, EXIT_OK);
}

#[test]
fn factorize_matches_fixture() {
    let f = kirkman(&["factorize", "--order", "12"]);
    assert_eq!(f.code, EXIT_OK);
    let parsed = kirkman::OneFactorization::from_json(&f.stdout).unwrap();
    assert_eq!(parsed, common::factorization("factorization12_worked"));
}

#[test]
fn stats_and_oracle() {
    let design = common::data_path("kqs16_worked");
    let s = kirkman(&["stats", "--design", path(&design), "--format", "json"]);
    assert_eq!(s.code, EXIT_OK);
    let stats: serde_json::Value = serde_json::from_str(&s.stdout).unwrap();
    assert_eq!(stats["blocks"]["observed"], 140);
    assert_eq!(stats["min_sum"], 18);
    assert_eq!(kirkman(&["stats", "--design", path(&design)]).code, EXIT_OK);

    let o = kirkman(&["oracle", "--design", path(&design), "--samples", "200", "--seed", "7"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("0 disagreements"));
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        &["generate", "kqs", "--exponent", "3"][..],
        &["generate", "kts", "--exponent", "3"],
        &["factorize", "--order", "20"],
    ] {
        let a = kirkman(args);
        let b = kirkman(args);
        assert_eq!(a.code, EXIT_OK);
        assert_eq!(a.stdout, b.stdout);
    }
}
