use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pfgr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfgr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("one JSON record")
}

#[test]
fn brute_and_diam_agree() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, plant) in [(1, true), (2, false), (3, false), (4, true)] {
        let mut args = vec!["gen-ov", "30", "4", "--seed"];
        let s = seed.to_string();
        args.push(&s);
        args.extend(["--out", "x.ov"]);
        if plant {
            args.push("--plant");
        }
        assert!(pfgr(dir.path(), &args).status.success());
        let brute = json(&pfgr(dir.path(), &["solve-ov", "--engine", "brute", "x.ov", "--json"]));
        let diam = json(&pfgr(dir.path(), &["solve-ov", "--engine", "diam", "x.ov", "--json"]));
        assert_eq!(brute["answer"], diam["answer"], "seed {seed}");
        assert_eq!(diam["engine"], "diam");
        assert_eq!(diam["input"]["width"], 5);
    }
}

#[test]
fn reduce_output_validates() {
    let dir = tempfile::tempdir().unwrap();
    assert!(pfgr(dir.path(), &["gen-ov", "12", "3", "--seed", "7", "--out", "x.ov"]).status.success());
    let rec = json(&pfgr(dir.path(), &["reduce", "ov2diam", "x.ov", "--out", "red", "--json"]));
    assert_eq!(rec["answer"]["target_params"]["nodes"], 12 + 12 + 3 + 2);
    assert_eq!(rec["answer"]["target_params"]["treewidthBound"], 4);
    let out = pfgr(dir.path(), &["validate-td", "red.graph", "red.td"]);
    assert!(out.status.success());
    let brute = json(&pfgr(dir.path(), &["diam", "--algo", "brute", "red.graph", "--json"]));
    let td = json(&pfgr(dir.path(), &["diam", "--algo", "td", "red.graph", "red.td", "--json"]));
    assert_eq!(brute["answer"], td["answer"]);
}

#[test]
fn invalid_decomposition_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.graph"), "p tw 3 3\n1 2\n2 3\n1 3\n").unwrap();
    std::fs::write(dir.path().join("t.td"), "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
    let out = pfgr(dir.path(), &["validate-td", "g.graph", "t.td", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["answer"], false);
    let out = pfgr(dir.path(), &["diam", "--algo", "td", "g.graph", "t.td"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("invalid tree decomposition"), "{err}");
}

#[test]
fn refusals_are_one_line() {
    let dir = tempfile::tempdir().unwrap();
    assert!(pfgr(dir.path(), &["gen-ov", "5", "9", "--seed", "1", "--out", "x.ov"]).status.success());
    let out = pfgr(dir.path(), &["solve-ov", "--engine", "diam", "x.ov"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
    let rec = json(&pfgr(dir.path(), &["solve-ov", "--engine", "diam", "--max-d", "9", "x.ov", "--json"]));
    assert_eq!(rec["input"]["d"], 9);

    std::fs::write(dir.path().join("bad.ov"), "1 1 2\n01\n0x\n").unwrap();
    let out = pfgr(dir.path(), &["solve-ov", "--engine", "brute", "bad.ov"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn sat_reduction_and_record_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.cnf"), "p cnf 2 1\n1 2 0\n").unwrap();
    let out = pfgr(dir.path(), &["reduce", "sat2ov", "f.cnf", "--record", "log.jsonl"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("f.ov")).unwrap(), "2 2 1\n1\n0\n1\n0\n");
    let rec = json(&pfgr(dir.path(), &["solve-ov", "--engine", "brute", "f.ov", "--record", "log.jsonl", "--json"]));
    assert_eq!(rec["answer"], true);
    let log = std::fs::read_to_string(dir.path().join("log.jsonl")).unwrap();
    let commands: Vec<String> = log
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["command"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(commands, ["reduce", "solve-ov"]);
}

#[test]
fn calc_prints_ov_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfgr(dir.path(), &["calc"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "d^2 * (n + d) * log^d(n + d)");

    let ledger = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/ledger.toml");
    let claim = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/diameter_claim.toml");
    let rec = json(&pfgr(dir.path(), &["calc", "--ledger", ledger, "--claim", claim, "--via", "ov2diam", "--via", "sat2ov", "--json"]));
    assert_eq!(rec["answer"]["bound"], "m^2 * (2^(n/2) + m) * log^m(2^(n/2) + m)");
    assert_eq!(rec["answer"]["problem"], "CNF-SAT");
}

#[test]
fn bench_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfgr(dir.path(), &["bench", "--suite", "ov-scaling", "--d", "2", "--n-list", "32,64", "--reps", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,d,engine,answer,reduce_ms,solve_ms,total_ms,seed");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert_eq!(cols[3], "true");
    }
}

#[test]
fn deterministic_generation() {
    let dir = tempfile::tempdir().unwrap();
    let a = pfgr(dir.path(), &["gen-ov", "10", "4", "--seed", "3"]);
    let b = pfgr(dir.path(), &["gen-ov", "10", "4", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}
