use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pi1scan_core::{fixtures, render_json};

fn pi1scan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pi1scan")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn count_prints_value_and_source() {
    let o = pi1scan(&["count", "h3", "7"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("7013320"));
    assert!(out.contains("source: Qian's formula"));

    let o = pi1scan(&["count", "dedekind", "4"]);
    assert_eq!(stdout(&o).lines().next(), Some("168"));
    assert!(stdout(&o).contains("Kisielewicz"));

    let o = pi1scan(&["count", "h3", "0"]);
    assert_eq!(stdout(&o).lines().next(), Some("1"));

    let o = pi1scan(&["count", "dedekind", "10"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("0..=9"));
}

#[test]
fn enumerate_counts_and_streams() {
    let o = pi1scan(&["enumerate", "--n", "5", "--count"]);
    assert_eq!(stdout(&o).trim(), "33");
    let o = pi1scan(&["enumerate", "--n", "4"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    assert!(stdout(&o).lines().all(|l| pi1scan_core::parse_complex(l).is_ok()));
}

#[test]
fn enumerate_shards_partition_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let whole = stdout(&pi1scan(&["enumerate", "--n", "6"]));
    let mut parts = Vec::new();
    for i in 1..=3 {
        let ck = dir.path().join(format!("ck{i}.jsonl"));
        let shard = format!("{i}/3");
        let o = pi1scan(&["enumerate", "--n", "6", "--shard", &shard, "--checkpoint", ck.to_str().unwrap()]);
        assert!(o.status.success());
        let text = stdout(&o);
        let last: serde_json::Value =
            serde_json::from_str(fs::read_to_string(&ck).unwrap().lines().last().unwrap()).unwrap();
        assert_eq!(last["shard"], i);
        assert_eq!(last["emitted"], text.lines().count());
        parts.extend(text.lines().map(String::from));
    }
    let mut whole: Vec<String> = whole.lines().map(String::from).collect();
    whole.sort();
    parts.sort();
    assert_eq!(whole, parts);
    assert_eq!(whole.len(), 2135);
}

#[test]
fn bad_shard_is_rejected() {
    let o = pi1scan(&["enumerate", "--n", "4", "--shard", "0/2"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("1 <= i <= m"));
}

fn write_complex(dir: &Path, name: &str, k: &pi1scan_core::Complex) -> String {
    let p = dir.join(name);
    fs::write(&p, render_json(k)).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let b3 = write_complex(dir.path(), "b3.json", &fixtures::braid_b3());
    let o = pi1scan(&["verify", "--file", &b3, "--expect", "B3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("group: B3"));

    let o = pi1scan(&["verify", "--file", &b3, "--expect", "ZxZ"]);
    assert_eq!(o.status.code(), Some(2));

    let o = pi1scan(&["verify", "--file", &b3, "--hom-work-cap", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let d6 = write_complex(dir.path(), "d6.json", &fixtures::dihedral_d6());
    let o = pi1scan(&["verify", "--file", &d6, "--expect", "D6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order: 6"));
}

#[test]
fn verify_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "0 1;0 1 2").unwrap();
    let o = pi1scan(&["verify", "--file", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("facet `0 1` contained in `0 1 2`"), "{}", stderr(&o));
}

#[test]
fn classify_and_report_six_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pi1scan(&["classify", "--n", "6", "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("6,Cyclic(2),1"));

    let o = pi1scan(&["report", d, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("| Z2 |") || text.contains("| Z2"));
    assert!(text.contains("diff empty"));
    // deterministic output
    assert_eq!(stdout(&pi1scan(&["report", d, "--check"])), text);
}

#[test]
fn partial_shards_are_marked() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for s in ["1/3", "3/3"] {
        assert!(pi1scan(&["classify", "--n", "6", "--shard", s, "--out", d]).status.success());
    }
    let o = pi1scan(&["report", d]);
    assert!(stdout(&o).starts_with("PARTIAL: shards 1, 3 of 3 present"));
    let o = pi1scan(&["report", d, "--check"]);
    assert_eq!(o.status.code(), Some(2));

    assert!(pi1scan(&["classify", "--n", "6", "--shard", "2/3", "--out", d]).status.success());
    let o = pi1scan(&["report", d, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn report_detects_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("distribution.csv"), "n,group,count\n6,Trivial,10\n6,ZxZ,1\n").unwrap();
    let o = pi1scan(&["report", dir.path().to_str().unwrap(), "--check"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("Cyclic(2): expected 1, got 0"));
    assert!(text.contains("ZxZ: unexpected group"));
}

#[test]
fn sharded_run_resumes_and_merges() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pi1scan(&["run", "--n", "6", "--shards", "4", "--resume", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("groups: Cyclic(2)"));
    let first = fs::read_to_string(dir.path().join("groups.json")).unwrap();
    assert!(dir.path().join("shard-2-of-4").join("checkpoint.jsonl").exists());

    // a second invocation reads every unit from the checkpoints
    let o = pi1scan(&["run", "--n", "6", "--shards", "4", "--resume", d]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("groups.json")).unwrap(), first);

    let whole = stdout(&pi1scan(&["run", "--n", "6"]));
    assert_eq!(whole, stdout(&o));

    let o = pi1scan(&["report", d, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn single_shard_run_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pi1scan(&["run", "--n", "6", "--shard", "1/2", "--resume", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = pi1scan(&["report", d]);
    assert!(stdout(&o).starts_with("PARTIAL"), "{}", stdout(&o));
}

#[test]
fn worker_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_pi1scan"))
        .args(["run", "--n", "6"])
        .env("PI1SCAN_WORKERS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_pi1scan"))
        .args(["run", "--n", "6"])
        .env("PI1SCAN_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!o.status.success());
}

#[test]
fn pure_prints_size() {
    let o = pi1scan(&["pure", "--n", "6", "--mode", "nontrivial"]);
    assert!(o.status.success());
    let n: usize = stdout(&o).trim().parse().unwrap();
    let o = pi1scan(&["pure", "--n", "6", "--mode", "noncyclic"]);
    let m: usize = stdout(&o).trim().parse().unwrap();
    assert!(m < n);
}
