//! End-to-end runs of the `anonhard` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn anonhard(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anonhard"))
        .args(args)
        .current_dir(dir)
        .env_remove("ANONHARD_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn theorem_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let o = anonhard(
        &[
            "verify",
            "theorem",
            "--builtin",
            "k4",
            "--reduction",
            "3abp",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("canonical cost                 expected 450  observed 450"));
    let o = anonhard(
        &[
            "verify",
            "theorem",
            "--builtin",
            "k4",
            "--reduction",
            "4ap8",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("expected 137  observed 137"));
}

#[test]
fn distances_on_petersen() {
    let dir = tempfile::tempdir().unwrap();
    let o = anonhard(
        &["verify", "distances", "--builtin", "petersen", "--out", "r"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("[PASS] 3abp case").count(), 12);
    assert!(text.contains("distance cases passing"));
    assert!(text.contains("expected 12/12  observed 12/12"));
    assert!(text.ends_with("14 checks, 14 passed, 0 failed\n"));
    let csv = fs::read_to_string(dir.path().join("r/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 15);
    assert_eq!(
        fs::read_to_string(dir.path().join("r/report.txt")).unwrap(),
        text
    );
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "roundtrip",
        "--builtin",
        "k33",
        "--seed",
        "7",
        "--trials",
        "40",
        "--out",
        "a",
    ];
    let first = stdout(&anonhard(&args, dir.path()));
    let again = stdout(&anonhard(&args, dir.path()));
    assert_eq!(first, again);
    assert!(first.contains("expected 40  observed 40"));
}

#[test]
fn build_writes_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = anonhard(
        &[
            "build",
            "--reduction",
            "4ap8",
            "--builtin",
            "k4",
            "--out",
            "inst",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = fs::read_to_string(dir.path().join("inst/rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 30);
    assert!(rows.lines().all(|l| l.split(',').count() == 8));
    assert!(rows.lines().last().unwrap().starts_with("u:4,"));
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("inst/provenance.json")).unwrap())
            .unwrap();
    assert_eq!(prov[0]["vertex"], 1);
    let layout: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("inst/layout.json")).unwrap())
            .unwrap();
    assert_eq!(layout["width"], 8);
    // Building twice into the same directory gives the same bytes.
    anonhard(
        &[
            "build",
            "--reduction",
            "4ap8",
            "--builtin",
            "k4",
            "--out",
            "inst",
        ],
        dir.path(),
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("inst/rows.csv")).unwrap(),
        rows
    );
}

#[test]
fn cover_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(anonhard(
        &[
            "gen-graph",
            "--random",
            "12",
            "--seed",
            "4",
            "--out",
            "g.txt"
        ],
        d
    )
    .status
    .success());
    assert!(
        anonhard(&["solve-vc", "--graph", "g.txt", "--out", "cover.json"], d)
            .status
            .success()
    );
    let o = anonhard(
        &[
            "vc-to-solution",
            "--reduction",
            "3abp",
            "--graph",
            "g.txt",
            "--cover",
            "cover.json",
            "--out",
            "sol.json",
        ],
        d,
    );
    assert!(o.status.success());
    let o = anonhard(
        &[
            "canonicalize",
            "--reduction",
            "3abp",
            "--graph",
            "g.txt",
            "--clustering",
            "sol.json",
            "--out",
            "can.json",
        ],
        d,
    );
    let line = stdout(&o);
    let costs: Vec<&str> = line
        .trim()
        .trim_start_matches("cost ")
        .split(" -> ")
        .collect();
    assert_eq!(costs[0], costs[1]);
    let o = anonhard(
        &[
            "solution-to-vc",
            "--reduction",
            "3abp",
            "--graph",
            "g.txt",
            "--clustering",
            "can.json",
            "--out",
            "back.json",
        ],
        d,
    );
    assert!(o.status.success());
    let cover = fs::read_to_string(d.join("cover.json")).unwrap();
    let back = fs::read_to_string(d.join("back.json")).unwrap();
    let size = |s: &str| serde_json::from_str::<Vec<usize>>(s).unwrap().len();
    assert_eq!(size(&cover), size(&back));
}

#[test]
fn solve_small_table() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("rows.csv"),
        "0,0,1\n0,0,1\n1,1,0\n1,1,1\n0,1,1\n",
    )
    .unwrap();
    let o = anonhard(
        &["solve", "--exact", "--k", "2", "--rows", "rows.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "cost 5\noptimal true\n[[0,1,4],[2,3]]\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(anonhard(&["no-such-command"], d).status.code(), Some(2));
    assert_eq!(anonhard(&["verify", "theorem"], d).status.code(), Some(2));
    assert_eq!(
        anonhard(
            &[
                "build",
                "--reduction",
                "3abp",
                "--graph",
                "missing.txt",
                "--out",
                "x"
            ],
            d
        )
        .status
        .code(),
        Some(2)
    );
    fs::write(d.join("cover.json"), "[1]").unwrap();
    let o = anonhard(
        &[
            "vc-to-solution",
            "--reduction",
            "3abp",
            "--builtin",
            "k4",
            "--cover",
            "cover.json",
            "--out",
            "s.json",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edge (2, 3) is uncovered"));
}
