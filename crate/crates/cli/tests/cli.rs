//! End-to-end runs of the `votecut` binary.

use std::path::Path;
use std::process::{Command, Output};

fn votecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_votecut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

const EXAMPLE2: &str = "candidates: a, b, c, d\n4: a > c > b > d\n2: d > a > c > b\n3: d > c > a > b\n2: b > d > a > c\n";

#[test]
fn winners_schulze_and_ranked_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e.election", EXAMPLE2);
    let out = votecut(&["winners", &file, "--no-timing"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "winners: d\n");

    let out = votecut(&["winners", &file, "--rule", "ranked-pairs", "--no-timing"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "winner: d\n");

    // determinism: identical invocations give byte-identical reports
    let again = votecut(&["winners", &file, "--no-timing"]);
    assert!(!out.stdout.is_empty());
    assert_eq!(stdout(&again), "winners: d\n");

    let json = votecut(&["winners", &file, "--no-timing", "--json"]);
    assert!(stdout(&json).contains("\"winners\""));
}

#[test]
fn winners_rejects_empty_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.election", "candidates:\n");
    let out = votecut(&["winners", &file]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn realize_then_winners() {
    let dir = tempfile::tempdir().unwrap();
    let wmg = write(
        dir.path(),
        "f.wmg",
        "candidates: a, b, d, p\na d 4\nb p 6\nd b 6\nd p 2\np a 4\n",
    );
    let election = dir.path().join("f.election");
    let out = votecut(&["realize", &wmg, "-o", election.to_str().unwrap()]);
    assert!(out.status.success());
    let out = votecut(&["winners", election.to_str().unwrap(), "--no-timing"]);
    assert_eq!(stdout(&out), "winners: a, d\n");
}

#[test]
fn control_brute_poly_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    // d beats p 3:1; deleting d is forbidden, deleting q lets p tie... build
    // a 3-candidate deletion instance decided yes by both solvers
    let inst = "candidates: d, p, q\n2: d > q > p\n1: q > p > d\n1: p > q > d\n\
[control]\ntype = delete-candidates\nmode = destructive\nmodel = nonunique\n\
rule = schulze\ndistinguished = d\nlimits = dc:1\n";
    let file = write(dir.path(), "i.control", inst);
    let brute = votecut(&["control", &file, "--solver", "brute", "--no-timing"]);
    assert!(brute.status.success(), "{}", stdout(&brute));
    let poly = votecut(&["control", &file, "--solver", "poly", "--no-timing"]);
    assert!(poly.status.success());
    let first = |o: &Output| stdout(o).lines().next().unwrap_or_default().to_string();
    assert_eq!(first(&brute), first(&poly));

    // poly solver refuses constructive instances
    let bad = inst.replace("mode = destructive", "mode = constructive");
    let file = write(dir.path(), "bad.control", &bad);
    let out = votecut(&["control", &file, "--solver", "poly"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn control_guard_refusal_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = String::from("candidates: c0, c1, c2, c3, c4, c5, c6, p\n");
    for i in 0..24 {
        inst.push_str(&format!(
            "1: c{} > c{} > c{} > c{} > c{} > c{} > c{} > p\n",
            i % 7,
            (i + 1) % 7,
            (i + 2) % 7,
            (i + 3) % 7,
            (i + 4) % 7,
            (i + 5) % 7,
            (i + 6) % 7
        ));
    }
    inst.push_str(
        "[control]\ntype = multimode\nexact = false\nmode = constructive\nmodel = unique\nrule = schulze\ndistinguished = p\nlimits = ac:0, dc:2, av:0, dv:3, b:2\n",
    );
    let file = write(dir.path(), "big.control", &inst);
    let out = Command::new(env!("CARGO_BIN_EXE_votecut"))
        .args(["control", &file])
        .env("VOTECUT_GUARD", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_3sat_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "phi.cnf", "p cnf 3 2\n1 2 -3 0\n-1 2 3 0\n");
    let out = votecut(&[
        "reduce",
        &cnf,
        "--from",
        "3sat",
        "--variant",
        "flawed-original",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let listing = stdout(&out);
    assert!(listing.contains("phi_flawed_original.control"));
    assert!(listing.contains("phi_flawed_original.prov"));
    let instance_path = dir.path().join("phi_flawed_original.control");
    let text = std::fs::read_to_string(&instance_path).unwrap();
    assert!(text.matches('>').count() > 0);
    // 20 candidates in the generated instance
    let header = text.lines().next().unwrap();
    assert_eq!(header.matches(',').count() + 1, 20);
    let solved = votecut(&["control", instance_path.to_str().unwrap(), "--no-timing"]);
    assert!(solved.status.success());
    assert!(stdout(&solved).starts_with("decision: no"));

    // malformed clause: exit 1
    let bad = write(dir.path(), "bad.cnf", "p cnf 4 1\n1 2 3 4 0\n");
    let out = votecut(&["reduce", &bad, "--from", "3sat"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduce_rx3c_emits_four_instances() {
    let dir = tempfile::tempdir().unwrap();
    let rx3c = write(
        dir.path(),
        "cover.rx3c",
        "base: e1 e2 e3\ntriple: e1 e2 e3\ntriple: e1 e2 e3\ntriple: e1 e2 e3\n",
    );
    let out = votecut(&[
        "reduce",
        &rx3c,
        "--from",
        "rx3c",
        "--rule",
        "schulze",
        "--model",
        "nonunique",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let listing = stdout(&out);
    for name in ["eccavdv", "edcavdv", "ccrv", "dcrv"] {
        assert!(
            listing.contains(&format!("cover_{name}.control")),
            "{listing}"
        );
    }
    // the constructive instance has one add and one delete to spend
    let text = std::fs::read_to_string(dir.path().join("cover_eccavdv.control")).unwrap();
    assert!(text.contains("limits = av:1, dv:1"));
    // round-trip: the emitted file is solvable and decides yes
    let solved = votecut(&[
        "control",
        dir.path().join("cover_eccavdv.control").to_str().unwrap(),
        "--no-timing",
    ]);
    assert!(solved.status.success());
    assert!(stdout(&solved).starts_with("decision: yes"));
}

#[test]
fn cut_queries() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.digraph", "vertices: s t v\ns v\nv t\nt s\n");
    let out = votecut(&[
        "cut",
        &g,
        "--problem",
        "ppvc",
        "-s",
        "s",
        "-t",
        "t",
        "-k",
        "1",
        "--no-timing",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "decision: yes\ncut: v\n");

    let out = votecut(&[
        "cut",
        &g,
        "--problem",
        "min",
        "-s",
        "s",
        "-t",
        "t",
        "--no-timing",
    ]);
    assert_eq!(stdout(&out), "size: 1\ncut: v\n");

    let direct = write(dir.path(), "d.digraph", "vertices: s t\ns t\n");
    let out = votecut(&["cut", &direct, "--problem", "min", "-s", "s", "-t", "t"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_suite_runs() {
    let out = votecut(&[
        "verify",
        "--suite",
        "ibc",
        "--instances",
        "50",
        "--no-timing",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("suite.ibc: pass"));
    let out = votecut(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(1));
}
