use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colorbal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_bis_trivial_and_infeasible() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.txt", "n=2 k=2\n0 0 1 1\n1 2 3 2\n");
    let out = run(&["solve", "bis", "--f", "1", s(&ok)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "kind=BIS f=1\n0\n1\n");

    let bad = write(&dir, "bad.txt", "n=2 k=2\n0 0 2 1\n1 1 3 2\n");
    assert_eq!(code(&run(&["solve", "bis", "--f", "1", s(&bad)])), 2);
    assert_eq!(
        code(&run(&[
            "solve",
            "bis",
            "--f",
            "1",
            "--method",
            "vc",
            s(&bad)
        ])),
        2
    );
}

#[test]
fn solve_json_stats() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.txt", "n=3 k=2\n0 0 2 1\n1 1 4 2\n2 5 6 1\n");
    let sol = dir.path().join("s.txt");
    let out = run(&[
        "solve",
        "mcis",
        "--method",
        "local",
        "--b",
        "2",
        "--json",
        "--out",
        s(&sol),
        s(&inst),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert_eq!(v["stats"]["colors"], 2);
    assert!(v["stats"]["wall_time"].is_number());
    assert_eq!(code(&run(&["verify", s(&inst), s(&sol)])), 0);

    let out = run(&["solve", "bis", "--json", s(&inst)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["stats"]["peak_states"].is_number());
}

#[test]
fn verify_rejects_intersecting_pair() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.txt", "n=2 k=2\n0 0 2 1\n1 1 3 2\n");
    let sol = write(&dir, "s.txt", "kind=BIS f=1\n0\n1\n");
    let out = run(&["verify", "--json", s(&inst), s(&sol)]);
    assert_eq!(code(&out), 2);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["violation"], "intersecting");
}

#[test]
fn usage_and_runtime_errors() {
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["solve", "nope", "x"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["solve", "bis", "/nonexistent/file"])), 1);
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.txt", "n=1 k=1\n0 0 1 1\n");
    assert_eq!(
        code(&run(&["solve", "bis", "--method", "greedy", s(&inst)])),
        64
    );
    assert_eq!(code(&run(&["oracle", "bis", s(&inst)])), 64);
    assert_eq!(code(&run(&["oracle", "bis", "--dev", s(&inst)])), 0);
    let broken = write(&dir, "b.txt", "n=1 k=1\n0 5 1 1\n");
    assert_eq!(code(&run(&["solve", "bis", s(&broken)])), 1);
}

#[test]
fn reduce_solve_decode_pipeline() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "phi.cnf", "p cnf 2 2\n1 2 0\n-1 2 0\n");
    let inst = dir.path().join("inst.txt");
    let meta = dir.path().join("meta.json");
    let sol = dir.path().join("sol.txt");
    let asg = dir.path().join("asg.txt");
    assert_eq!(
        code(&run(&[
            "reduce",
            "indset",
            "--cnf",
            s(&cnf),
            "--out",
            s(&inst),
            "--meta",
            s(&meta)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "bis",
            "--f",
            "1",
            "--out",
            s(&sol),
            s(&inst)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "decode",
            "--meta",
            s(&meta),
            "--out",
            s(&asg),
            s(&inst),
            s(&sol)
        ])),
        0
    );
    let text = fs::read_to_string(&asg).unwrap();
    assert!(text.contains("x2=1"), "{text}");
    let back = dir.path().join("back.txt");
    assert_eq!(
        code(&run(&[
            "encode",
            "--meta",
            s(&meta),
            "--out",
            s(&back),
            s(&inst),
            s(&asg)
        ])),
        0
    );
    assert_eq!(code(&run(&["verify", s(&inst), s(&back)])), 0);

    let bad = write(&dir, "bad.txt", "x1=0\nx2=0\n");
    assert_eq!(
        code(&run(&["encode", "--meta", s(&meta), s(&inst), s(&bad)])),
        2
    );
}

#[test]
fn domset_canonicalize_pipeline() {
    let dir = TempDir::new().unwrap();
    let cnf = write(
        &dir,
        "phi.cnf",
        "p cnf 2 4\n1 -2 0\n1 -2 0\n-1 2 0\n-1 2 0\n",
    );
    let inst = dir.path().join("inst.txt");
    let meta = dir.path().join("meta.json");
    let sol = dir.path().join("sol.txt");
    let canon = dir.path().join("canon.txt");
    assert_eq!(
        code(&run(&[
            "reduce",
            "domset",
            "--cnf",
            s(&cnf),
            "--out",
            s(&inst),
            "--meta",
            s(&meta)
        ])),
        0
    );
    assert_eq!(code(&run(&["solve", "bds", "--out", s(&sol), s(&inst)])), 0);
    assert_eq!(
        code(&run(&[
            "canonicalize",
            "--meta",
            s(&meta),
            "--out",
            s(&canon),
            s(&inst),
            s(&sol)
        ])),
        0
    );
    assert_eq!(code(&run(&["verify", s(&inst), s(&canon)])), 0);
    assert_eq!(
        code(&run(&["decode", "--meta", s(&meta), s(&inst), s(&canon)])),
        0
    );
}

#[test]
fn gen_is_deterministic() {
    let a = run(&[
        "gen",
        "--model",
        "proper-unit",
        "--n",
        "20",
        "--k",
        "3",
        "--seed",
        "5",
    ]);
    let b = run(&[
        "gen",
        "--model",
        "proper-unit",
        "--n",
        "20",
        "--k",
        "3",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout)
        .unwrap()
        .starts_with("n=20 k=3 proper"));
    assert_eq!(
        code(&run(&["gen", "--model", "bogus", "--n", "2", "--k", "1"])),
        64
    );
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.json",
        r#"{"quality": [{"methods": ["greedy", "local"], "model": "uniform-random",
            "n": 8, "k": 3, "param": 2, "instances": 4, "seed": 1}]}"#,
    );
    let csv = dir.path().join("out.csv");
    let out = run(&[
        "bench",
        "--suite",
        s(&suite),
        "--jobs",
        "2",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text
        .starts_with("instance_id,n,k,param,method,outcome,optimum,ratio,wall_time,peak_state\n"));
}
