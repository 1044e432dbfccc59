use std::path::Path;
use std::process::{Command, Output};

fn dsvd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsvd")).args(args).output().expect("spawn dsvd")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exp1_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = dsvd(&["exp1", "--m", "30,40", "--trials", "2", "--seed", "3", "--out", s(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,size,r,p,q,re1,re2,time_s,seed"));
    assert_eq!(lines.count(), 6);
    assert!(String::from_utf8_lossy(&out.stdout).contains("RCCDSVD2"));

    let json = dir.path().join("report.json");
    let out = dsvd(&["exp1", "--m", "30", "--trials", "3", "--field", "complex", "--out", s(&json), "--format", "json"]);
    assert!(out.status.success());
    let (meta, rows, trials) = dualsvd::bench::read_json(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!((rows.len(), trials.len()), (3, 9));
    assert_eq!(meta.experiment, "exp1");
    assert!(rows.iter().all(|r| r.re1 <= 1e-9 && r.re2 <= 1e-8));
}

#[test]
fn exp2_with_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
    for (path, seed) in [(&a, "1"), (&b, "2")] {
        assert!(dsvd(&["synth-image", "--size", "32", "--seed", seed, "--out", s(path)]).status.success());
    }
    let (csv, gp) = (dir.path().join("sweep.csv"), dir.path().join("sweep.gp"));
    let out = dsvd(&[
        "exp2", "--std", s(&a), "--inf", s(&b), "--r", "2:8:3", "--p", "4", "--q", "0,1", "--out", s(&csv),
        "--emit-gnuplot", s(&gp),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = dualsvd::bench::read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.iter().map(|r| (r.r, r.q)).collect::<Vec<_>>(), [(2, 0), (2, 1), (5, 0), (5, 1), (8, 0), (8, 1)]);
    assert!(std::fs::read_to_string(&gp).unwrap().contains("sweep.csv"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.csv");
    let out = s(&out_path);
    assert_eq!(dsvd(&["exp1", "--m", "30", "--trials", "1", "--defect-demo", "--out", out]).status.code(), Some(3));
    assert_eq!(dsvd(&["exp1", "--field", "quaternion", "--out", out]).status.code(), Some(2));
    assert_eq!(dsvd(&["exp1", "--m", "5", "--out", out]).status.code(), Some(2));
    let missing = dir.path().join("nope.pgm");
    assert_eq!(
        dsvd(&["exp2", "--std", s(&missing), "--inf", s(&missing), "--out", out]).status.code(),
        Some(4)
    );
    let bad_dir = dir.path().join("no/such/dir/r.csv");
    assert_eq!(dsvd(&["exp1", "--m", "30", "--trials", "1", "--out", s(&bad_dir)]).status.code(), Some(4));
}
