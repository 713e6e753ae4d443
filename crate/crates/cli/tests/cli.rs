use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use confluent_cli::corpus::Manifest;
use confluent_core::formats::{read_ground_truth, read_points};
use confluent_core::{GroundTruthTree, OrientedSample};

fn confluent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confluent")).args(args).env_clear().output().unwrap()
}

fn ok(args: &[&str]) {
    let out = confluent(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// Runs the command, expects failure and returns its one-line diagnostic.
fn fails(args: &[&str]) -> String {
    let out = confluent(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "), "{err}");
    err
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every file under `dir`, relative path and contents, sorted.
fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn pipeline(root: &Path) {
    let d = |n: &str| root.join(n);
    ok(&["synth", "-o", s(&d("gt")), "--trees", "3", "--seed", "4", "--leaves", "5", "--tangent-noise", "0.2", "--flip-prob", "0.02", "--dropout", "0.1"]);
    ok(&["reconstruct", s(&d("gt")), "-o", s(&d("arb")), "-k", "40", "--omit-timing"]);
    ok(&["reconstruct", s(&d("gt")), "-o", s(&d("mst")), "-k", "40", "--mode", "geodesic", "--omit-timing"]);
    ok(&["graph-dump", s(&d("gt")), "-o", s(&d("nbr")), "--flavor", "anisotropic", "-k", "40", "--arcs"]);
    ok(&["evaluate", "--truth", s(&d("gt")), "--recon", s(&d("arb")), "--neighbors", s(&d("nbr")), "-o", s(&d("ev_arb"))]);
    ok(&["evaluate", "--truth", s(&d("gt")), "--recon", s(&d("mst")), "-o", s(&d("ev_mst"))]);
    ok(&["compare", s(&d("ev_mst")), s(&d("ev_arb")), "-o", s(&d("compare.csv"))]);
}

#[test]
fn every_command_is_byte_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline(a.path());
    pipeline(b.path());
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert!(sa.len() > 25, "{} files", sa.len());
    for ((pa, ca), (pb, cb)) in sa.iter().zip(&sb) {
        assert_eq!(pa, pb);
        assert!(ca == cb, "{} differs between runs", pa.display());
    }
    assert!(a.path().join("arb/tree_000.tree.stats.json").exists());
    assert!(a.path().join("nbr/tree_002.arcs").exists());
    let summary = fs::read_to_string(a.path().join("ev_arb/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.lines().last().unwrap().starts_with("ALL,"));
}

#[test]
fn default_corpus_layout() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "-o", s(dir.path())]);
    let m = Manifest::read(dir.path()).unwrap();
    assert_eq!(m.kind, "ground-truth");
    assert_eq!(m.entries.len(), 15);
    let count = |ext: &str| fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext)).count();
    assert_eq!((count("gt"), count("pts"), count("json")), (15, 15, 1));
}

fn distance_to_tree(gt: &GroundTruthTree, s: &OrientedSample) -> f64 {
    (0..gt.len())
        .filter_map(|v| gt.parent[v].map(|p| (gt.positions[p], gt.positions[v])))
        .map(|(a, b)| {
            let ab = b - a;
            let t = ((s.position - a).dot(ab) / ab.norm_squared()).clamp(0.0, 1.0);
            (a + ab * t - s.position).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn uncorrupted_cloud_lies_on_its_tree() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "-o", s(dir.path()), "--trees", "1"]);
    let gt: GroundTruthTree = read_ground_truth(fs::File::open(dir.path().join("tree_000.gt")).map(std::io::BufReader::new).unwrap()).unwrap();
    let pts: Vec<OrientedSample> = read_points(fs::File::open(dir.path().join("tree_000.pts")).map(std::io::BufReader::new).unwrap()).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        assert!(distance_to_tree(&gt, p) < 1e-9);
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[corpus]\ntrees = 2\nseed = 5\n[generator]\nn_leaves = 3\n").unwrap();
    let out = dir.path().join("gt");
    ok(&["synth", "--config", s(&cfg), "-o", s(&out), "--trees", "1"]);
    let m = Manifest::read(&out).unwrap();
    assert_eq!(m.entries.len(), 1);
    assert_eq!(m.config["corpus"]["seed"], 5);
    assert_eq!(m.config["generator"]["n_leaves"], 3);
}

#[test]
fn single_file_mode() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    ok(&["synth", "-o", s(&d("gt")), "--trees", "1", "--leaves", "3"]);
    let pts = d("gt/tree_000.pts");
    ok(&["reconstruct", s(&pts), "-o", s(&d("t.tree")), "-k", "30", "--root-index", "0"]);
    ok(&["reconstruct", s(&pts), "-o", s(&d("u.tree")), "-k", "30", "--root-near", "0,0,0"]);
    ok(&["graph-dump", s(&pts), "-o", s(&d("t.nbr")), "-k", "4", "--arcs"]);
    assert!(d("t.arcs").exists());
    ok(&["evaluate", "--truth", s(&d("gt/tree_000.gt")), "--recon", s(&d("t.tree")), "--points", s(&pts), "--neighbors", s(&d("t.nbr")), "-o", s(&d("ev"))]);
    ok(&["compare", s(&d("ev")), s(&d("ev")), "-o", s(&d("c.csv"))]);
    let c = fs::read_to_string(d("c.csv")).unwrap();
    assert!(c.lines().skip(1).all(|l| l.ends_with(",tie")), "{c}");
}

#[test]
fn errors_are_one_line_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    assert!(fails(&["reconstruct", s(&d("missing.pts")), "-o", s(&d("x.tree")), "--root-index", "0"]).contains("missing.pts"));

    fs::write(d("blocker"), "").unwrap();
    assert!(fails(&["synth", "-o", s(&d("blocker/out")), "--trees", "1"]).contains("blocker"));

    fs::write(d("empty.pts"), "# nothing\n").unwrap();
    fails(&["reconstruct", s(&d("empty.pts")), "-o", s(&d("x.tree")), "--root-index", "0"]);

    ok(&["synth", "-o", s(&d("gt")), "--trees", "1", "--leaves", "3"]);
    assert!(fails(&["reconstruct", s(&d("gt/tree_000.pts")), "-o", s(&d("x.tree"))]).contains("root"));
    fails(&["reconstruct", s(&d("gt/tree_000.pts")), "-o", s(&d("x.tree")), "--root-index", "0", "--epsilon", "0"]);

    fs::write(d("bad.toml"), "[graph]\nkk = 1\n").unwrap();
    fails(&["synth", "--config", s(&d("bad.toml")), "-o", s(&d("gt2"))]);

    ok(&["synth", "-o", s(&d("gt3")), "--trees", "2", "--leaves", "3"]);
    ok(&["reconstruct", s(&d("gt3")), "-o", s(&d("rc3")), "-k", "20"]);
    let mut m = Manifest::read(&d("rc3")).unwrap();
    m.entries.remove(1);
    m.write(&d("rc3")).unwrap();
    let err = fails(&["evaluate", "--truth", s(&d("gt3")), "--recon", s(&d("rc3")), "-o", s(&d("ev"))]);
    assert!(err.contains("tree_001"), "{err}");
}

#[test]
fn usage_errors_are_one_line_too() {
    fails(&["reconstruct"]);
    fails(&["synth", "-o", "x", "--trees", "many"]);
    fails(&["reconstruct", "a.pts", "-o", "b", "--root-near", "1,2"]);
    assert!(confluent(&["--help"]).status.success());
}
