use std::path::PathBuf;
use std::process::{Command, Output};

use listpac::dims::{kds_dimension, sauer_check};
use listpac::hclass::{generate_grid, random_class, LabeledSample};
use listpac::learn::{compress, reconstruct, CompressConfig};
use listpac::shift::shift_fixed_point;

fn listpac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listpac")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = listpac(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("listpac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn dims_row_matches_library() {
    let g = generate_grid(2, 3).unwrap();
    let path = scratch("grid.hcf", &g.to_hcf());
    let got = stdout(&["dims", "--class", path.to_str().unwrap(), "--kind", "kds", "--k", "2"]);
    assert_eq!(got, kds_dimension(&g, 2, u64::MAX).unwrap().to_csv_row() + "\n");
}

#[test]
fn sauer_line_matches_library() {
    let h = random_class(4, 5, 40, 3).unwrap();
    let r = sauer_check(&h, 2).unwrap();
    let got = stdout(&["sauer", "--class", "random:4:5:40:3", "--k", "2"]);
    assert_eq!(got, format!("OK bound={} size={}\n", r.bound, r.size));
}

#[test]
fn usage_errors_exit_two() {
    let out = listpac(&["dims", "--kind", "kds", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--class"));
    assert_eq!(listpac(&["oig", "--class", "grid:2:2", "--k", "0"]).status.code(), Some(2));
    assert_eq!(listpac(&[]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let bad = scratch("bad.hcf", "2 2\n1 3\n");
    let out = listpac(&["oig", "--class", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert!(out.stdout.is_empty());
    let s = scratch("conflict.txt", "1 1\n1 2\n");
    let out = listpac(&["predict", "--class", "grid:2:2", "--sample", s.to_str().unwrap(), "--point", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn version_names_schema_and_prng() {
    let v = stdout(&["--version"]);
    assert!(v.contains("listpac.learning_curve.v1") && v.contains("ChaCha8"));
}

#[test]
fn shift_writes_class_and_trace() {
    let trace = scratch("trace.csv", "");
    let src = scratch("diag.hcf", "2 2\n1 1\n2 2\n");
    let got = stdout(&["shift", "--class", src.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    let h = listpac::hclass::parse_class("2 2\n1 1\n2 2\n").unwrap();
    let t = shift_fixed_point(&h);
    assert_eq!(got, t.final_class.to_hcf());
    assert_eq!(std::fs::read_to_string(trace).unwrap(), t.to_csv());
}

#[test]
fn orient_summary() {
    let got = stdout(&["orient", "--class", "grid:2:2", "--k", "1", "--exact"]);
    assert!(got.starts_with("direction,key,oriented\n"));
    assert!(got.ends_with("# max_outdegree=1 bound=exact\n"));
    let greedy = stdout(&["orient", "--class", "grid:2:2", "--k", "1", "--bound", "ds:2"]);
    assert!(greedy.lines().last().unwrap().contains("bound=2"));
    let out = listpac(&["orient", "--class", "grid:2:2", "--k", "1", "--bound", "ds:1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compress_then_reconstruct() {
    let g = generate_grid(2, 3).unwrap();
    let sample = LabeledSample::labeled_by(&[2, 3], &[0, 1, 1, 0, 0, 1, 1, 1]);
    let s = scratch("sample.txt", &sample.to_text());
    let text = stdout(&[
        "compress", "--class", "grid:2:3", "--sample", s.to_str().unwrap(), "--k", "2", "--t", "1", "--seed", "4",
        "--n", "3", "--l", "2",
    ]);
    let mut config = CompressConfig::new(2, 1, 4);
    config.n = Some(3);
    config.l = Some(2);
    let lib = compress(&g, &sample, &config, None).unwrap();
    assert_eq!(text, lib.to_text());
    let file = scratch("compressed.txt", &text);
    let lists = stdout(&["reconstruct", "--class", "grid:2:3", "--input", file.to_str().unwrap()]);
    assert_eq!(lists, reconstruct(&g, &lib.selected, &lib.params).unwrap().to_csv());
    let p = stdout(&["predict", "--class", "grid:2:3", "--sample", s.to_str().unwrap(), "--point", "2", "--k", "2"]);
    assert_eq!(p, "3\n");
}

#[test]
fn simulate_to_file() {
    let out = scratch("curve.csv", "");
    let args = [
        "simulate", "--class", "grid:2:3", "--k", "2", "--m-grid", "8,16", "--trials", "4", "--seed", "1", "--n", "2",
        "--l", "2", "--weights", "1,3", "--threads", "2", "--out", out.to_str().unwrap(),
    ];
    assert!(stdout(&args).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# schema=listpac.learning_curve.v1 prng=ChaCha8 seed=1 k=2 t=1"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn lowerbound_meets_bound() {
    let got = stdout(&["lowerbound", "--class", "grid:2:2", "--k", "1", "--m", "2", "--trials", "100"]);
    assert!(got.lines().nth(1).unwrap().ends_with(",true"));
}
