use std::path::Path;
use std::process::{Command, Output};

use cocausal::bundle::read_bundle;
use cocausal::harness::read_csv;

fn cocausal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocausal")).args(args).output().unwrap()
}

fn generate(out: &Path, seed: &str) -> Output {
    cocausal(&[
        "generate", "--network", "er", "--entities", "40", "--clusters", "2", "--alpha", "0.6", "--beta", "0.2",
        "--gamma", "0.9", "--seed", seed, "--out", out.to_str().unwrap(),
    ])
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(generate(&a, "7").status.success());
    assert!(generate(&b, "7").status.success());
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(read_dir_sorted(&a).len(), 41);
}

#[test]
fn cluster_then_recover() {
    let tmp = tempfile::tempdir().unwrap();
    let bundle = tmp.path().join("b");
    assert!(generate(&bundle, "7").status.success());
    let part = tmp.path().join("part.json");
    let out = cocausal(&[
        "cluster", bundle.to_str().unwrap(), "--algo", "ab-bounded", "--sample-size", "1", "--out",
        part.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&part).unwrap()).unwrap();
    let (_, inst) = read_bundle(&bundle).unwrap();
    let blocks = json["partition"]["blocks"].as_array().unwrap();
    let covered: usize = blocks.iter().map(|b| b.as_array().unwrap().len()).sum();
    assert_eq!(covered, inst.entities.len());
    assert_eq!(json["report"]["pair_counts"].as_array().unwrap().len(), 40 * 39 / 2);
    assert_eq!(json["report"]["sample"].as_array().unwrap().len(), 1);

    // with the true partition, dominant recovery reproduces the dominant graphs
    let rec = tmp.path().join("rec");
    let out = cocausal(&["recover", bundle.to_str().unwrap(), "--out", rec.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(rec.join("report.json").exists());
    assert!(rec.join("recovered_0039.txt").exists());
    let out = cocausal(&[
        "recover", bundle.to_str().unwrap(), "--partition", part.to_str().unwrap(), "--method", "dominant",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn evaluate_writes_csv_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("out/table.csv");
    let out = cocausal(&[
        "evaluate", "--network", "earthquake", "--runs", "2", "--sample-size", "1", "--algo", "ab-bounded", "--algo",
        "fci-baseline", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].runs, 2);
    assert!(tmp.path().join("out/table.json").exists());
}

#[test]
fn sweep_prints_one_row_per_size() {
    let out = cocausal(&["sweep", "--network", "earthquake", "--runs", "3", "--algo", "ab-bounded", "--sizes", "1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("network,algo,sample_size,mean_max_interventions"));
}

#[test]
fn exit_codes() {
    assert_eq!(cocausal(&["generate", "--bogus"]).status.code(), Some(2));
    assert_eq!(cocausal(&["cluster", "x", "--algo", "nope"]).status.code(), Some(2));
    assert_eq!(cocausal(&["generate", "--network", "alarm", "--out", "x"]).status.code(), Some(2));
    assert_eq!(cocausal(&["--help"]).status.code(), Some(0));

    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    // 7 entities cannot be split into 2 equal clusters
    let code = cocausal(&["generate", "--entities", "7", "--out", out.to_str().unwrap()]).status.code();
    assert_eq!(code, Some(3));
    let missing = tmp.path().join("missing");
    assert_eq!(cocausal(&["cluster", missing.to_str().unwrap()]).status.code(), Some(1));
}
