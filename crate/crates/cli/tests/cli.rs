use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graph-morse")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn names(v: &Value) -> Vec<String> {
    let mut out: Vec<String> = v.as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    out.sort();
    out
}

#[test]
fn build_lasso() {
    let r = json(&["build", &path("lasso.json")]);
    assert_eq!(r["homology"]["h1_free_rank"], 2);
    assert_eq!(r["homology"]["h1_torsion"], serde_json::json!([]));
    assert_eq!(r["agreement"], true);
    assert_eq!(names(&r["critical_cells"]["dim1"]), ["1x(3,4)", "3x(2,4)"]);
    assert!(r.get("timing").is_none());
}

#[test]
fn build_bowtie() {
    let r = json(&["build", &path("bowtie.json")]);
    assert_eq!(r["homology"]["h1_free_rank"], 4);
    assert_eq!(
        names(&r["critical_cells"]["dim1"]),
        ["1x(4,5)", "2x(1,3)", "3x(2,4)", "3x(2,5)", "4x(2,5)"]
    );
    assert_eq!(names(&r["critical_cells"]["dim2"]), ["(1,3)x(4,5)"]);
}

#[test]
fn build_single_edge() {
    let r = json(&["build", &path("edge.txt")]);
    assert_eq!(r["homology"]["h1_free_rank"], 0);
    assert_eq!(r["homology"]["h0_rank"], 1);
}

#[test]
fn build_k5_and_max_policy() {
    let a = json(&["build", &path("k5.txt")]);
    let b = json(&["build", &path("k5.txt"), "--policy", "max"]);
    assert_eq!(a["homology"]["h1_torsion"], serde_json::json!([2]));
    assert_eq!(a["homology"], b["homology"]);
    assert_eq!(b["input"]["policy"], "max");
}

#[test]
fn tree_flag_overrides_input() {
    let r = json(&["build", &path("lasso.json"), "--tree", "1-2,2-3,3-4"]);
    assert_eq!(r["homology"]["h1_free_rank"], 2);
    assert_eq!(r["input"]["tree"], serde_json::json!([[1, 2], [2, 3], [3, 4]]));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["build", &path("bowtie.json")]);
    let b = run(&["build", &path("bowtie.json")]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["verify", "--samples", "12", "--seed", "3"]);
    let b = run(&["verify", "--samples", "12", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_is_opt_in() {
    let r = json(&["build", &path("star.txt"), "--timing"]);
    assert!(r["timing"]["milliseconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn gauge_counts() {
    for (file, params, constraints) in [("lasso.json", 2, 0), ("star.txt", 1, 0), ("bowtie.json", 5, 1)] {
        let g = json(&["gauge", &path(file)]);
        assert_eq!(g["params"].as_array().unwrap().len(), params, "{file}");
        assert_eq!(g["constraints"].as_array().unwrap().len(), constraints, "{file}");
    }
}

#[test]
fn gauge_lasso_phase() {
    let g = json(&["gauge", &path("lasso.json")]);
    let phase = g["assignment"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["edge"] == "2x(3,4)")
        .unwrap();
    let param = g["params"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["cell"] == "1x(3,4)")
        .unwrap();
    let name = param["name"].as_str().unwrap();
    assert_eq!(phase["expr"]["params"][name], 1);
    assert_eq!(phase["expr"]["const"], 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = run(&["build", &path("star.txt"), "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(r["homology"]["h1_free_rank"], 1);
}

#[test]
fn emit_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["build", &path("lasso.json"), "--emit-dot", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let d2 = std::fs::read_to_string(dir.path().join("lasso.d2.dot")).unwrap();
    assert!(d2.starts_with("digraph D2 {"));
    assert!(d2.contains("label=\"3x(2,4)\\n11\", color=red"));
    assert!(d2.contains("\"(1,2)\" [label=\"(1,2)\\n2\", color=red"));
    let g = std::fs::read_to_string(dir.path().join("lasso.graph.dot")).unwrap();
    assert!(g.contains("3 -- 4 [label=\"8\", style=dashed]"));
}

#[test]
fn verify_passes() {
    let out = run(&["verify", "--max-vertices", "2", "--samples", "1"]);
    assert!(out.status.success());
    let out = run(&["verify", "--max-vertices", "6", "--samples", "25", "--corpus", "k5", "--cross-validate"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("k5: v=5 e=10 H1=Z^6 + Z_2 ok"));
    assert!(text.ends_with("verify: 26 graphs, seed 0, 0 failed\n"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n2 x\n").unwrap();
    let disconnected = dir.path().join("split.txt");
    std::fs::write(&disconnected, "1 2\n3 4\n").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["build".into(), "missing.json".into()],
        vec!["build".into(), bad.to_string_lossy().into()],
        vec!["gauge".into(), disconnected.to_string_lossy().into()],
        vec!["build".into(), path("lasso.json"), "--root".into(), "2".into()],
        vec!["build".into(), path("lasso.json"), "--tree".into(), "1-2".into()],
        vec!["verify".into(), "--max-vertices".into(), "11".into()],
        vec!["verify".into(), "--corpus".into(), "nosuch".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error"), "{args:?}");
    }
}
