use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wtap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtap")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "fig2.json");
    assert!(wtap(&["gen", "fig2", "--d", "4", "--m", "10", "--out", &inst]).status.success());

    let base = json(&wtap(&["solve", "--algorithm", "uplink2", &inst]));
    assert_eq!(base["weight"], 88);
    assert!(base["paths"].as_array().unwrap().len() >= 8);

    let greedy = json(&wtap(&["solve", "--algorithm", "relgreedy", "--eps", "1", &inst]));
    assert_eq!(greedy["weight"], 44);
    assert_eq!(greedy["k"], 2);

    let k1 = json(&wtap(&["solve", "--eps", "1", "--k-override", "1", &inst]));
    assert_eq!(k1["weight"], 88);

    let exact = json(&wtap(&["exact", &inst]));
    assert_eq!(exact["weight"], 44);

    let ratio = json(&wtap(&["ratio", "--k", "2", &inst]));
    assert_eq!(ratio["rho"], "1/2");

    let comp = json(&wtap(&["component", "--rho", "1/2", "--k", "2", &inst]));
    assert_eq!(comp["slack"], "0");
}

#[test]
fn decompose_an_exact_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "fig3.json");
    let sol = path(dir.path(), "sol.json");
    assert!(wtap(&["gen", "fig3", "--m", "3", "--out", &inst]).status.success());
    assert!(wtap(&["exact", &inst, "--out", &sol]).status.success());
    let report = json(&wtap(&["decompose", "--eps", "1/2", "--solution", &sol, &inst]));
    assert_eq!(report["guarantees"], "ok");
    assert!(report["lemmas"]["checks"].as_array().unwrap().iter().any(|c| c["name"] == "branching"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    fs::write(&bad, r#"{"n":2,"root":0,"edges":[[0,1]],"links":[]}"#).unwrap();
    assert_eq!(wtap(&["solve", &bad]).status.code(), Some(2));
    fs::write(&bad, "n 3\ne 0 1\n").unwrap();
    assert_eq!(wtap(&["solve", &bad]).status.code(), Some(2));

    let big = path(dir.path(), "big.json");
    assert!(wtap(&["gen", "random", "--n", "25", "--links", "30", "--seed", "1", "--out", &big]).status.success());
    assert_eq!(wtap(&["exact", &big]).status.code(), Some(3));
    assert_eq!(wtap(&["solve", "--eps", "0", &big]).status.code(), Some(1));
}

#[test]
fn bench_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bench.json");
    fs::write(
        &cfg,
        r#"{"seed": 9, "instances": [{"kind": "random", "count": 4, "n_max": 8}],
            "algorithms": [{"name": "uplink2"}, {"name": "relgreedy", "eps": "1"}]}"#,
    )
    .unwrap();
    let a = wtap(&["bench", &cfg]);
    let b = wtap(&["bench", &cfg]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["rows"].as_array().unwrap().len(), 8);

    let csv = wtap(&["bench", &cfg, "--format", "csv", "--seed", "10"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("instance_id,params,algorithm,weight,exact_weight,ratio,iterations,wall_ms,error"));
    assert_eq!(text.lines().count(), 9);
}
