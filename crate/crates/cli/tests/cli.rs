use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drsub::sets::{BudgetBoxSet, FeasibleSet, SimplexSet};
use drsub::DenseVector;
use drsub_cli::emit::{read_json, Rows};

fn drsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drsub")).args(args).output().expect("binary runs")
}

fn example_graph() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fig2.edgelist")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "q.json", r#"{"s_values": [1, 3], "n": 6}"#);
    for format in ["csv", "json"] {
        let out = dir.path().join(format!("a.{format}"));
        let run = || {
            let r = drsub(&["maximize", "--config", cfg.to_str().unwrap(), "--seed", "5", "--format", format, "--out", out.to_str().unwrap()]);
            assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
            std::fs::read(&out).unwrap()
        };
        assert_eq!(run(), run());
    }
    let c = dir.path().join("c.csv");
    drsub(&["maximize", "--config", cfg.to_str().unwrap(), "--seed", "6", "--out", c.to_str().unwrap()]);
    assert_ne!(std::fs::read(dir.path().join("a.csv")).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn table_csv_has_sorted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "q.json", r#"{"s_values": [3, 1], "n": 5, "seed": 2}"#);
    let out = drsub(&["maximize", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,algorithm,final_value,K,L,mu,c_f");
    let keys: Vec<(String, String)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let algs: Vec<&str> = keys.iter().map(|k| k.1.as_str()).collect();
    assert_eq!(algs, ["fw", "pga", "sdrfw", "fw", "pga", "sdrfw"]);
    assert!(keys[0].0.parse::<f64>().unwrap() < keys[3].0.parse::<f64>().unwrap());
    assert!(lines[1..].iter().all(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap() == 5.0));
}

#[test]
fn dumped_iterates_are_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        r#"{"objective": "random_quadratic", "n": 4, "set": "budget_box", "budget": 1.5, "mu": 1, "seed": 3}"#,
    );
    let simplex = SimplexSet::<f64>::standard(10).unwrap();
    let budget = BudgetBoxSet::<f64>::unit_capped(4, 1.5).unwrap();
    for (args, set) in [
        (vec!["maximize", "--config", cfg.to_str().unwrap()], &budget as &dyn FeasibleSet<f64>),
        (vec!["stability", "--graph", example_graph().to_str().unwrap()], &simplex as &dyn FeasibleSet<f64>),
    ] {
        let out_path = dir.path().join("t.json");
        let mut args = args.clone();
        args.extend(["--dump-iterates", "--format", "json", "--out", out_path.to_str().unwrap()]);
        let r = drsub(&args);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let Rows::Trace(rows) = read_json(&out_path).unwrap().rows else { panic!("trace expected") };
        assert!(!rows.is_empty());
        for row in rows {
            let x = DenseVector::new(row.iterate.unwrap()).unwrap();
            assert!(set.contains(&x, 1e-8), "{x:?}");
        }
    }
}

#[test]
fn stability_defaults_reach_four() {
    let out = drsub(&["stability", "--graph", example_graph().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 52);
    let last: f64 = text.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(last >= 3.99);
}

#[test]
fn smoothness_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k3.json", r#"{"hessian": [[-2, -2, -2], [-2, -2, -2], [-2, -2, -2]], "linear": [2, 2, 2]}"#);
    for mode in ["constant", "gp"] {
        let out = drsub(&["smoothness", "--config", cfg.to_str().unwrap(), "--mode", mode]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!((v["L"].as_f64().unwrap() - 6.0).abs() < 1e-6);
        assert_eq!(v["mode"], mode);
        assert!(v["iterations"].is_u64() && v["residual"].is_number());
    }
}

#[test]
fn online_run_stays_below_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "o.json", r#"{"T": 200, "n": 3, "mu": 1, "seed": 4}"#);
    let out = drsub(&["online", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,reward,cumulative_regret,bound,elapsed_s");
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').take(4).map(|v| v.parse().unwrap()).collect();
        assert!(f[2] <= f[3]);
    }
}

#[test]
fn check_passes_on_shipped_families() {
    let out = drsub(&["check", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["results"].as_array().unwrap().len() >= 20);
}

#[test]
fn failures_emit_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "loop.dimacs", "p edge 2 1\ne 1 1\n");
    let out = drsub(&["stability", "--graph", bad.to_str().unwrap(), "--graph-format", "dimacs"]);
    assert!(!out.status.success());
    let v = stderr_json(&out);
    assert_eq!(v["error"], "parse");
    assert!(v["message"].as_str().unwrap().contains("line 2"));

    let missing = dir.path().join("missing.edgelist");
    let out = drsub(&["stability", "--graph", missing.to_str().unwrap()]);
    assert_eq!(stderr_json(&out)["error"], "io");

    let cfg = write(dir.path(), "bad.json", r#"{"objectve": "quadratic"}"#);
    let out = drsub(&["maximize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stderr_json(&out)["error"], "config");

    let out = drsub(&["maximize", "--out", "/nonexistent/dir/x.csv", "--config", write(dir.path(), "ok.json", r#"{"s_values": [1], "n": 3}"#).to_str().unwrap()]);
    let v = stderr_json(&out);
    assert_eq!(v["error"], "io");
    assert!(v["message"].as_str().unwrap().contains("/nonexistent/dir/x.csv"));
}
