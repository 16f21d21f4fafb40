use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-gap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_path10(dir: &TempDir) -> std::path::PathBuf {
    let mut text = String::from("# path on 10 vertices\np wgraph 10 9\n");
    for x in 0..10 {
        text.push_str(&format!("v {x} 1\n"));
    }
    for x in 0..9 {
        text.push_str(&format!("e {x} {} 1\n", x + 1));
    }
    let p = dir.path().join("path10.wg");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn build_writes_edgelist_and_summary() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("t22.wg");
    let out = run(&[
        "build",
        "--h",
        "2",
        "--k",
        "2",
        "--format",
        "edgelist",
        "--out",
        path_arg(&file),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&file).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "p wgraph 13 20");
    let report = json(&out);
    assert_eq!(report["results"][0]["n"], 13);
    assert_eq!(report["results"][0]["m"], 20);
    assert_eq!(report["config"]["command"], "build");
    assert!(report["version"].is_string());
}

#[test]
fn build_dot_to_stdout() {
    let out = run(&["build", "--h", "1", "--k", "1", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.trim_start().starts_with("graph"));
    assert_eq!(dot.matches("--").count(), 3);
    let mut nodes: Vec<&str> = dot
        .lines()
        .filter(|l| l.contains("--"))
        .flat_map(|l| {
            l.split(['-', '['])
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .take(2)
        })
        .collect();
    nodes.sort();
    nodes.dedup();
    assert_eq!(nodes, ["0", "1", "2"]);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["build", "--h", "70"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["spectrum"])), 64);
    assert_eq!(
        code(&run(&["spectrum", "--in", "/nonexistent/graph.wg"])),
        64
    );
    assert_eq!(code(&run(&["spectrum", "--h", "2", "--tol", "-1"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn spectrum_of_triangle() {
    let out = run(&["spectrum", "--h", "1", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!((r["results"][0]["lambda1"].as_f64().unwrap() - 3.0).abs() <= 1e-8);
    assert_eq!(r["config"]["k"], 1);
    assert_eq!(r["config"]["tolerance"], 1e-8);
}

#[test]
fn spectrum_from_file() {
    let dir = TempDir::new().unwrap();
    let p = write_path10(&dir);
    let out = run(&["spectrum", "--in", path_arg(&p)]);
    assert_eq!(code(&out), 0);
    let lambda = json(&out)["results"][0]["lambda1"].as_f64().unwrap();
    let exact = 2.0 * (1.0 - (std::f64::consts::PI / 10.0).cos());
    assert!((lambda - exact).abs() <= 1e-8, "{lambda} vs {exact}");
}

#[test]
fn spectrum_iterative_certifies_residual() {
    let out = run(&["spectrum", "--h", "5", "--k", "32", "--solver", "iterative"]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["results"][0];
    assert_eq!(r["solver"], "iterative");
    assert!(r["residual"].as_f64().unwrap() <= 1e-8);
    assert!(r["lambda1"].as_f64().unwrap() >= 1.0 / (7.0 * 1024.0));
}

#[test]
fn spectrum_convergence_failure_exits_2() {
    let out = run(&[
        "spectrum",
        "--h",
        "4",
        "--k",
        "4",
        "--solver",
        "iterative",
        "--max-iter",
        "5",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(code(&out), 2);
    assert!(json(&out)["results"][0]["residual"].as_f64().unwrap() > 1e-14);
}

#[test]
fn verify_small_cases_pass() {
    let out = run(&["verify", "--h", "1", "--k", "1", "--trials", "50"]);
    assert_eq!(code(&out), 0);
    let results = json(&out)["results"].as_array().unwrap().clone();
    let gap = results
        .iter()
        .find(|r| r["claim"] == "theorem1_gap")
        .unwrap();
    assert_eq!(gap["pass"], true);
    assert!((gap["lhs"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    let out = run(&["verify", "--h", "3", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(r["results"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    assert_eq!(r["config"]["k"], 8);
    assert_eq!(r["config"]["seed"], 7);
}

#[test]
fn verify_is_reproducible_and_reports_failures() {
    let a = run(&["verify", "--h", "4", "--seed", "7", "--trials", "300"]);
    let b = run(&["verify", "--h", "4", "--seed", "7", "--trials", "300"]);
    assert_eq!(a.stdout, b.stdout);
    // The subdivision ratio dips below one at height 4.
    assert_eq!(code(&a), 1);
    let stderr = String::from_utf8_lossy(&a.stderr);
    assert!(stderr.contains("subdivision_scaling"), "{stderr}");
    let failing: Vec<Value> = json(&a)["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .cloned()
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["claim"], "subdivision_scaling");
}

#[test]
fn metrics_on_hat_tree_and_k5() {
    let out = run(&["metrics", "--h", "2"]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["results"][0];
    assert!(r["distances"]["diameter"].as_u64().unwrap() >= 8);
    assert_eq!(r["root_eccentricity"], 8);

    let dir = TempDir::new().unwrap();
    let p = dir.path().join("k5.wg");
    let mut text = String::from("p wgraph 5 10\n");
    for x in 0..5 {
        text.push_str(&format!("v {x} 1\n"));
    }
    for x in 0..5 {
        for y in x + 1..5 {
            text.push_str(&format!("e {x} {y} 1\n"));
        }
    }
    std::fs::write(&p, text).unwrap();
    let out = run(&["metrics", "--in", path_arg(&p)]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["results"][0];
    assert_eq!(r["distances"]["diameter"], 1);
    assert_eq!(r["max_degree"], 4);
}

#[test]
fn mixing_writes_trajectory() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("mix.json");
    let out = run(&[
        "mixing",
        "--h",
        "2",
        "--method",
        "exact",
        "--out",
        path_arg(&report),
    ]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let t_mix = r["results"][0]["t_mix"].as_u64().unwrap();
    assert_eq!(r["results"][0]["cap_reached"], false);
    let csv_text = std::fs::read_to_string(dir.path().join("mix.trajectory.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["t", "tv"]);
    let tv: Vec<f64> = reader
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(tv.len() as u64, t_mix + 1);
    assert!(tv.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(*tv.last().unwrap() <= 0.25);
}

#[test]
fn sweep_rows_follow_the_expected_trends() {
    let out = run(&["sweep", "--h-min", "2", "--h-max", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let num = |r: &csv::StringRecord, name: &str| r[col(name)].parse::<f64>().unwrap();
    let mut prev_product: Option<f64> = None;
    for (i, r) in rows.iter().enumerate() {
        let h = 2.0 + i as f64;
        assert_eq!(num(r, "h"), h);
        assert!(r[col("error")].is_empty());
        assert!(num(r, "lambda1") >= num(r, "bound_1_over_7k2"));
        let band = num(r, "t_mix") / (h * 4f64.powf(h));
        assert!((0.05..=20.0).contains(&band), "h={h}: {band}");
        let product = num(r, "product_u");
        assert!((product - num(r, "lambda1") * num(r, "avg_sq_dist")).abs() <= 1e-9 * product);
        if let Some(p) = prev_product {
            assert!(product / p <= 2.0);
        }
        prev_product = Some(product);
    }
}
