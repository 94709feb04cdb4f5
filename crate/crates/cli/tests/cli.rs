use std::fs;
use std::path::Path;

use clusterlab::instances::{parse_instance, serialize_instance, Instance};
use clusterlab_cli::{run, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("clusterlab").chain(args.iter().copied()))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_triangle(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("tri.edges");
    fs::write(&p, "3 3\n1 2\n2 3\n1 3\n").unwrap();
    p
}

#[test]
fn gen_pvc3d_writes_a_parsable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_triangle(dir.path());
    let out = dir.path().join("inst.json");
    assert_eq!(cli(&["gen", "pvc3d", "--graph", path(&graph), "--k", "1", "--s", "2", "--out", path(&out)]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    let Instance::Geometric(inst) = parse_instance(&text).unwrap() else { panic!("expected a geometric instance") };
    assert_eq!(inst.dimension(), 3);
    assert_eq!(inst.candidates().len(), 3);
    assert!(inst.threshold().is_some());
    assert_eq!(inst.meta_k(), Some(1));
    assert!(inst.meta().contains_key("nu"));
    assert!(inst.meta().contains_key("multiplicities"));
}

#[test]
fn generated_instances_round_trip_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_triangle(dir.path());
    let grid = dir.path().join("grid.json");
    fs::write(&grid, r#"{"n": 2, "k": 1, "sets": [[[[1, 2], [2, 2]]]]}"#).unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["gen", "metric", "--graph", path(&graph), "--k", "1", "--s", "2"],
        vec!["gen", "pvc3d", "--graph", path(&graph), "--k", "2", "--s", "3"],
        vec!["gen", "pvc4d", "--graph", path(&graph), "--k", "1", "--s", "2"],
        vec!["gen", "gridtiling", "--grid", path(&grid)],
    ];
    for (i, args) in runs.into_iter().enumerate() {
        let out = dir.path().join(format!("out{i}.json"));
        let mut args = args;
        args.extend(["--out", path(&out)]);
        assert_eq!(cli(&args), EXIT_OK, "{args:?}");
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text, "{args:?}");
        // same flags, same bytes
        let again = dir.path().join(format!("again{i}.json"));
        let n = args.len();
        args[n - 1] = path(&again);
        assert_eq!(cli(&args), EXIT_OK);
        assert_eq!(fs::read_to_string(&again).unwrap(), text);
    }
}

#[test]
fn planar_and_brute_report_the_same_cost() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst2d.json");
    let text = r#"{
  "dimension": 2,
  "power": 1,
  "candidates": [["0","0"],["10","0"],["0","10"],["10","10"],["5","5"],["20","3"]],
  "clients": [
    {"coords": ["1","1"], "weight": 1},
    {"coords": ["9","1"], "weight": 2},
    {"coords": ["1","9"], "weight": 1},
    {"coords": ["9","9"], "weight": 1},
    {"coords": ["19","4"], "weight": 3},
    {"coords": ["6","4"], "weight": 1}
  ]
}"#;
    fs::write(&inst, text).unwrap();
    let mut costs = Vec::new();
    for solver in ["brute", "planar"] {
        let out = dir.path().join(format!("{solver}.json"));
        assert_eq!(cli(&["solve", solver, "--inst", path(&inst), "--k", "3", "--out", path(&out)]), EXIT_OK);
        let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["solver"], solver);
        costs.push(v["cost"].clone());
    }
    assert_eq!(costs[0], costs[1]);
}

#[test]
fn solve_reads_k_from_meta_and_checks_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_triangle(dir.path());
    let inst = dir.path().join("m.json");
    assert_eq!(cli(&["gen", "metric", "--graph", path(&graph), "--k", "1", "--s", "2", "--out", path(&inst)]), EXIT_OK);
    let out = dir.path().join("sol.json");
    assert_eq!(cli(&["solve", "brute", "--inst", path(&inst), "--out", path(&out)]), EXIT_OK);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["cost"], serde_json::json!([["5", "1"]]));
    assert_eq!(v["threshold_met"], true);
    // the planar solver only takes geometric instances
    assert_eq!(cli(&["solve", "planar", "--inst", path(&inst)]), EXIT_USAGE);
}

#[test]
fn verify_suites_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    assert_eq!(cli(&["verify", "descartes", "--dim", "4", "--trials", "100", "--out", path(&out)]), EXIT_OK);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(cli(&["verify", "reduction", "--kind", "metric", "--out", path(&dir.path().join("r.json"))]), EXIT_OK);
    let eq = dir.path().join("e.json");
    assert_eq!(cli(&["verify", "oracle-equivalence", "--instances", "4", "--out", path(&eq)]), EXIT_OK);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.edges");
    assert_eq!(cli(&["gen", "pvc3d", "--graph", path(&missing), "--k", "1", "--s", "1"]), EXIT_USAGE);
    assert_eq!(cli(&["verify", "descartes", "--dim", "5"]), EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(cli(&["solve", "brute"]), EXIT_USAGE);
    let graph = write_triangle(dir.path());
    assert_eq!(cli(&["gen", "metric", "--graph", path(&graph), "--k", "9", "--s", "1"]), EXIT_USAGE);
    let bad_out = dir.path().join("nowhere").join("x.json");
    assert_eq!(cli(&["gen", "metric", "--graph", path(&graph), "--k", "1", "--s", "1", "--out", path(&bad_out)]), EXIT_USAGE);
}

#[test]
fn bench_writes_csv_with_bounded_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    assert_eq!(cli(&["bench", "--sizes", "6", "--ks", "2,3", "--instances", "1", "--out", path(&out)]), EXIT_OK);
    let mut rd = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["size", "k", "solver", "nodes", "curves", "max_curve_len", "bound", "wall_time_secs"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows.iter().filter(|r| &r[2] == "planar") {
        assert!(r[5].parse::<usize>().unwrap() <= r[6].parse::<usize>().unwrap());
    }
}
