use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scc-preserve"))
        .current_dir(dir)
        .args(args)
        .env_remove("SCC_PRESERVE_FAULT_LIMIT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

const TRIANGLE: &str = "3 6\n0 1\n1 2\n2 0\n1 0\n2 1\n0 2\n";

#[test]
fn st_lower_build_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["gen", "st-lower", "--layers", "2", "-k", "2", "-o", "g.txt"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("g.meta.json").exists());
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(d.join("g.meta.json")).unwrap()).unwrap();
    let cross: Vec<u64> = meta["cross"].as_array().unwrap().iter().map(|c| c["edge"].as_u64().unwrap()).collect();
    assert_eq!(cross.len(), 8);

    let o = run(d, &["--json", "build", "g.txt", "--variant", "st", "--algo", "greedy", "-k", "2", "-o", "h.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json_of(&o);
    let kept: Vec<u64> = report["kept_edges"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(kept.windows(2).all(|w| w[0] < w[1]));
    assert!(cross.iter().all(|c| kept.contains(c)));
    assert_eq!(report["spec"]["variant"], "st");
    assert_eq!(report["input"]["sha256"].as_str().unwrap().len(), 64);

    let o = run(d, &["--json", "verify", "--graph", "g.txt", "--preserver", "h.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_of(&o)["ok"], true);
}

#[test]
fn whole_graph_always_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.txt", TRIANGLE);
    write(d, "all.json", "[0, 1, 2, 3, 4, 5]");
    for variant in ["all-pairs", "global"] {
        let o = run(d, &["verify", "g.txt", "--preserver", "all.json", "-k", "2", "--variant", variant]);
        assert_eq!(code(&o), 0);
    }
    let o = run(d, &["verify", "g.txt", "--preserver", "all.json", "-k", "1", "--variant", "kconn"]);
    assert_eq!(code(&o), 0);
    let o = run(d, &["verify", "g.txt", "--preserver", "all.json", "-k", "1", "--by-cuts"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn fpt_build_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "random", "-n", "6", "-m", "6", "--seed", "3", "--strongly-connected", "-o", "g.txt"])), 0);
    let args = ["--json", "build", "g.txt", "--algo", "fpt", "-k", "1", "--seed", "7"];
    let a = run(d, &args);
    let b = run(d, &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report = json_of(&a);
    assert_eq!(report["seed"], 7);
    assert!(report["fpt"]["lambda"].as_u64().unwrap() >= 1);
    assert!(report["fpt"]["level_container_sizes"].is_array());
    assert!(report.get("wall_time_ms").is_none());
    let timed = run(d, &["--json", "--timing", "build", "g.txt", "--algo", "fpt", "-k", "1", "--seed", "7"]);
    assert!(json_of(&timed)["wall_time_ms"].is_u64());
}

#[test]
fn every_build_pipes_into_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "random", "-n", "6", "-m", "8", "--seed", "11", "--strongly-connected", "-o", "g.txt"])), 0);
    let builds: &[&[&str]] = &[
        &["--variant", "all-pairs", "--algo", "greedy"],
        &["--variant", "all-pairs", "--algo", "hierarchy"],
        &["--variant", "all-pairs", "--algo", "fpt", "--seed", "2"],
        &["--variant", "single-source", "--source", "2", "--algo", "greedy"],
        &["--variant", "single-source", "--source", "2", "--algo", "reduction"],
        &["--variant", "st", "-s", "0", "-t", "4", "--algo", "greedy"],
        &["--variant", "st", "-s", "0", "-t", "4", "--algo", "reduction"],
        &["--variant", "global", "--algo", "reduction"],
        &["--variant", "sourcewise", "--sources", "1,3", "--algo", "greedy"],
        &["--variant", "kconn", "--algo", "greedy", "--demand-pairs"],
    ];
    for extra in builds {
        let mut args = vec!["build", "g.txt", "-k", "1", "-o", "h.json"];
        args.extend_from_slice(extra);
        let o = run(d, &args);
        assert_eq!(code(&o), 0, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
        let o = run(d, &["verify", "g.txt", "--preserver", "h.json", "--shards", "3"]);
        assert_eq!(code(&o), 0, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn broken_preserver_exits_one_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.txt", TRIANGLE);
    write(d, "five.json", "[0, 1, 2, 3, 4]");
    let o = run(d, &["--json", "verify", "g.txt", "--preserver", "five.json", "-k", "1"]);
    assert_eq!(code(&o), 1);
    let r = json_of(&o);
    assert_eq!(r["ok"], false);
    assert!(r["counterexample"]["faults"].is_array());
    let sharded = run(d, &["--json", "verify", "g.txt", "--preserver", "five.json", "-k", "1", "--shards", "4"]);
    assert_eq!(json_of(&sharded)["counterexample"], r["counterexample"]);
}

#[test]
fn usage_and_capability_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.txt", TRIANGLE);
    write(d, "bad.txt", "3 2\n0 1\n");
    write(d, "all.json", "[0, 1, 2, 3, 4, 5]");
    assert_eq!(code(&run(d, &["no-such-command"])), 2);
    assert_eq!(code(&run(d, &["build", "bad.txt", "-k", "1"])), 2);
    assert_eq!(code(&run(d, &["build", "g.txt", "-k", "1", "--variant", "st"])), 2);
    assert_eq!(code(&run(d, &["gen", "st-lower", "-k", "3", "-o", "x.txt"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_scc-preserve"))
        .current_dir(d)
        .args(["verify", "g.txt", "--preserver", "all.json", "-k", "2"])
        .env("SCC_PRESERVE_FAULT_LIMIT", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn inspection_commands_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "baswana", "-k", "1", "-y", "2", "-o", "b.txt"])), 0);
    let h = json_of(&run(d, &["--json", "hierarchy", "b.txt", "-k", "1"]));
    let covered: usize = h["levels"].as_array().unwrap().iter().map(|l| l.as_array().unwrap().len()).sum();
    assert_eq!(covered as u64, h["input"]["n"].as_u64().unwrap());
    assert!(!h["certificates"].as_array().unwrap().is_empty());

    let dec = json_of(&run(d, &["--json", "decompose", "b.txt", "-q", "2", "-k", "1"]));
    assert!(dec["parts"].is_array());

    let cut = json_of(&run(d, &["--json", "impcut", "b.txt", "--x", "0", "--y", "3", "-k", "2", "--enumerate"]));
    assert_eq!(cut["container"]["outcome"], "container");
    assert!(cut["important_cuts"].is_array());

    let crit = json_of(&run(d, &["--json", "critical", "b.txt", "-k", "1"]));
    assert!(crit["critical_edges"].is_array());
    let one = json_of(&run(d, &["--json", "critical", "b.txt", "-k", "1", "--edge", "0"]));
    assert!(one["critical"].is_boolean());
}

#[test]
fn color_family_keeps_colors_in_the_text_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "color", "-x", "2", "-y", "1", "-o", "c.txt"])), 0);
    let text = std::fs::read_to_string(d.join("c.txt")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(' ').count() == 3));
}

#[test]
fn bench_verifies_its_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--json", "bench", "-k", "1", "--random", "1", "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = json_of(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["verified"].as_object().unwrap().values().all(|v| v == true)));
}
