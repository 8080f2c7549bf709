use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nicetile")).current_dir(dir).args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn sphere(dir: &Path, freq: u32) -> String {
    let out = run(dir, &["gen", "sphere", "--freq", &freq.to_string()]);
    assert!(out.status.success());
    let name = format!("sphere{freq}.json");
    std::fs::write(dir.join(&name), &out.stdout).unwrap();
    name
}

#[test]
fn isbell1_reports_two_solutions() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verify", "isbell1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "nicetile.report/1");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["metrics"]["solutions"], 2);
    assert_eq!(r["metrics"]["unrestricted_count"], 10080);
    assert!(r.get("elapsed_ms").is_none());
}

#[test]
fn unsat_modes_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let mesh = sphere(dir.path(), 2);
    let unsat = run(dir.path(), &["color", "--mesh", &mesh, "--k", "7", "--mode", "unsat"]);
    assert_eq!(unsat.status.code(), Some(0));
    assert_eq!(json(&unsat)["status"], "unsat");
    let find = run(dir.path(), &["color", "--mesh", &mesh, "--k", "7", "--mode", "find"]);
    assert_eq!(find.status.code(), Some(1));
    // The icosahedron has nice 6-colorings.
    let ico = sphere(dir.path(), 1);
    let sat = run(dir.path(), &["color", "--mesh", &ico, "--k", "6", "--mode", "unsat"]);
    assert_eq!(sat.status.code(), Some(1));
    let r = json(&sat);
    assert_eq!(r["status"], "sat");
    assert_eq!(r["witnesses"]["coloring"].as_array().unwrap().len(), 12);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = run(dir.path(), &["color", "--mesh", "nope.json", "--k", "7"]);
    assert_eq!(missing.status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), "{\n  \"vertices\": 3,\n  oops\n}").unwrap();
    let bad = run(dir.path(), &["color", "--mesh", "bad.json", "--k", "7"]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(run(dir.path(), &["--bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["gen", "construction", "klein"]).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["--seed", "7", "verify", "curvature", "--freq", "3", "--cycles", "50"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(dir.path(), &["--seed", "8", "verify", "curvature", "--freq", "3", "--cycles", "50"]);
    assert_ne!(json(&a)["input_digest"], json(&c)["input_digest"]);
    let timed = run(dir.path(), &["--timings", "verify", "isbell1"]);
    assert!(json(&timed)["elapsed_ms"].is_number());
}

#[test]
fn out_writes_the_file() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--out", "report.json", "verify", "isbell1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["command"], "verify isbell1");
    // No temporary files are left behind.
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
}

#[test]
fn tiling_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let gen = run(dir.path(), &["gen", "construction", "cylinder7"]);
    assert!(gen.status.success());
    std::fs::write(dir.path().join("cyl.json"), &gen.stdout).unwrap();
    let r = run(dir.path(), &["verify", "tiling", "--doc", "cyl.json"]);
    assert_eq!(r.status.code(), Some(0));
    let v = json(&r);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["metrics"]["tiles"], 31);
    let genus = run(dir.path(), &["gen", "construction", "genus4(3)"]);
    assert!(genus.status.success());
    let moser = json(&run(dir.path(), &["gen", "construction", "moser_spindle"]));
    assert_eq!(moser["points"].as_array().unwrap().len(), 7);
}

#[test]
fn sweep_case_and_exports() {
    let dir = TempDir::new().unwrap();
    let mesh = sphere(dir.path(), 2);
    let sweep = run(dir.path(), &["sweep", "--mesh", &mesh]);
    assert_eq!(sweep.status.code(), Some(0));
    let case = json(&run(dir.path(), &["case", "classify", "--mesh", &mesh]));
    assert_eq!(case["metrics"]["case"], "Case1a");
    assert_eq!(case["metrics"]["total_multiplicity"], 12);
    let dot = run(dir.path(), &["export", "dot", "--mesh", &mesh]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("graph"));
    assert_eq!(text.matches(" -- ").count(), 120);
    let obj = String::from_utf8(run(dir.path(), &["export", "obj", "--mesh", &mesh]).stdout).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 42);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 80);
}

#[test]
fn euler_and_premises() {
    let dir = TempDir::new().unwrap();
    let mesh = sphere(dir.path(), 2);
    let e = run(dir.path(), &["verify", "euler", "--mesh", &mesh]);
    assert_eq!(e.status.code(), Some(0));
    assert_eq!(json(&e)["metrics"]["euler_characteristic"], 2);
    let p = run(dir.path(), &["verify", "premises", "--mesh", &mesh, "--d1", "1", "--d2", "1"]);
    assert!(matches!(p.status.code(), Some(0 | 1)));
    assert!(json(&p)["metrics"].is_object());
}
