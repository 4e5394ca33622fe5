use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlogic")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn field(out: &Output, key: &str) -> String {
    let prefix = format!("{key}: ");
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in\n{}", stdout(out)))
}

#[test]
fn query_worked_pair() {
    let out = run(&["query", &data("worked.tab"), "110011001100"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "quality"), "(6/12)");
    assert_eq!(field(&out, "compacted"), "111111000000");
}

#[test]
fn query_equal_row() {
    let out = run(&["query", &data("small.tab"), "1100"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "best"), "c");
    assert_eq!(field(&out, "quality"), "(0/4)");
    assert_eq!(field(&out, "feasible"), "c, d");
    assert_eq!(field(&out, "contradictory"), "a, b");
}

#[test]
fn query_reports_bad_symbol_position() {
    let out = run(&["query", &data("bad.tab"), "101"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3, column 2"), "{}", stderr(&out));
}

#[test]
fn query_width_mismatch_is_an_input_error() {
    let out = run(&["query", &data("small.tab"), "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ternary_query() {
    let out = run(&["query", &data("ternary.tab"), "1x"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "mode"), "ternary");
    assert_eq!(field(&out, "row.1"), "query-subset 5/6");
    assert_eq!(field(&out, "row.2"), "equal 1/1");
    assert_eq!(field(&out, "best"), "2");
}

#[test]
fn diagnose_modes() {
    let single = run(&["diagnose", &data("faults.tab"), "110"]);
    assert!(single.status.success());
    assert_eq!(field(&single, "candidates"), "010");
    assert_eq!(field(&single, "faults"), "f2");

    let multiple = run(&["diagnose", &data("faults.tab"), "110", "--mode", "multiple"]);
    assert_eq!(field(&multiple, "candidates"), "011");
    assert_eq!(field(&multiple, "faults"), "f2, f3");

    let none = run(&["diagnose", &data("faults_none.tab"), "110"]);
    assert_eq!(none.status.code(), Some(1));
    assert_eq!(field(&none, "candidates"), "000");
    assert_eq!(field(&none, "consistent"), "no");

    let short = run(&["diagnose", &data("faults.tab"), "11"]);
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn repair_memory() {
    let out = run(&["repair", &data("memory.rep")]);
    assert!(out.status.success());
    assert_eq!(field(&out, "m_a"), "11111000000");
    assert_eq!(field(&out, "cover"), "C2, C3, C5, C7, C8");
    assert_eq!(field(&out, "plan"), "valid");
    assert_eq!(field(&out, "plan.cols"), "5/5");
    assert_eq!(field(&out, "plan.remap"), "C2 -> s1, C3 -> s2, C5 -> s3, C7 -> s4, C8 -> s5");
}

#[test]
fn repair_with_oracle() {
    let out = run(&["repair", &data("memory.rep"), "--oracle"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "oracle.size"), "5");
    assert_eq!(field(&out, "oracle.cover.1"), "C2 C3 C5 C7 C8");
    assert_eq!(field(&out, "oracle.cover.2"), "C2 C3 C5 C8 R9");
    assert_eq!(field(&out, "oracle.cover.3"), "C2 C5 C8 R4 R9");
    assert!(!stdout(&out).contains("oracle.cover.4"));
    assert_eq!(field(&out, "ratio"), "5/5 = 1.000");
    assert_eq!(field(&out, "minimal"), "yes");
}

#[test]
fn repair_over_budget_is_not_repairable() {
    let out = run(&["repair", &data("six_columns.rep")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(field(&out, "plan"), "budget exceeded");
    assert_eq!(field(&out, "plan.cols"), "6/5");
    assert_eq!(field(&out, "status"), "NotRepairable");
}

#[test]
fn repair_falls_back_to_exact_search() {
    let out = run(&["repair", &data("row_fault.rep")]);
    assert!(out.status.success());
    assert_eq!(field(&out, "cover"), "C0, C1, C2");
    assert_eq!(field(&out, "plan.source"), "oracle");
    assert_eq!(field(&out, "plan.spares"), "R1");
}

#[test]
fn sim_worked_pair() {
    let out = run(&["sim", &data("worked.lamp"), &data("worked.dat")]);
    assert!(out.status.success());
    assert_eq!(field(&out, "md"), "110000111001");
    assert_eq!(field(&out, "steps"), "3");
    let dotted = run(&["sim", &data("worked.lamp"), &data("worked.dat"), "--dots"]);
    assert_eq!(field(&dotted, "md"), "1 1 . . . . 1 1 1 . . 1");
}

#[test]
fn sim_step_limit() {
    let out = run(&["sim", &data("worked.lamp"), &data("worked.dat"), "--max-steps", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(field(&out, "error").contains("step limit"));
}

#[test]
fn sim_grid() {
    let out = run(&["sim", "--grid", &data("grid.txt")]);
    assert!(out.status.success());
    for cell in 0..16 {
        let (r, c) = (cell / 4 + 1, cell % 4 + 1);
        if cell % 2 == 0 {
            assert_eq!(field(&out, &format!("P[{r},{c}].md")), "110000111001");
        } else {
            assert_eq!(field(&out, &format!("P[{r},{c}].ma")), "110");
        }
    }
    let bad = run(&["sim", "--grid", &data("grid_fail.txt")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(field(&bad, "P[2,2].error").contains("row 9"));
    assert_eq!(stdout(&bad).matches(".error").count(), 1);
}

#[test]
fn quality_outputs() {
    let out = run(&["quality", "--p", "0.1", "--n", "10", "--k", "0.5", "--hs", "1", "--ha", "1"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "yield"), "0.348678440100");
    assert_eq!(field(&out, "fault_level"), "0.409510000000");
    assert_eq!(field(&out, "time"), "0.250000000000");
    assert_eq!(field(&out, "hardware"), "0.500000000000");
    assert_eq!(field(&out, "estimate"), "0.386503333333");
    let bad = run(&["quality", "--p", "1.5", "--n", "1", "--k", "0", "--hs", "1", "--ha", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_output() {
    let out = run(&["repair", &data("memory.rep"), "--oracle", "--json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["cover"], serde_json::json!(["C2", "C3", "C5", "C7", "C8"]));
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["exit"], 0);
    assert!(doc["inputs"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["repair".to_string(), data("memory.rep"), "--oracle".into()],
        vec!["sim".to_string(), "--grid".into(), data("grid.txt")],
        vec!["query".to_string(), data("small.tab"), "1010".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}

#[test]
fn digest_tracks_content() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tab");
    std::fs::write(&path, "1 2\n10\n").unwrap();
    let path = path.display().to_string();
    let first = field(&run(&["query", &path, "10"]), "inputs");
    std::fs::write(&path, "1 2\n11\n").unwrap();
    let second = field(&run(&["query", &path, "10"]), "inputs");
    assert_ne!(first, second);
}
