use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

fn taxlog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taxlog")).env_remove("SARA_ROOT").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn case(id: &str) -> String {
    mini().join("cases").join(format!("{id}.pl")).display().to_string()
}

#[test]
fn prove_exit_codes() {
    let pos = taxlog(&["prove", &case("s7703_b_3_pos")]);
    assert_eq!(pos.status.code(), Some(0), "{}", stdout(&pos));
    let neg = taxlog(&["prove", &case("s7703_b_3_neg")]);
    assert_eq!(neg.status.code(), Some(1));
    let goal = taxlog(&["prove", &case("s7703_b_3_neg"), "s7703_a(alice, bob, 2018)"]);
    assert_eq!(goal.status.code(), Some(0));
}

#[test]
fn query_prints_answers() {
    let o = taxlog(&["query", &case("tax_single"), "tax(alice, 2017, T)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "{T = 9727}");
    let none = taxlog(&["query", &case("tax_single"), "tax(bob, 2018, 1)"]);
    assert_eq!(none.status.code(), Some(1));
    assert_eq!(stdout(&none).trim(), "false.");
}

#[test]
fn trace_ends_with_answer() {
    let o = taxlog(&["trace", &case("tax_zero")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().starts_with("tax(carl, 2019, Amount)"), "{out}");
    assert_eq!(out.lines().last().unwrap(), "answer: {Amount = 0}");
}

#[test]
fn eval_on_fixture() {
    let data = mini().display().to_string();
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("rows.jsonl").display().to_string();
    let o = taxlog(&["--data", &data, "--seed", "7", "eval", "--task", "numerical", "--split", "train", "--jsonl", &jsonl]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("accuracy 1.00 (2/2)"));
    assert_eq!(std::fs::read_to_string(&jsonl).unwrap().lines().count(), 2);

    let wrong = taxlog(&["--data", &data, "eval", "--task", "numerical", "--split", "test", "--predictor", "constant", "--constant", "6000"]);
    assert_eq!(wrong.status.code(), Some(1));
    assert!(stdout(&wrong).contains("accuracy 0.00 (0/1)"));
}

#[test]
fn operational_errors_are_json() {
    for args in [
        vec!["eval", "--task", "entailment", "--split", "test"],
        vec!["--data", "/nonexistent/sara", "stats"],
        vec!["prove", "/nonexistent/case.pl"],
        vec!["query", "/dev/null", "tax(alice, 2017"],
    ] {
        let o = taxlog(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert!(err["error"].as_str().is_some_and(|s| !s.is_empty()), "{args:?}");
    }
    let mismatch = taxlog(&["--data", &mini().display().to_string(), "eval", "--task", "numerical", "--split", "test", "--predictor", "majority"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn lint_and_slots() {
    let o = taxlog(&["lint"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("negative cycles: none"));
    assert!(out.contains("undefined predicates: none"));
    let s = taxlog(&["slots", "--json"]);
    let table: serde_json::Value = serde_json::from_slice(&s.stdout).unwrap();
    assert!(table["entries"].as_array().unwrap().iter().any(|e| e["name"] == "s7703_b_3"));
}

#[test]
fn stats_on_fixture() {
    let o = taxlog(&["--data", &mini().display().to_string(), "stats", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["cases"], 7);
    assert_eq!(s["answers"]["combined"]["max"], 14635.0);
    assert_eq!(s["tree"]["nodes"], 8);
}
