//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria that need the case distribution read it from `$SARA_ROOT`. When
//! it is absent they report FAIL with the reason and do not abort the run;
//! set `ACCEPTANCE_STRICT=1` to make any FAIL fail the test.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{bottom_up, gen_program, ground_substitutions, kb_of, random_term, sld_answers, CONSTS, VARS};
use taxlog_core::{apply, lint, parse_query, prove, unify_checked, Bindings, Number, SolveLimits, Solver, Term};
use taxlog_sara::case::{Split, Task};
use taxlog_sara::eval::{delta, delta_accurate, evaluate, EvalReport, Predictor, CONSTANT_BASELINE};
use taxlog_sara::kb::statute_kb;
use taxlog_sara::loader::{data_root, load_dataset, Dataset};
use taxlog_sara::schedule::BracketSchedule;
use taxlog_sara::stats::{corpus_stats, Parts, Summary};
use taxlog_sara::{audit, statute_tree};

struct Outcome {
    name: &'static str,
    pass: bool,
    /// The failure comes from a check that could not run.
    blocked: bool,
    detail: String,
}

fn outcome(name: &'static str, failures: Vec<String>, passed: String) -> Outcome {
    let pass = failures.is_empty();
    Outcome { name, pass, blocked: false, detail: if pass { passed } else { failures.join("; ") } }
}

fn blocked(name: &'static str, why: &str) -> Outcome {
    Outcome { name, pass: false, blocked: true, detail: format!("not run: {why}") }
}

fn int(n: i64) -> Number {
    Number::Int(n.into())
}

fn dataset() -> Result<Dataset, String> {
    let root = data_root(None).map_err(|e| e.to_string())?;
    load_dataset(&root).map_err(|e| e.to_string())
}

// ---- solver topline ----

fn topline(ds: &Dataset) -> (Outcome, Option<EvalReport>) {
    let kb = statute_kb().unwrap();
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut train_entailment = None;
    let expected = [(Split::Train, Task::Entailment, 176), (Split::Test, Task::Entailment, 100), (Split::Train, Task::Numerical, 80), (Split::Test, Task::Numerical, 20)];
    let mut summary = Vec::new();
    for (split, task, n) in expected {
        let r = match evaluate(ds, &kb, &Predictor::Solver, split, task, None) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{split} {task}: {e}"));
                continue;
            }
        };
        if r.n_cases != n {
            failures.push(format!("{split} {task}: {} cases, expected {n}", r.n_cases));
        }
        if !r.all_correct() {
            let wrong: Vec<&str> = r.rows.iter().filter(|x| !x.correct).map(|x| x.id.as_str()).take(10).collect();
            failures.push(format!("{split} {task}: {}/{} correct, e.g. {}", r.correct, r.n_cases, wrong.join(",")));
        }
        let inexact = r.rows.iter().filter(|x| x.delta.is_some_and(|d| d != 0.0)).count();
        if inexact > 0 {
            failures.push(format!("{split} {task}: {inexact} cases with nonzero delta"));
        }
        summary.push(format!("{split} {task} {}/{}", r.correct, r.n_cases));
        if (split, task) == (Split::Train, Task::Entailment) {
            train_entailment = Some(r);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    (outcome("solver topline", failures, format!("{} in {secs:.1}s", summary.join(", "))), train_entailment)
}

// ---- baselines ----

fn baselines(ds: &Dataset) -> Outcome {
    let kb = statute_kb().unwrap();
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    match evaluate(ds, &kb, &Predictor::Majority, Split::Test, Task::Entailment, None) {
        Ok(r) if r.accuracy == 0.5 => detail.push(format!("majority {:.2} ±{:.1}", r.accuracy, 100.0 * r.ci90)),
        Ok(r) => failures.push(format!("majority entailment {:.3}, expected 0.50", r.accuracy)),
        Err(e) => failures.push(e.to_string()),
    }
    match evaluate(ds, &kb, &Predictor::Constant(int(CONSTANT_BASELINE)), Split::Test, Task::Numerical, None) {
        Ok(r) if r.accuracy == 0.2 => detail.push(format!(
            "constant {CONSTANT_BASELINE} {:.2} ±{:.1} normal, ±{:.1} t (reported 15.8)",
            r.accuracy,
            100.0 * r.ci90,
            100.0 * r.ci90_t.unwrap_or(f64::NAN)
        )),
        Ok(r) => failures.push(format!("constant numerical {:.3}, expected 0.20", r.accuracy)),
        Err(e) => failures.push(e.to_string()),
    }
    outcome("baselines", failures, detail.join(", "))
}

// ---- metric spot checks ----

fn metric_spot_checks() -> Outcome {
    let mut failures = Vec::new();
    let cases = [(10_000, 10_000, 0.0, true), (0, 4_999, 0.9998, true), (100_000, 89_999, 1.0001, false), (0, 5_000, 1.0, false), (100_000, 90_000, 1.0, false)];
    for (y, yhat, want, accurate) in cases {
        let d = delta(&int(y), &int(yhat)).unwrap();
        if (d - want).abs() > 1e-12 {
            failures.push(format!("delta({y}, {yhat}) = {d}, expected {want}"));
        }
        if delta_accurate(&int(y), &int(yhat)).unwrap() != accurate {
            failures.push(format!("delta({y}, {yhat}) accuracy should be {accurate}"));
        }
    }
    if delta(&int(-1), &int(0)).is_ok() {
        failures.push("negative gold accepted".into());
    }
    outcome("metric spot-checks", failures, format!("{} delta values exact, threshold strict at 1", cases.len()))
}

// ---- dataset statistics ----

type Row = (f64, f64, f64, f64, f64);

fn decimals(x: f64) -> i32 {
    let s = format!("{x}");
    s.split_once('.').map_or(0, |(_, f)| f.len() as i32)
}

fn same_at(published: f64, ours: f64, places: i32) -> bool {
    let scale = 10f64.powi(places);
    (published * scale).round() == (ours * scale).round()
}

/// Exact at two decimals.
fn compare_exact(label: &str, published: Row, ours: Option<&Summary>, out: &mut Vec<String>) {
    let Some(s) = ours else {
        out.push(format!("{label}: missing"));
        return;
    };
    let got = [s.min, s.max, s.mean, s.stddev, s.median];
    let want = [published.0, published.1, published.2, published.3, published.4];
    for (i, field) in ["min", "max", "avg", "stddev", "median"].iter().enumerate() {
        if !same_at(want[i], got[i], 2) {
            out.push(format!("{label} {field} {:.2} vs {:.2}", got[i], want[i]));
        }
    }
}

/// Within 2%, or equal at the precision printed.
fn close(published: f64, ours: f64) -> bool {
    same_at(published, ours, decimals(published)) || (ours - published).abs() <= 0.02 * published.abs()
}

fn compare_close(label: &str, published: Row, ours: Option<&Summary>, out: &mut Vec<String>) {
    let Some(s) = ours else {
        out.push(format!("{label}: missing"));
        return;
    };
    let got = [s.min, s.max, s.mean, s.stddev, s.median];
    let want = [published.0, published.1, published.2, published.3, published.4];
    for (i, field) in ["min", "max", "avg", "stddev", "median"].iter().enumerate() {
        if !close(want[i], got[i]) {
            out.push(format!("{label} {field} {:.2} vs {}", got[i], want[i]));
        }
    }
}

fn compare_parts(label: &str, published: [Option<Row>; 4], ours: &Parts<Summary>, out: &mut Vec<String>) {
    let got = [&ours.train, &ours.test, &ours.statutes, &ours.combined];
    for (i, part) in ["train", "test", "statutes", "combined"].iter().enumerate() {
        if let Some(p) = published[i] {
            compare_close(&format!("{label} {part}"), p, got[i].as_ref(), out);
        }
    }
}

fn statistics(ds: &Dataset) -> Outcome {
    let s = corpus_stats(ds);
    let mut failures = Vec::new();

    // numerical answers
    compare_exact("answers train", (0.0, 2_242_833.0, 85_804.86, 258_179.30, 15_506.50), s.answers.train.as_ref(), &mut failures);
    compare_exact("answers test", (0.0, 243_097.0, 65_246.50, 78_123.13, 26_874.00), s.answers.test.as_ref(), &mut failures);
    compare_exact("answers combined", (0.0, 2_242_833.0, 81_693.19, 233_695.33, 17_400.50), s.answers.combined.as_ref(), &mut failures);

    // statute tree
    match &s.tree {
        Some(t) => {
            if (t.leaves, t.nodes) != (132, 193) {
                failures.push(format!("tree {} leaves {} nodes, expected 132 and 193", t.leaves, t.nodes));
            }
            for (label, published, got) in [("leaf depth", (1.0, 6.0, 3.6, 0.8, 4.0), &t.leaf_depth), ("node depth", (0.0, 6.0, 3.2, 1.0, 3.0), &t.node_depth)] {
                let fields = [(published.0, got.min), (published.1, got.max), (published.2, got.mean), (published.3, got.stddev), (published.4, got.median)];
                if fields.iter().any(|(p, g)| !same_at(*p, *g, 1)) {
                    failures.push(format!("{label} {got} vs {published:?}"));
                }
            }
        }
        None => failures.push("no statute text".into()),
    }

    // language
    let v = &s.vocabulary;
    for (part, published, got) in [("train", 867.0, v.train), ("test", 535.0, v.test), ("statutes", 768.0, v.statutes), ("combined", 1596.0, v.combined)] {
        match got {
            Some(n) if close(published, n as f64) => {}
            other => failures.push(format!("vocabulary {part} {other:?} vs {published}")),
        }
    }
    compare_parts(
        "sentence words",
        [Some((4.0, 138.0, 12.3, 9.1, 11.0)), Some((4.0, 34.0, 11.6, 4.5, 10.0)), Some((1.0, 88.0, 16.5, 14.9, 12.5)), Some((1.0, 138.0, 12.7, 9.5, 11.0))],
        &s.sentence_words,
        &mut failures,
    );
    compare_parts(
        "case sentences",
        [Some((1.0, 9.0, 4.2, 1.7, 4.0)), Some((2.0, 7.0, 3.8, 1.3, 4.0)), None, Some((1.0, 9.0, 4.1, 1.6, 4.0))],
        &s.case_sentences,
        &mut failures,
    );
    compare_parts(
        "case words",
        [Some((17.0, 179.0, 48.5, 22.2, 43.0)), Some((17.0, 81.0, 41.6, 14.7, 38.0)), None, Some((17.0, 179.0, 46.3, 20.3, 41.0))],
        &s.case_words,
        &mut failures,
    );
    compare_close("section sentences", (2.0, 16.0, 8.3, 4.7, 9.0), s.section_sentences.as_ref(), &mut failures);
    compare_close("section words", (62.0, 1151.0, 488.9, 310.4, 549.0), s.section_words.as_ref(), &mut failures);

    outcome("dataset statistics", failures, "answers, tree and language tables match".into())
}

// ---- engine properties ----

const UNIFY_PAIRS: usize = 10_000;
const ORACLE_PROGRAMS: u64 = 1_000;

fn unification_properties() -> (usize, usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let thetas: Vec<Bindings> = ground_substitutions().collect();
    let mut failures = Vec::new();
    let mut unified = 0;
    for _ in 0..UNIFY_PAIRS {
        let (a, b, t) = (random_term(&mut rng, 3), random_term(&mut rng, 3), random_term(&mut rng, 3));
        let mgu = unify_checked(&a, &b, &Bindings::new());
        if let Some(s) = &mgu {
            unified += 1;
            if apply(s, &a) != apply(s, &b) {
                failures.push(format!("unsound: {a} = {b}"));
            }
            for x in [&a, &b, &t] {
                let once = apply(s, x);
                if apply(s, &once) != once {
                    failures.push(format!("not idempotent on {x}: {a} = {b}"));
                }
            }
        }
        let vars: BTreeSet<String> = [&a, &b].iter().flat_map(|x| x.vars()).map(|v| v.name().to_string()).collect();
        for theta in thetas.iter().filter(|th| only_on(th, &vars)) {
            if apply(theta, &a) != apply(theta, &b) {
                continue;
            }
            match &mgu {
                None => failures.push(format!("missed unifier {theta} of {a} and {b}")),
                Some(s) => {
                    for v in VARS {
                        let x = Term::var(v);
                        if apply(theta, &apply(s, &x)) != apply(theta, &x) {
                            failures.push(format!("not most general: {a} = {b}"));
                        }
                    }
                }
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    (UNIFY_PAIRS, unified, failures)
}

/// Substitutions that differ only on `vars`, so each is enumerated once.
fn only_on(theta: &Bindings, vars: &BTreeSet<String>) -> bool {
    VARS.iter().all(|v| vars.contains(*v) || theta.value(v).is_some_and(|t| t == Term::atom("a")))
}

fn oracle_properties() -> (u64, usize, Vec<String>) {
    let mut failures = Vec::new();
    let mut ground_goals = 0;
    for seed in 0..ORACLE_PROGRAMS {
        let p = gen_program(seed);
        let kb = kb_of(&p);
        if !lint(&kb).is_clean() {
            failures.push(format!("program {seed} not stratified"));
        }
        let model = bottom_up(&p);
        for (pred, n) in p.preds() {
            let expected: BTreeSet<Vec<String>> = model.iter().filter(|(q, _)| q == pred).map(|(_, a)| a.clone()).collect();
            if sld_answers(&kb, pred, *n) != expected {
                failures.push(format!("program {seed}: answers for {pred} differ from the model"));
            }
            // every ground goal over the constants
            for i in 0..CONSTS.len().pow(*n as u32) {
                let args: Vec<&str> = (0..*n).map(|k| CONSTS[(i / CONSTS.len().pow(k as u32)) % CONSTS.len()]).collect();
                let goal = if args.is_empty() { pred.clone() } else { format!("{pred}({})", args.join(", ")) };
                let in_model = model.contains(&(pred.clone(), args.iter().map(|s| s.to_string()).collect()));
                let pos = prove(&kb, &parse_query(&goal).unwrap()[0].goal, SolveLimits::default()).unwrap().is_some();
                let neg = Solver::new(&kb, &parse_query(&format!("\\+ {goal}")).unwrap(), SolveLimits::default()).next().is_some();
                ground_goals += 1;
                if pos == neg || pos != in_model {
                    failures.push(format!("program {seed}: {goal} proves {pos}, negation {neg}, model {in_model}"));
                }
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    (ORACLE_PROGRAMS, ground_goals, failures)
}

fn engine_properties() -> Outcome {
    let (pairs, unified, mut failures) = unification_properties();
    let (programs, goals, oracle_failures) = oracle_properties();
    failures.extend(oracle_failures);
    outcome(
        "engine property suite",
        failures,
        format!("{pairs} term pairs ({unified} unifiable), {programs} programs, {goals} ground goals coherent"),
    )
}

// ---- KB structural audits ----

fn structural_audits(ds: Option<&Dataset>, train_entailment: Option<&EvalReport>) -> Outcome {
    let kb = statute_kb().unwrap();
    let mut failures = Vec::new();
    let report = lint(&kb);
    if !report.negative_cycles.is_empty() {
        failures.push(format!("{} negative cycles", report.negative_cycles.len()));
    }
    if !report.undefined.is_empty() {
        failures.push(format!("{} undefined predicates", report.undefined.len()));
    }
    for table in BracketSchedule::section1(&kb).unwrap() {
        if let Err(e) = table.check() {
            failures.push(e.to_string());
        }
    }
    let local = if failures.is_empty() { "schedules continuous and monotone, no negative cycles" } else { "" };
    let Some(ds) = ds else {
        let mut o = outcome("KB structural audits", failures, String::new());
        if o.pass {
            o = blocked("KB structural audits", &format!("{local}; pair and coverage audits need the dataset"));
        }
        return o;
    };

    let cov = audit::coverage(&statute_tree::parse_all(&ds.statutes), &kb);
    if cov.nodes != 193 || !cov.complete() {
        failures.push(format!("coverage {}/{} nodes, missing {}", cov.covered_nodes, cov.nodes, cov.missing.join(" ")));
    }
    match train_entailment {
        Some(rows) => {
            let cases = ds.select(Some(Split::Train), Some(Task::Entailment));
            let groups = audit::pairs(&cases, &rows.rows);
            let pairs: usize = groups.iter().map(|g| g.positives.min(g.negatives)).sum();
            let bad: Vec<&str> = groups.iter().filter(|g| !g.discriminated()).map(|g| g.subsection.as_str()).collect();
            if pairs != 88 || !bad.is_empty() {
                failures.push(format!("{pairs} pairs, undiscriminated: {}", bad.join(" ")));
            }
        }
        None => failures.push("no train entailment report".into()),
    }
    outcome("KB structural audits", failures, format!("88 pairs discriminated, {} nodes covered, {local}", cov.nodes))
}

fn main() {
    let data = dataset();
    let mut outcomes = Vec::new();
    let train_entailment = match &data {
        Ok(ds) => {
            let (o, r) = topline(ds);
            outcomes.push(o);
            outcomes.push(baselines(ds));
            r
        }
        Err(why) => {
            outcomes.push(blocked("solver topline", why));
            outcomes.push(blocked("baselines", why));
            None
        }
    };
    outcomes.push(metric_spot_checks());
    outcomes.push(match &data {
        Ok(ds) => statistics(ds),
        Err(why) => blocked("dataset statistics", why),
    });
    outcomes.push(engine_properties());
    outcomes.push(structural_audits(data.as_ref().ok(), train_entailment.as_ref()));

    println!();
    for o in &outcomes {
        println!("{} {:<24} {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", outcomes.len());

    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1");
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass && (strict || !o.blocked)).map(|o| o.name).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
