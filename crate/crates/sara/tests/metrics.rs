use std::path::Path;

use proptest::prelude::*;
use taxlog_core::Number;
use taxlog_sara::case::{Split, Task};
use taxlog_sara::eval::{delta, delta_accurate, evaluate, EvalReport, Predictor};
use taxlog_sara::kb::statute_kb;
use taxlog_sara::loader::{load_dataset, Dataset};
use taxlog_sara::query::{build_query, translate};
use taxlog_sara::slots;

fn int(n: i64) -> Number {
    Number::Int(n.into())
}

fn mini() -> Dataset {
    load_dataset(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn delta_is_non_negative_and_zero_only_on_equality(y in 0i64..5_000_000, yhat in -1_000_000i64..5_000_000) {
        let d = delta(&int(y), &int(yhat)).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d == 0.0, y == yhat);
    }

    #[test]
    fn delta_is_scale_invariant_above_the_floor(y in 50_000i64..2_000_000, yhat in 0i64..4_000_000, k in 1i64..500) {
        let base = delta(&int(y), &int(yhat)).unwrap();
        let scaled = delta(&int(k * y), &int(k * yhat)).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0), "{} vs {}", base, scaled);
        prop_assert_eq!(delta_accurate(&int(y), &int(yhat)).unwrap(), delta_accurate(&int(k * y), &int(k * yhat)).unwrap());
    }

    #[test]
    fn accurate_means_delta_below_one(y in 0i64..1_000_000, off in -200_000i64..200_000) {
        let yhat = int(y + off);
        prop_assert_eq!(delta_accurate(&int(y), &yhat).unwrap(), delta(&int(y), &yhat).unwrap() < 1.0);
    }

    #[test]
    fn section_prompts_translate_deterministically(
        name in "[A-Z][a-z]{2,8}",
        year in 1990u32..2030,
        label in prop::sample::select(vec!["7703(b)(3)", "7703(a)(1)", "7703(a)(2)", "152(d)(2)(H)", "2(b)(1)(A)(i)"]),
    ) {
        let prompt = format!("Section {label} applies to {name} for the year {year}.");
        let a = translate(&prompt, slots::shipped()).unwrap();
        let b = translate(&prompt, slots::shipped()).unwrap();
        prop_assert_eq!(&a, &b);
        let text = a[0].to_string();
        let lower = name.to_lowercase();
        prop_assert!(text.contains(&lower), "{}", text);
        prop_assert!(text.ends_with(&format!("{year})")), "{}", text);
    }

    #[test]
    fn tax_prompts_translate(name in "[A-Z][a-z]{2,8}", year in 1990u32..2030) {
        let q = translate(&format!("How much tax does {name} have to pay in {year}?"), slots::shipped()).unwrap();
        prop_assert_eq!(q[0].to_string(), format!("tax({}, {year}, Amount)", name.to_lowercase()));
    }
}

#[test]
fn spot_values() {
    assert_eq!(delta(&int(10_000), &int(10_000)).unwrap(), 0.0);
    assert!((delta(&int(0), &int(4_999)).unwrap() - 0.9998).abs() < 1e-12);
    assert!(delta_accurate(&int(0), &int(4_999)).unwrap());
    assert!((delta(&int(100_000), &int(89_999)).unwrap() - 1.0001).abs() < 1e-12);
    assert!(!delta_accurate(&int(100_000), &int(89_999)).unwrap());
    // exactly one is not accurate
    assert!(!delta_accurate(&int(0), &int(5_000)).unwrap());
    assert!(!delta_accurate(&int(100_000), &int(90_000)).unwrap());
    assert!(delta(&int(-1), &int(0)).is_err());
}

fn run(ds: &Dataset, split: Split, task: Task, threads: Option<usize>) -> EvalReport {
    evaluate(ds, &statute_kb().unwrap(), &Predictor::Solver, split, task, threads).unwrap()
}

#[test]
fn solver_report_ignores_thread_count_and_case_order() {
    let ds = mini();
    let mut reversed = ds.clone();
    reversed.cases.reverse();
    for (split, task) in [(Split::Train, Task::Entailment), (Split::Test, Task::Entailment), (Split::Train, Task::Numerical), (Split::Test, Task::Numerical)] {
        let base = run(&ds, split, task, Some(1));
        assert!(base.all_correct(), "{base}");
        for threads in [Some(2), Some(4), None] {
            assert_eq!(run(&ds, split, task, threads), base);
        }
        assert_eq!(run(&reversed, split, task, Some(3)), base);
    }
}

#[test]
fn report_accounting_and_round_trip() {
    let ds = mini();
    let r = evaluate(&ds, &statute_kb().unwrap(), &Predictor::Constant(int(9_000)), Split::Train, Task::Numerical, None).unwrap();
    // 9,000 is within 5,000 of 9,727 but not of 14,635
    assert_eq!((r.n_cases, r.correct), (2, 1));
    assert_eq!(r.accuracy, r.correct as f64 / r.n_cases as f64);
    let back: EvalReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    for line in r.jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["id", "task", "prediction", "gold", "correct", "delta"] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn majority_and_task_mismatch() {
    let ds = mini();
    let kb = statute_kb().unwrap();
    // one positive and one negative in train: the tie goes to Entailment
    let r = evaluate(&ds, &kb, &Predictor::Majority, Split::Test, Task::Entailment, None).unwrap();
    assert_eq!(r.accuracy, 0.5);
    assert!(evaluate(&ds, &kb, &Predictor::Majority, Split::Test, Task::Numerical, None).is_err());
    assert!(evaluate(&ds, &kb, &Predictor::Constant(int(1)), Split::Test, Task::Entailment, None).is_err());
}

#[test]
fn build_query_is_pure() {
    let ds = mini();
    for case in &ds.cases {
        assert_eq!(build_query(case).unwrap(), build_query(&case.clone()).unwrap());
        // the shipped goal and the translated prompt agree on the predicate
        let translated = translate(&case.question, slots::shipped()).unwrap();
        let shipped = build_query(case).unwrap();
        assert_eq!(translated[0].pred_key(), shipped[0].pred_key(), "{}", case.id);
    }
}
