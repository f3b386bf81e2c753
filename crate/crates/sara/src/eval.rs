//! Scoring predictors against gold answers.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use taxlog_core::arith::{mul, sub};
use taxlog_core::{KbError, KnowledgeBase, Number, SolveLimits, Solver, Term};
use thiserror::Error;

use crate::case::{number_text, Case, Gold, Split, Task};
use crate::loader::Dataset;
use crate::query::{build_query, ANSWER_VAR};

/// Two-sided 90% normal quantile.
pub const Z90: f64 = 1.645;

/// The constant baseline's answer.
pub const CONSTANT_BASELINE: i64 = 11023;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold amount {0} is negative")]
    NegativeGold(Number),
    #[error("predictor {predictor} cannot answer {task} cases")]
    TaskMismatch { predictor: String, task: Task },
    #[error("no {task} cases in the {split} split")]
    Empty { split: Split, task: Task },
    #[error("no training entailment cases to take a majority over")]
    NoTrainingCases,
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("cannot build thread pool: {0}")]
    Pool(String),
}

fn as_f64(n: &Number) -> f64 {
    n.to_string().parse().expect("decimal text is a valid float")
}

fn abs(n: Number) -> Number {
    if n.is_negative() {
        sub(&Number::Int(0.into()), &n)
    } else {
        n
    }
}

/// `|y - ŷ|` and `max(0.1y, 5000)`, both exact.
fn delta_parts(y: &Number, yhat: &Number) -> Result<(Number, Number), EvalError> {
    if y.is_negative() {
        return Err(EvalError::NegativeGold(y.clone()));
    }
    let tenth = mul(y, &Number::Dec("0.1".parse().expect("literal")));
    let floor = Number::Int(5000.into());
    Ok((abs(sub(y, yhat)), tenth.max(floor)))
}

/// `|y - ŷ| / max(0.1y, 5000)`.
pub fn delta(y: &Number, yhat: &Number) -> Result<f64, EvalError> {
    let (num, den) = delta_parts(y, yhat)?;
    Ok(as_f64(&num) / as_f64(&den))
}

/// Whether `delta(y, ŷ) < 1`, decided without rounding.
pub fn delta_accurate(y: &Number, yhat: &Number) -> Result<bool, EvalError> {
    let (num, den) = delta_parts(y, yhat)?;
    Ok(num < den)
}

/// `1.645 * sqrt(p(1-p)/n)`.
pub fn normal_half_width(p: f64, n: usize) -> f64 {
    Z90 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Student-t interval on the 0/1 scores: sample deviation with one degree
/// of freedom removed, quantile at n - 1 degrees of freedom.
pub fn t_half_width(p: f64, n: usize) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let sd = (p * (1.0 - p) * nf / (nf - 1.0)).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 1.0).ok()?.inverse_cdf(0.95);
    Some(t * sd / nf.sqrt())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Entailment,
    Contradiction,
    Dollars(#[serde(with = "number_text")] Number),
    /// No answer; the reason is kept for the report.
    Abstain(String),
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Entailment => f.write_str("Entailment"),
            Prediction::Contradiction => f.write_str("Contradiction"),
            Prediction::Dollars(n) => write!(f, "${n}"),
            Prediction::Abstain(_) => f.write_str("(abstain)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    Solver,
    /// Most frequent training label, ties to Entailment.
    Majority,
    Constant(Number),
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predictor::Solver => f.write_str("solver"),
            Predictor::Majority => f.write_str("majority"),
            Predictor::Constant(n) => write!(f, "constant({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub id: String,
    pub task: Task,
    pub prediction: Prediction,
    pub gold: Gold,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub abstained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub split: Split,
    pub predictor: String,
    pub n_cases: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// 90% half-width, normal approximation.
    pub ci90: f64,
    /// 90% half-width, Student t; differs from `ci90` at small n.
    pub ci90_t: Option<f64>,
    pub abstentions: usize,
    pub rows: Vec<CaseRow>,
}

impl EvalReport {
    pub fn all_correct(&self) -> bool {
        self.correct == self.n_cases
    }

    /// One JSON object per case.
    pub fn jsonl(&self) -> String {
        self.rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect()
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:<16} {:<16} {:>7} {:>10}", "case", "prediction", "gold", "correct", "delta")?;
        for r in &self.rows {
            let delta = r.delta.map(|d| format!("{d:.4}")).unwrap_or_default();
            let mark = if r.correct { "yes" } else if r.abstained { "abstain" } else { "no" };
            writeln!(f, "{:<28} {:<16} {:<16} {:>7} {:>10}", r.id, r.prediction.to_string(), r.gold.to_string(), mark, delta)?;
        }
        writeln!(f)?;
        writeln!(f, "task {}  split {}  predictor {}", self.task, self.split, self.predictor)?;
        write!(f, "accuracy {:.2} ({}/{})  90% CI ±{:.1} (normal)", self.accuracy, self.correct, self.n_cases, 100.0 * self.ci90)?;
        if let Some(t) = self.ci90_t {
            write!(f, "  ±{:.1} (t)", 100.0 * t)?;
        }
        writeln!(f)?;
        if self.abstentions > 0 {
            writeln!(f, "abstentions {}", self.abstentions)?;
        }
        Ok(())
    }
}

/// The label a majority baseline trained on `train` predicts.
pub fn majority_label<'a>(train: impl IntoIterator<Item = &'a Case>) -> Result<Prediction, EvalError> {
    let (mut yes, mut no) = (0usize, 0usize);
    for c in train {
        match c.gold {
            Gold::Entailment => yes += 1,
            Gold::Contradiction => no += 1,
            Gold::Dollars(_) => {}
        }
    }
    match (yes, no) {
        (0, 0) => Err(EvalError::NoTrainingCases),
        (y, n) if n > y => Ok(Prediction::Contradiction),
        _ => Ok(Prediction::Entailment),
    }
}

/// Run the statutes plus the case's facts on its query.
pub fn solve_case(statutes: &KnowledgeBase, case: &Case, limits: SolveLimits) -> Prediction {
    let query = match build_query(case) {
        Ok(q) => q,
        Err(e) => return Prediction::Abstain(e.to_string()),
    };
    let mut kb = statutes.clone();
    if let Err(e) = kb.add_clauses(case.facts.iter().cloned()) {
        return Prediction::Abstain(e.to_string());
    }
    let first = Solver::new(&kb, &query, SolveLimits { max_solutions: Some(1), ..limits }).next();
    match (case.task(), first) {
        (_, Some(Err(e))) => Prediction::Abstain(e.to_string()),
        (Task::Entailment, Some(Ok(_))) => Prediction::Entailment,
        (Task::Entailment, None) => Prediction::Contradiction,
        (Task::Numerical, None) => Prediction::Abstain("no tax amount derivable".into()),
        (Task::Numerical, Some(Ok(sol))) => match sol.bindings.value(ANSWER_VAR).as_ref().and_then(Term::as_number) {
            Some(n) => Prediction::Dollars(n),
            None => Prediction::Abstain(format!("{ANSWER_VAR} is not a number in {}", sol.bindings)),
        },
    }
}

fn score(case: &Case, prediction: Prediction) -> Result<CaseRow, EvalError> {
    let (correct, delta) = match (&case.gold, &prediction) {
        (Gold::Dollars(y), Prediction::Dollars(yhat)) => (delta_accurate(y, yhat)?, Some(delta(y, yhat)?)),
        (Gold::Dollars(y), _) if y.is_negative() => return Err(EvalError::NegativeGold(y.clone())),
        (Gold::Entailment, Prediction::Entailment) | (Gold::Contradiction, Prediction::Contradiction) => (true, None),
        _ => (false, None),
    };
    let abstained = matches!(prediction, Prediction::Abstain(_));
    Ok(CaseRow { id: case.id.clone(), task: case.task(), prediction, gold: case.gold.clone(), correct, delta, abstained })
}

/// Score `predictor` on one split and task.
///
/// `threads` bounds the worker pool; `None` uses rayon's default. Rows come
/// back in case-id order whatever the pool size.
pub fn evaluate(
    ds: &Dataset,
    statutes: &KnowledgeBase,
    predictor: &Predictor,
    split: Split,
    task: Task,
    threads: Option<usize>,
) -> Result<EvalReport, EvalError> {
    let fixed = match (predictor, task) {
        (Predictor::Majority, Task::Entailment) => Some(majority_label(ds.select(Some(Split::Train), Some(Task::Entailment)))?),
        (Predictor::Constant(n), Task::Numerical) => Some(Prediction::Dollars(n.clone())),
        (Predictor::Solver, _) => None,
        _ => return Err(EvalError::TaskMismatch { predictor: predictor.to_string(), task }),
    };
    let mut cases = ds.select(Some(split), Some(task));
    if cases.is_empty() {
        return Err(EvalError::Empty { split, task });
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    let limits = SolveLimits::default();
    let run = || -> Result<Vec<CaseRow>, EvalError> {
        cases
            .par_iter()
            .map(|c| {
                let p = fixed.clone().unwrap_or_else(|| solve_case(statutes, c, limits));
                score(c, p)
            })
            .collect()
    };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| EvalError::Pool(e.to_string()))?.install(run)?,
        None => run()?,
    };
    Ok(report(task, split, predictor.to_string(), rows))
}

/// Totals and intervals over scored rows.
pub fn report(task: Task, split: Split, predictor: String, rows: Vec<CaseRow>) -> EvalReport {
    let n = rows.len();
    let correct = rows.iter().filter(|r| r.correct).count();
    let accuracy = if n == 0 { 0.0 } else { correct as f64 / n as f64 };
    EvalReport {
        task,
        split,
        predictor,
        n_cases: n,
        correct,
        accuracy,
        ci90: if n == 0 { 0.0 } else { normal_half_width(accuracy, n) },
        ci90_t: t_half_width(accuracy, n),
        abstentions: rows.iter().filter(|r| r.abstained).count(),
        rows,
    }
}
