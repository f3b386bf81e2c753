//! Turning a case's prompt into a goal.
//!
//! A shipped test goal wins when present. Otherwise the prompt is matched
//! against the two fixed templates:
//!
//! * `Section 7703(b)(3) applies to Alice maintaining her home for the year 2018.`
//!   becomes `s7703_b_3(alice, home, 2018)`;
//! * `How much tax does Alice have to pay in 2017?` becomes `tax(alice, 2017, Amount)`.

use std::sync::OnceLock;

use regex::Regex;
use taxlog_core::{Literal, Term};
use thiserror::Error;

use crate::case::{Case, Task};
use crate::slots::{self, SlotEntry, SlotTable};

pub const SECTION_PATTERN: &str = "Section <number>(<label>)... applies to <name> ... <year>";
pub const TAX_PATTERN: &str = "How much tax does <name> have to pay in <year>?";

/// Name of the answer variable in numerical queries.
pub const ANSWER_VAR: &str = "Amount";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("prompt `{prompt}` matches neither `{SECTION_PATTERN}` nor `{TAX_PATTERN}`")]
    Unmatched { prompt: String },
    #[error("prompt `{prompt}` does not match `{pattern}`")]
    WrongTemplate { prompt: String, pattern: &'static str },
    #[error("`{name}` is not a subsection encoded in the KB")]
    UnknownSubsection { name: String },
    #[error("case {id}: shipped test goal `{goal}` has no {expected} literal")]
    Shipped { id: String, goal: String, expected: &'static str },
}

fn section_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^Section\s+(\d+)((?:\([A-Za-z0-9]+\))*)\s+applies\s+to\s+([A-Za-z][A-Za-z0-9_]*)(?:'s)?\b(.*)\b(\d{4})\b[^0-9]*$").unwrap()
    })
}

fn tax_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^How\s+much\s+tax\s+does\s+([A-Za-z][A-Za-z0-9_]*)\s+have\s+to\s+pay\s+(?:in|for)\s+(?:the\s+year\s+)?(\d{4})\s*\??\s*$")
            .unwrap()
    })
}

/// Words never taken as slot fillers.
const FILLER_STOPWORDS: &[&str] = &[
    "a", "an", "the", "his", "her", "their", "its", "him", "them", "for", "in", "of", "to", "and", "with", "as", "at", "on",
    "by", "year", "taxable", "during",
];

/// `7703` and `(b)(3)` to `s7703_b_3`.
pub fn predicate_name(section: &str, labels: &str) -> String {
    let mut name = format!("s{section}");
    for label in labels.split(['(', ')']).filter(|l| !l.is_empty()) {
        name.push('_');
        name.push_str(label);
    }
    name
}

fn atom_of(word: &str) -> Term {
    Term::atom(&word.to_lowercase())
}

fn fresh_args(entry: &SlotEntry) -> Vec<Term> {
    let mut used: Vec<String> = Vec::new();
    entry
        .slots
        .iter()
        .map(|s| {
            let base: String = s.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
            let base = match base.chars().next() {
                Some(c) if c.is_ascii_uppercase() => base,
                _ => format!("Slot{base}"),
            };
            let mut name = base.clone();
            let mut n = 1;
            while used.contains(&name) {
                n += 1;
                name = format!("{base}{n}");
            }
            used.push(name.clone());
            Term::var(&name)
        })
        .collect()
}

/// Translate a subsection prompt using `table` for slot order.
pub fn section_query(prompt: &str, table: &SlotTable) -> Result<Vec<Literal>, QueryError> {
    let caps = section_re()
        .captures(prompt.trim())
        .ok_or_else(|| QueryError::WrongTemplate { prompt: prompt.to_string(), pattern: SECTION_PATTERN })?;
    let name = predicate_name(&caps[1], &caps[2]);
    let entry = *table.lookup(&name).first().ok_or(QueryError::UnknownSubsection { name: name.clone() })?;
    let mut args = fresh_args(entry);
    let n = args.len();
    args[0] = atom_of(&caps[3]);
    let year_slot = entry.year_relative().then(|| n - 1);
    if let Some(y) = year_slot {
        args[y] = Term::int(caps[5].parse::<i64>().expect("four digits"));
    }
    let fillers = caps[4]
        .split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .filter(|w| !w.is_empty())
        .filter(|w| !FILLER_STOPWORDS.contains(&w.to_lowercase().as_str()))
        .filter(|w| !w.to_lowercase().ends_with("ing"));
    let free = (1..n).filter(|i| Some(*i) != year_slot);
    for (i, word) in free.zip(fillers) {
        args[i] = atom_of(word);
    }
    Ok(vec![Literal::positive(Term::app(&name, args))])
}

pub fn tax_query(prompt: &str) -> Result<Vec<Literal>, QueryError> {
    let caps = tax_re()
        .captures(prompt.trim())
        .ok_or_else(|| QueryError::WrongTemplate { prompt: prompt.to_string(), pattern: TAX_PATTERN })?;
    let year = caps[2].parse::<i64>().expect("four digits");
    Ok(vec![Literal::positive(Term::app("tax", vec![atom_of(&caps[1]), Term::int(year), Term::var(ANSWER_VAR)]))])
}

/// Translate either template.
pub fn translate(prompt: &str, table: &SlotTable) -> Result<Vec<Literal>, QueryError> {
    if tax_re().is_match(prompt.trim()) {
        return tax_query(prompt);
    }
    match section_query(prompt, table) {
        Err(QueryError::WrongTemplate { .. }) => Err(QueryError::Unmatched { prompt: prompt.to_string() }),
        other => other,
    }
}

/// The goal to run for `case`; depends only on the case record.
pub fn build_query(case: &Case) -> Result<Vec<Literal>, QueryError> {
    build_query_with(case, slots::shipped())
}

pub fn build_query_with(case: &Case, table: &SlotTable) -> Result<Vec<Literal>, QueryError> {
    if case.query.is_empty() {
        return match case.task() {
            Task::Entailment => section_query(&case.question, table),
            Task::Numerical => tax_query(&case.question),
        };
    }
    let rendered = || case.query.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    match case.task() {
        Task::Entailment => {
            // A negative case ships `\+ goal`; the answer is whether `goal` holds.
            let lit = case.query.first().expect("non-empty");
            if case.query.len() != 1 {
                return Err(QueryError::Shipped { id: case.id.clone(), goal: rendered(), expected: "single subsection" });
            }
            let key = lit.pred_key().ok_or_else(|| QueryError::Shipped {
                id: case.id.clone(),
                goal: rendered(),
                expected: "callable",
            })?;
            if table.get(&key).is_none() {
                return Err(QueryError::UnknownSubsection { name: key.to_string() });
            }
            Ok(vec![Literal::positive(lit.goal.clone())])
        }
        Task::Numerical => {
            let tax = case
                .query
                .iter()
                .find_map(|l| match &l.goal {
                    Term::Compound(c) if c.functor().name() == "tax" && c.arity() == 3 && !l.negated => Some(c),
                    _ => None,
                })
                .ok_or_else(|| QueryError::Shipped { id: case.id.clone(), goal: rendered(), expected: "tax/3" })?;
            let args = vec![tax.args()[0].clone(), tax.args()[1].clone(), Term::var(ANSWER_VAR)];
            Ok(vec![Literal::positive(Term::app("tax", args))])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(q: &[Literal]) -> String {
        q.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }

    #[test]
    fn household_prompt() {
        let q = translate("Section 7703(b)(3) applies to Alice maintaining her home for the year 2018.", slots::shipped()).unwrap();
        assert_eq!(show(&q), "s7703_b_3(alice, home, 2018)");
    }

    #[test]
    fn tax_prompt() {
        let q = translate("How much tax does Alice have to pay in 2017?", slots::shipped()).unwrap();
        assert_eq!(show(&q), "tax(alice, 2017, Amount)");
    }

    #[test]
    fn extra_slots_stay_unbound() {
        let q = translate("Section 7703(a)(1) applies to Bob for 2002.", slots::shipped()).unwrap();
        assert_eq!(show(&q), "s7703_a_1(bob, Spouse, 2002)");
    }

    #[test]
    fn malformed_prompt() {
        let err = translate("Does Alice owe anything?", slots::shipped()).unwrap_err();
        assert!(matches!(err, QueryError::Unmatched { .. }));
        assert!(err.to_string().contains(TAX_PATTERN));
        assert!(err.to_string().contains(SECTION_PATTERN));
    }

    #[test]
    fn unknown_subsection() {
        let err = translate("Section 9999(z) applies to Alice in 2017.", slots::shipped()).unwrap_err();
        assert_eq!(err, QueryError::UnknownSubsection { name: "s9999_z".into() });
    }

    #[test]
    fn names() {
        assert_eq!(predicate_name("152", "(c)(3)(A)(ii)"), "s152_c_3_A_ii");
        assert_eq!(predicate_name("3301", ""), "s3301");
    }
}
