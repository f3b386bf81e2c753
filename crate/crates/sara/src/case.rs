//! Case records and the case file format.
//!
//! A case file is a clause file with four comment-headed sections:
//!
//! ```text
//! % Text
//! % Alice and Bob got married on Feb 3rd, 1992.
//!
//! % Question
//! % Section 7703(a)(1) applies to Alice for 2002. Entailment
//!
//! % Facts
//! :- [statutes/prolog/init].
//! marriage_(alice_and_bob).
//!
//! % Test
//! :- s7703_a_1(alice, bob, 2002).
//! :- halt.
//! ```
//!
//! The gold answer is the last token of the question: `Entailment`,
//! `Contradiction`, or a dollar amount.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use taxlog_core::{parse_items, Clause, Decimal, Item, Literal, Number, ParseError, Term};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Entailment,
    Numerical,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Entailment => "entailment",
            Task::Numerical => "numerical",
        })
    }
}

impl FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "entailment" => Ok(Task::Entailment),
            "numerical" => Ok(Task::Numerical),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gold {
    Entailment,
    Contradiction,
    Dollars(#[serde(with = "number_text")] Number),
}

impl Gold {
    pub fn task(&self) -> Task {
        match self {
            Gold::Dollars(_) => Task::Numerical,
            _ => Task::Entailment,
        }
    }
}

impl fmt::Display for Gold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gold::Entailment => f.write_str("Entailment"),
            Gold::Contradiction => f.write_str("Contradiction"),
            Gold::Dollars(n) => write!(f, "${n}"),
        }
    }
}

/// Serialize exact numbers as their decimal text.
pub(crate) mod number_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use taxlog_core::Number;

    pub fn serialize<S: Serializer>(n: &Number, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Number, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_number(&text).ok_or_else(|| D::Error::custom(format!("bad number `{text}`")))
    }
}

pub(crate) fn parse_number(text: &str) -> Option<Number> {
    let text = text.trim();
    if text.contains('.') {
        let d = Decimal::from_str(text).ok()?;
        Some(if d.is_integral() { Number::Int(d.floor()) } else { Number::Dec(d) })
    } else {
        text.parse().ok().map(Number::Int)
    }
}

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("case {id}: missing `% {section}` section")]
    MissingSection { id: String, section: &'static str },
    #[error("case {id}: no gold answer at the end of the question")]
    MissingGold { id: String },
    #[error("case {id}: gold dollar amount {amount} is negative")]
    NegativeGold { id: String, amount: String },
    #[error("case {id}: unparseable facts: {source}")]
    Facts { id: String, source: ParseError },
    #[error("case {id}: unparseable test query: {source}")]
    Test { id: String, source: ParseError },
    #[error("case {id}: unsupported directive `{text}` at line {line}")]
    Directive { id: String, line: u32, text: String },
}

#[derive(Debug, Clone)]
pub struct Case {
    pub id: String,
    pub text: String,
    /// The prompt with the gold answer removed.
    pub question: String,
    pub facts: Vec<Clause>,
    /// Shipped test goal, if any. A negative case's `\+` is kept here.
    pub query: Vec<Literal>,
    pub gold: Gold,
    pub split: Split,
}

impl Case {
    pub fn task(&self) -> Task {
        self.gold.task()
    }
}

const SECTIONS: [&str; 4] = ["Text", "Question", "Facts", "Test"];

/// Parse one case file.
pub fn parse_case(id: &str, source: &str, split: Split) -> Result<Case, CaseError> {
    let mut parts: [Option<String>; 4] = Default::default();
    let mut current: Option<usize> = None;
    // Sections hold raw lines; the first line of Facts is kept at its file line number by padding.
    let mut first_line = [0u32; 4];
    for (n, line) in source.lines().enumerate() {
        let header = line.strip_prefix('%').map(str::trim).and_then(|h| SECTIONS.iter().position(|s| *s == h));
        if let Some(i) = header {
            current = Some(i);
            parts[i] = Some(String::new());
            first_line[i] = n as u32 + 2;
            continue;
        }
        if let Some(i) = current {
            let buf = parts[i].as_mut().expect("section started");
            buf.push_str(line);
            buf.push('\n');
        }
    }
    let take = |i: usize| parts[i].clone().ok_or(CaseError::MissingSection { id: id.to_string(), section: SECTIONS[i] });
    let (text, question, facts_src) = (take(0)?, take(1)?, take(2)?);
    let text = comment_text(&text);
    let (question, gold) = split_gold(id, &comment_text(&question))?;

    let facts_src = pad_lines(&facts_src, first_line[2]);
    let file = format!("{id}.pl");
    let items = parse_items(&facts_src, &file).map_err(|source| CaseError::Facts { id: id.to_string(), source })?;
    let mut facts = Vec::new();
    for item in items {
        match item {
            Item::Clause(c) => facts.push(c),
            Item::Directive { body, .. } if is_ignorable(&body) => {}
            Item::Directive { body, line } => {
                return Err(CaseError::Directive { id: id.to_string(), line, text: render(&body) });
            }
        }
    }

    let mut query = Vec::new();
    if let Some(test) = parts[3].as_ref() {
        let test_src = pad_lines(test, first_line[3]);
        let items = parse_items(&test_src, &file).map_err(|source| CaseError::Test { id: id.to_string(), source })?;
        for item in items {
            match item {
                Item::Directive { body, .. } if is_ignorable(&body) => {}
                Item::Directive { body, .. } if query.is_empty() => query = body,
                Item::Directive { body, line } => {
                    return Err(CaseError::Directive { id: id.to_string(), line, text: render(&body) });
                }
                Item::Clause(c) => {
                    let line = c.id.as_ref().map_or(0, |i| i.line);
                    return Err(CaseError::Directive { id: id.to_string(), line, text: c.to_string() });
                }
            }
        }
    }

    Ok(Case { id: id.to_string(), text, question, facts, query, gold, split })
}

/// Whether `source` uses the sectioned case layout.
pub fn is_case_file(source: &str) -> bool {
    source.lines().any(|l| l.strip_prefix('%').is_some_and(|h| h.trim() == "Facts"))
}

/// Clauses of a plain fact file; consult and `halt` directives are skipped.
pub fn parse_fact_file(name: &str, source: &str) -> Result<Vec<Clause>, CaseError> {
    let items = parse_items(source, name).map_err(|source| CaseError::Facts { id: name.to_string(), source })?;
    let mut out = Vec::new();
    for item in items {
        match item {
            Item::Clause(c) => out.push(c),
            Item::Directive { body, .. } if is_ignorable(&body) => {}
            Item::Directive { body, line } => return Err(CaseError::Directive { id: name.to_string(), line, text: render(&body) }),
        }
    }
    Ok(out)
}

fn render(body: &[Literal]) -> String {
    body.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// `:- [file].`, `:- halt.` and `dynamic`/`discontiguous` declarations.
fn is_ignorable(body: &[Literal]) -> bool {
    let [lit] = body else { return false };
    if lit.negated {
        return false;
    }
    match &lit.goal {
        Term::Atom(a) => a.name() == "halt" || a.name() == "[]",
        Term::Compound(c) => matches!(c.functor().name(), "[|]" | "dynamic" | "discontiguous"),
        _ => false,
    }
}

fn pad_lines(text: &str, first: u32) -> String {
    let mut out = "\n".repeat(first.saturating_sub(1) as usize);
    out.push_str(text);
    out
}

/// Join `% `-prefixed lines into one whitespace-normalized string.
fn comment_text(block: &str) -> String {
    block
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('%'))
        .flat_map(str::split_whitespace)
        .collect::<Vec<_>>()
        .join(" ")
}

fn split_gold(id: &str, question: &str) -> Result<(String, Gold), CaseError> {
    let missing = || CaseError::MissingGold { id: id.to_string() };
    let (prompt, last) = question.rsplit_once(' ').ok_or_else(missing)?;
    let token = last.trim_end_matches('.');
    let gold = match token.to_ascii_lowercase().as_str() {
        "entailment" => Gold::Entailment,
        "contradiction" => Gold::Contradiction,
        _ => {
            // `$-5` and `-$5` both name a negative amount.
            let dollar = token.starts_with('$') || token.starts_with("-$");
            let digits = token.replace(['$', ','], "");
            let negative = digits.starts_with('-');
            let amount = parse_number(digits.trim_start_matches('-')).filter(|_| dollar);
            let amount = amount.ok_or_else(missing)?;
            if negative {
                return Err(CaseError::NegativeGold { id: id.to_string(), amount: token.to_string() });
            }
            Gold::Dollars(amount)
        }
    };
    Ok((prompt.trim().to_string(), gold))
}
