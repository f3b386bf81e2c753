//! Corpus statistics.
//!
//! Tokenization is fixed: lowercase, delete every character that is not
//! alphanumeric or whitespace, split on whitespace. Sentences end at `.`,
//! `?` or `!` followed by whitespace or end of text; in statute text a line
//! break also ends a sentence, since headings and list items carry no final
//! punctuation. Case text is the description plus the prompt, without the
//! gold answer. Standard deviations are population deviations.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::case::{Case, Gold, Split};
use crate::loader::{Dataset, StatuteText};
use crate::statute_tree::{self, TreeStats};

pub fn tokens(text: &str) -> Vec<String> {
    let cleaned: String = text.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).flat_map(char::to_lowercase).collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Sentences of running text.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'?' | b'!') && bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()) {
            push_sentence(&mut out, &text[start..=i]);
            start = i + 1;
        }
    }
    push_sentence(&mut out, &text[start..]);
    out
}

fn push_sentence<'a>(out: &mut Vec<&'a str>, s: &'a str) {
    if !tokens(s).is_empty() {
        out.push(s.trim());
    }
}

/// Sentences of statute text: line breaks also separate.
pub fn statute_sentences(text: &str) -> Vec<&str> {
    text.lines().flat_map(sentences).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
        Some(Summary { n, min: v[0], max: v[n - 1], mean, stddev: var.sqrt(), median })
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>10.2} {:>12.2} {:>12.2} {:>12.2} {:>12.2}", self.min, self.max, self.mean, self.stddev, self.median)
    }
}

/// One row per part: train, test, statutes (where it applies), combined.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Parts<T> {
    pub train: Option<T>,
    pub test: Option<T>,
    pub statutes: Option<T>,
    pub combined: Option<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub cases: usize,
    pub counts: Vec<(String, usize)>,
    pub answers: Parts<Summary>,
    pub vocabulary: Parts<usize>,
    pub sentence_words: Parts<Summary>,
    pub case_sentences: Parts<Summary>,
    pub case_words: Parts<Summary>,
    pub section_sentences: Option<Summary>,
    pub section_words: Option<Summary>,
    pub tree: Option<TreeStats>,
}

fn case_text(c: &Case) -> String {
    format!("{} {}", c.text, c.question)
}

fn answers<'a>(cases: impl Iterator<Item = &'a Case>) -> Option<Summary> {
    let v: Vec<f64> = cases
        .filter_map(|c| match &c.gold {
            Gold::Dollars(n) => n.to_string().parse().ok(),
            _ => None,
        })
        .collect();
    Summary::of(&v)
}

fn in_split(ds: &Dataset, split: Option<Split>) -> impl Iterator<Item = &Case> {
    ds.cases.iter().filter(move |c| split.is_none_or(|s| c.split == s))
}

fn statute_texts(statutes: &[StatuteText]) -> Vec<&str> {
    statutes.iter().map(|s| s.text.as_str()).collect()
}

/// Everything `stats` prints.
pub fn corpus_stats(ds: &Dataset) -> CorpusStats {
    let splits = [Some(Split::Train), Some(Split::Test), None];
    let case_texts: Vec<Vec<String>> = splits.iter().map(|s| in_split(ds, *s).map(case_text).collect()).collect();
    let statute = statute_texts(&ds.statutes);
    let has_statutes = !statute.is_empty();

    let vocab = |texts: &mut dyn Iterator<Item = &str>| -> usize { texts.flat_map(tokens).collect::<BTreeSet<_>>().len() };
    let sentence_lengths = |texts: &[String]| -> Vec<f64> {
        texts.iter().flat_map(|t| sentences(t)).map(|s| tokens(s).len() as f64).collect()
    };
    let statute_sentence_lengths: Vec<f64> =
        statute.iter().flat_map(|t| statute_sentences(t)).map(|s| tokens(s).len() as f64).collect();

    let mut sentence_words: [Option<Summary>; 3] = [None; 3];
    let mut case_sentences: [Option<Summary>; 3] = [None; 3];
    let mut case_words: [Option<Summary>; 3] = [None; 3];
    let mut vocabulary: [Option<usize>; 3] = [None; 3];
    for (i, texts) in case_texts.iter().enumerate() {
        let mut lengths = sentence_lengths(texts);
        if i == 2 {
            lengths.extend(&statute_sentence_lengths);
        }
        sentence_words[i] = Summary::of(&lengths);
        case_sentences[i] = Summary::of(&texts.iter().map(|t| sentences(t).len() as f64).collect::<Vec<_>>());
        case_words[i] = Summary::of(&texts.iter().map(|t| tokens(t).len() as f64).collect::<Vec<_>>());
        let mut all = texts.iter().map(String::as_str).chain(if i == 2 { statute.clone() } else { Vec::new() });
        vocabulary[i] = (!texts.is_empty()).then(|| vocab(&mut all));
    }

    let mut counts = Vec::new();
    for split in [Split::Train, Split::Test] {
        for task in [crate::case::Task::Entailment, crate::case::Task::Numerical] {
            counts.push((format!("{split} {task}"), ds.count(split, task)));
        }
    }

    CorpusStats {
        cases: ds.cases.len(),
        counts,
        answers: Parts {
            train: answers(in_split(ds, Some(Split::Train))),
            test: answers(in_split(ds, Some(Split::Test))),
            statutes: None,
            combined: answers(in_split(ds, None)),
        },
        vocabulary: Parts {
            train: vocabulary[0],
            test: vocabulary[1],
            statutes: has_statutes.then(|| vocab(&mut statute.iter().copied())),
            combined: vocabulary[2],
        },
        sentence_words: Parts {
            train: sentence_words[0],
            test: sentence_words[1],
            statutes: Summary::of(&statute_sentence_lengths),
            combined: sentence_words[2],
        },
        case_sentences: Parts { train: case_sentences[0], test: case_sentences[1], statutes: None, combined: case_sentences[2] },
        case_words: Parts { train: case_words[0], test: case_words[1], statutes: None, combined: case_words[2] },
        section_sentences: Summary::of(&statute.iter().map(|t| statute_sentences(t).len() as f64).collect::<Vec<_>>()),
        section_words: Summary::of(&statute.iter().map(|t| tokens(t).len() as f64).collect::<Vec<_>>()),
        tree: has_statutes.then(|| statute_tree::tree_stats(&statute_tree::parse_all(&ds.statutes))),
    }
}

fn summary_rows(f: &mut fmt::Formatter<'_>, title: &str, parts: &Parts<Summary>) -> fmt::Result {
    writeln!(f, "{title}")?;
    writeln!(f, "  {:<9} {:>10} {:>12} {:>12} {:>12} {:>12}", "", "min", "max", "avg", "stddev", "median")?;
    for (name, s) in [("train", &parts.train), ("test", &parts.test), ("statutes", &parts.statutes), ("combined", &parts.combined)] {
        if let Some(s) = s {
            writeln!(f, "  {name:<9} {s}")?;
        }
    }
    Ok(())
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cases {}", self.cases)?;
        for (name, n) in &self.counts {
            writeln!(f, "  {name:<20} {n}")?;
        }
        summary_rows(f, "numerical answers ($)", &self.answers)?;
        writeln!(f, "vocabulary")?;
        let v = &self.vocabulary;
        for (name, n) in [("train", v.train), ("test", v.test), ("statutes", v.statutes), ("combined", v.combined)] {
            if let Some(n) = n {
                writeln!(f, "  {name:<9} {n}")?;
            }
        }
        summary_rows(f, "sentence length (words)", &self.sentence_words)?;
        summary_rows(f, "case length (sentences)", &self.case_sentences)?;
        summary_rows(f, "case length (words)", &self.case_words)?;
        if let (Some(s), Some(w)) = (&self.section_sentences, &self.section_words) {
            writeln!(f, "section length")?;
            writeln!(f, "  {:<9} {s}", "sentences")?;
            writeln!(f, "  {:<9} {w}", "words")?;
        }
        if let Some(t) = &self.tree {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenization() {
        assert_eq!(tokens("Alice's income was $2,000.  Bob's wasn't!"), ["alices", "income", "was", "2000", "bobs", "wasnt"]);
        assert!(tokens("... --").is_empty());
    }

    #[test]
    fn sentence_split() {
        assert_eq!(sentences("Alice was born in 1950. She paid $2.50? Yes"), ["Alice was born in 1950.", "She paid $2.50?", "Yes"]);
        assert_eq!(statute_sentences("(a) General rule\nThere is imposed a tax. It is due."), ["(a) General rule", "There is imposed a tax.", "It is due."]);
    }

    #[test]
    fn summaries() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.median), (1.0, 4.0, 2.5, 2.5));
        assert!((s.stddev - 1.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(Summary::of(&[7.0]).unwrap().median, 7.0);
        assert!(Summary::of(&[]).is_none());
    }
}
