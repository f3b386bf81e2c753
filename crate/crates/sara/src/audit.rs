//! Structural checks on the KB and the cases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;
use taxlog_core::{KnowledgeBase, PredKey, Term};

use crate::case::{Case, Gold};
use crate::eval::CaseRow;
use crate::kb::is_subsection_name;
use crate::query::build_query;
use crate::slots::SlotTable;
use crate::statute_tree::StatuteNode;

fn section_of(name: &str) -> &str {
    name[1..].split('_').next().unwrap_or("")
}

/// Subsection predicate names defined in the KB.
pub fn encoded_subsections(kb: &KnowledgeBase) -> BTreeSet<String> {
    kb.predicates().map(|k| k.name.name().to_string()).filter(|n| is_subsection_name(n)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Coverage {
    pub nodes: usize,
    pub leaves: usize,
    pub covered_nodes: usize,
    pub covered_leaves: usize,
    /// Tree nodes with no predicate, as citations.
    pub missing: Vec<String>,
    /// Predicates with no tree node.
    pub extra: Vec<String>,
}

impl Coverage {
    pub fn complete(&self) -> bool {
        self.missing.is_empty() && self.nodes > 0
    }
}

pub fn coverage(nodes: &[StatuteNode], kb: &KnowledgeBase) -> Coverage {
    let encoded = encoded_subsections(kb);
    let names: BTreeSet<String> = nodes.iter().map(StatuteNode::predicate).collect();
    let missing: Vec<String> = nodes.iter().filter(|n| !encoded.contains(&n.predicate())).map(StatuteNode::citation).collect();
    let sections: BTreeSet<&str> = nodes.iter().map(|n| n.section.as_str()).collect();
    let extra = encoded.iter().filter(|p| sections.contains(section_of(p)) && !names.contains(*p)).cloned().collect();
    Coverage {
        nodes: nodes.len(),
        leaves: nodes.iter().filter(|n| n.is_leaf()).count(),
        covered_nodes: nodes.iter().filter(|n| encoded.contains(&n.predicate())).count(),
        covered_leaves: nodes.iter().filter(|n| n.is_leaf() && encoded.contains(&n.predicate())).count(),
        missing,
        extra,
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coverage: {}/{} nodes, {}/{} leaves", self.covered_nodes, self.nodes, self.covered_leaves, self.leaves)?;
        if !self.missing.is_empty() {
            writeln!(f, "  not encoded: {}", self.missing.join(" "))?;
        }
        if !self.extra.is_empty() {
            writeln!(f, "  not in the statute text: {}", self.extra.join(" "))?;
        }
        Ok(())
    }
}

fn citation_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bsection\s+(\d+)((?:\([A-Za-z0-9]+\))*)").unwrap())
}

fn label_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\(([A-Za-z0-9]+)\)").unwrap())
}

/// Text of a phrase with its leading own labels and any `section N(..)` citations removed.
fn strip_own_labels(phrase: &str) -> String {
    let rest = phrase.trim_start();
    let end = label_re().find_iter(rest).take_while(|m| rest[..m.start()].trim().is_empty() || rest[..m.start()].trim_end().ends_with(')')).last();
    let body = end.map_or(rest, |m| &rest[m.end()..]);
    citation_re().replace_all(body, "").into_owned()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CrossReferences {
    pub within_explicit: usize,
    pub within_implicit: usize,
    pub other_explicit: usize,
    pub other_implicit: usize,
    /// Citations of encoded sections that name no predicate: (citing predicate, citation).
    pub unresolved: Vec<(String, String)>,
}

impl fmt::Display for CrossReferences {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subsections with cross-references")?;
        writeln!(f, "  {:<16} {:>8} {:>8}", "", "explicit", "implicit")?;
        writeln!(f, "  {:<16} {:>8} {:>8}", "same section", self.within_explicit, self.within_implicit)?;
        writeln!(f, "  {:<16} {:>8} {:>8}", "other section", self.other_explicit, self.other_implicit)?;
        for (p, c) in &self.unresolved {
            writeln!(f, "  unresolved in {p}: {c}")?;
        }
        Ok(())
    }
}

/// Subsection predicates a predicate's bodies reach through helper predicates.
fn reached(kb: &KnowledgeBase, key: &PredKey) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![key.clone()];
    while let Some(k) = stack.pop() {
        for clause in kb.clauses(&k).into_iter().flat_map(|g| g.iter()) {
            for lit in &clause.body {
                let mut calls = Vec::new();
                collect_calls(&lit.goal, &mut calls);
                for callee in calls {
                    if is_subsection_name(callee.name.name()) {
                        out.insert(callee.name.name().to_string());
                    } else if seen.insert(callee.clone()) {
                        stack.push(callee);
                    }
                }
            }
        }
    }
    out
}

/// Callable keys in a goal, looking inside aggregate and negation wrappers.
fn collect_calls(goal: &Term, out: &mut Vec<PredKey>) {
    if let Some(k) = goal.pred_key() {
        out.push(k);
    }
    if let Term::Compound(c) = goal {
        for a in c.args() {
            if matches!(a, Term::Compound(_)) {
                collect_calls(a, out);
            }
        }
    }
}

fn related(a: &str, b: &str) -> bool {
    a == b || a.starts_with(&format!("{b}_")) || b.starts_with(&format!("{a}_"))
}

pub fn cross_references(kb: &KnowledgeBase, slots: &SlotTable) -> CrossReferences {
    let encoded = encoded_subsections(kb);
    let sections: BTreeSet<&str> = encoded.iter().map(|n| section_of(n)).collect();
    let mut out = CrossReferences::default();
    let mut done = BTreeSet::new();
    for entry in &slots.entries {
        if !is_subsection_name(&entry.name) || !done.insert(entry.name.clone()) {
            continue;
        }
        let own = section_of(&entry.name);
        let text = strip_own_labels(&entry.phrase);
        let mut cited_other = false;
        for cap in citation_re().captures_iter(&entry.phrase) {
            if &cap[1] == own {
                continue;
            }
            cited_other = true;
            if sections.contains(&cap[1]) {
                let name = crate::query::predicate_name(&cap[1], &cap[2]);
                if !encoded.contains(&name) {
                    out.unresolved.push((entry.name.clone(), cap[0].to_string()));
                }
            }
        }
        let cited_within = label_re().is_match(&text);
        let calls = reached(kb, &entry.key());
        let calls_within = calls.iter().any(|c| section_of(c) == own && !related(c, &entry.name));
        let calls_other = calls.iter().any(|c| section_of(c) != own);
        out.within_explicit += usize::from(cited_within);
        out.within_implicit += usize::from(calls_within && !cited_within);
        out.other_explicit += usize::from(cited_other);
        out.other_implicit += usize::from(calls_other && !cited_other);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Vocabulary {
    /// Distinct `name/arity` of case facts, with the number of cases using each.
    pub functors: BTreeMap<String, usize>,
    /// Functors used by cases but not declared by the KB's vocabulary.
    pub undeclared: Vec<String>,
    /// Declared functors no case uses.
    pub unused: Vec<String>,
    /// Role facts whose event is not typed by exactly one event-type fact: (case, event, types found).
    pub untyped_events: Vec<(String, String, usize)>,
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fact vocabulary: {} distinct functors", self.functors.len())?;
        for (k, n) in &self.functors {
            writeln!(f, "  {k:<28} {n}")?;
        }
        if !self.undeclared.is_empty() {
            writeln!(f, "  undeclared: {}", self.undeclared.join(" "))?;
        }
        if !self.unused.is_empty() {
            writeln!(f, "  declared but unused: {}", self.unused.join(" "))?;
        }
        for (c, e, n) in &self.untyped_events {
            writeln!(f, "  {c}: event {e} has {n} event-type facts")?;
        }
        Ok(())
    }
}

pub fn vocabulary(cases: &[&Case], kb: &KnowledgeBase) -> Vocabulary {
    let declared: BTreeSet<String> = kb.dynamic_predicates().map(ToString::to_string).collect();
    let event_types: BTreeSet<String> = kb.dynamic_predicates().filter(|k| k.arity == 1).map(|k| k.name.name().to_string()).collect();
    let mut functors: BTreeMap<String, usize> = BTreeMap::new();
    let mut untyped = Vec::new();
    for case in cases {
        let mut here = BTreeSet::new();
        let mut types: BTreeMap<String, usize> = BTreeMap::new();
        let mut role_events = BTreeSet::new();
        for fact in case.facts.iter().filter(|c| c.is_fact()) {
            let key = fact.pred_key();
            here.insert(key.to_string());
            let first = fact.head.args().first().map(ToString::to_string);
            match (key.arity, first) {
                (1, Some(e)) if event_types.contains(key.name.name()) => *types.entry(e).or_default() += 1,
                (2, Some(e)) if declared.contains(&key.to_string()) => {
                    role_events.insert(e);
                }
                _ => {}
            }
        }
        for e in role_events {
            let n = types.get(&e).copied().unwrap_or(0);
            if n != 1 {
                untyped.push((case.id.clone(), e, n));
            }
        }
        for k in here {
            *functors.entry(k).or_default() += 1;
        }
    }
    let undeclared = functors.keys().filter(|k| !declared.contains(*k)).cloned().collect();
    let unused = declared.iter().filter(|k| !functors.contains_key(*k)).cloned().collect();
    Vocabulary { functors, undeclared, unused, untyped_events: untyped }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairGroup {
    pub subsection: String,
    pub cases: Vec<String>,
    pub positives: usize,
    pub negatives: usize,
    pub all_correct: bool,
}

impl PairGroup {
    /// One positive and one negative case, both answered correctly.
    pub fn discriminated(&self) -> bool {
        self.positives >= 1 && self.negatives >= 1 && self.all_correct
    }
}

/// Group entailment cases by the subsection they ask about.
pub fn pairs(cases: &[&Case], rows: &[CaseRow]) -> Vec<PairGroup> {
    let correct: BTreeMap<&str, bool> = rows.iter().map(|r| (r.id.as_str(), r.correct)).collect();
    let mut groups: BTreeMap<String, PairGroup> = BTreeMap::new();
    for case in cases {
        let name = build_query(case)
            .ok()
            .and_then(|q| q.first().and_then(|l| l.pred_key()))
            .map_or_else(|| format!("?{}", case.id), |k| k.name.name().to_string());
        let g = groups.entry(name.clone()).or_insert_with(|| PairGroup {
            subsection: name,
            cases: Vec::new(),
            positives: 0,
            negatives: 0,
            all_correct: true,
        });
        g.cases.push(case.id.clone());
        match case.gold {
            Gold::Entailment => g.positives += 1,
            Gold::Contradiction => g.negatives += 1,
            Gold::Dollars(_) => {}
        }
        g.all_correct &= correct.get(case.id.as_str()).copied().unwrap_or(false);
    }
    groups.into_values().collect()
}
