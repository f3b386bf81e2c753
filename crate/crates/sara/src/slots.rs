//! Slot reference table: for every subsection predicate, its argument
//! names in order and the statute line quoted above its first clause.
//!
//! Generated from the shipped KB, so it cannot drift from the rules.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use taxlog_core::{KnowledgeBase, PredKey, Term};

use crate::kb::{self, is_subsection_name};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotEntry {
    pub name: String,
    pub arity: usize,
    pub slots: Vec<String>,
    pub phrase: String,
    pub file: String,
    pub line: u32,
}

impl SlotEntry {
    /// The last argument is the taxable year.
    pub fn year_relative(&self) -> bool {
        self.slots.last().is_some_and(|s| s == "Year")
    }

    pub fn key(&self) -> PredKey {
        PredKey::new(&self.name, self.arity)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SlotTable {
    pub entries: Vec<SlotEntry>,
}

impl SlotTable {
    pub fn build(kb: &KnowledgeBase, sources: &[(&str, &str)]) -> SlotTable {
        let texts: BTreeMap<&str, Vec<&str>> = sources.iter().map(|(n, t)| (*n, t.lines().collect())).collect();
        let mut keys: Vec<&PredKey> = kb.predicates().filter(|k| is_subsection_name(k.name.name()) || k.name.name() == "tax").collect();
        keys.sort();
        let mut entries = Vec::new();
        for key in keys {
            let Some(group) = kb.clauses(key) else { continue };
            let Some(first) = group.first().cloned() else { continue };
            let slots = (0..key.arity).map(|i| slot_name(i, group.iter().map(|c| &c.head))).collect();
            let (file, line) = first.id.as_ref().map_or((String::new(), 0), |id| (id.file.to_string(), id.line));
            let phrase = texts.get(file.as_str()).map(|lines| comment_above(lines, line)).unwrap_or_default();
            entries.push(SlotEntry { name: key.name.name().to_string(), arity: key.arity, slots, phrase, file, line });
        }
        SlotTable { entries }
    }

    /// Entries for a predicate name, smallest arity first.
    pub fn lookup(&self, name: &str) -> Vec<&SlotEntry> {
        let mut out: Vec<&SlotEntry> = self.entries.iter().filter(|e| e.name == name).collect();
        out.sort_by_key(|e| e.arity);
        out
    }

    pub fn get(&self, key: &PredKey) -> Option<&SlotEntry> {
        self.entries.iter().find(|e| e.name == key.name.name() && e.arity == key.arity)
    }
}

/// Name of argument `i`: the first head that has a variable there not repeated elsewhere in that head.
fn slot_name<'a>(i: usize, heads: impl Iterator<Item = &'a Term> + Clone) -> String {
    let lone = heads.clone().find_map(|h| match &h.args()[i] {
        Term::Var(v) if h.args().iter().filter(|a| matches!(a, Term::Var(w) if w == v)).count() == 1 => Some(v.clone()),
        _ => None,
    });
    let any = || heads.clone().find_map(|h| match &h.args()[i] {
        Term::Var(v) => Some(v.clone()),
        _ => None,
    });
    match lone.or_else(any) {
        Some(v) => v.name().trim_start_matches('_').to_string(),
        None => format!("arg{}", i + 1),
    }
}

/// Contiguous `%` lines directly above 1-based line `line`.
fn comment_above(lines: &[&str], line: u32) -> String {
    let mut block = Vec::new();
    let mut i = line as usize - 1;
    while i > 0 {
        let Some(text) = lines[i - 1].trim_start().strip_prefix('%') else { break };
        block.push(text.trim());
        i -= 1;
    }
    block.reverse();
    block.join(" ")
}

impl fmt::Display for SlotTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{}({})\t{}", e.name, e.slots.join(", "), e.phrase)?;
        }
        Ok(())
    }
}

/// Table for the shipped statutes, built once.
pub fn shipped() -> &'static SlotTable {
    static TABLE: OnceLock<SlotTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let kb = kb::statute_kb().expect("shipped KB loads");
        SlotTable::build(&kb, kb::FILES)
    })
}
