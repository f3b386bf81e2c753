//! The subsection tree of the plain statute text.
//!
//! A line opening with one or more labels such as `(b)(3)` starts a node.
//! Levels nest as `(a)`, `(1)`, `(A)`, `(i)`, `(I)`. A label such as `(i)` or
//! `(v)` fits two levels; it opens a new child when the open node sits one
//! level above, and otherwise continues the sequence it extends.

use std::fmt;

use serde::Serialize;

use crate::loader::StatuteText;
use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatuteNode {
    pub section: String,
    /// Labels from the section root; empty for the root.
    pub path: Vec<String>,
    pub children: usize,
    /// 1-based line in the source text; 0 for the root.
    pub line: usize,
}

impl StatuteNode {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children == 0
    }

    /// The predicate that encodes this node, e.g. `s7703_b_3`.
    pub fn predicate(&self) -> String {
        let mut name = format!("s{}", self.section);
        for label in &self.path {
            name.push('_');
            name.push_str(label);
        }
        name
    }

    /// `7703(b)(3)`.
    pub fn citation(&self) -> String {
        let mut s = self.section.clone();
        for label in &self.path {
            s.push_str(&format!("({label})"));
        }
        s
    }
}

const LOWER: usize = 0;
const DIGIT: usize = 1;
const UPPER: usize = 2;
const ROMAN: usize = 3;
const UPPER_ROMAN: usize = 4;

fn roman_value(s: &str) -> Option<u32> {
    let digit = |c: char| match c.to_ascii_lowercase() {
        'i' => Some(1),
        'v' => Some(5),
        'x' => Some(10),
        'l' => Some(50),
        _ => None,
    };
    let values: Vec<u32> = s.chars().map(digit).collect::<Option<_>>()?;
    let mut total = 0;
    for (i, v) in values.iter().enumerate() {
        if values.get(i + 1).is_some_and(|n| n > v) {
            total -= *v as i64;
        } else {
            total += *v as i64;
        }
    }
    (total > 0 && !values.is_empty()).then_some(total as u32)
}

fn candidate_levels(label: &str) -> Vec<usize> {
    let lower = label.chars().all(|c| c.is_ascii_lowercase());
    let upper = label.chars().all(|c| c.is_ascii_uppercase());
    let roman = roman_value(label).is_some();
    let single = label.chars().count() == 1;
    if label.chars().all(|c| c.is_ascii_digit()) {
        vec![DIGIT]
    } else if lower {
        match (roman, single) {
            (true, true) => vec![ROMAN, LOWER],
            (true, false) => vec![ROMAN],
            _ => vec![LOWER],
        }
    } else if upper {
        match (roman, single) {
            (true, true) => vec![UPPER_ROMAN, UPPER],
            (true, false) => vec![UPPER_ROMAN],
            _ => vec![UPPER],
        }
    } else {
        Vec::new()
    }
}

fn ordinal(label: &str, level: usize) -> Option<u32> {
    match level {
        DIGIT => label.parse().ok(),
        LOWER | UPPER => {
            let mut cs = label.chars();
            let c = cs.next()?;
            cs.next().is_none().then(|| c.to_ascii_lowercase() as u32 - 'a' as u32 + 1)
        }
        _ => roman_value(label),
    }
}

fn parse_labels(line: &str) -> Vec<String> {
    let mut rest = line.trim_start();
    let mut out = Vec::new();
    while let Some(inner) = rest.strip_prefix('(') {
        let Some(end) = inner.find(')') else { break };
        let label = &inner[..end];
        if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric()) || candidate_levels(label).is_empty() {
            break;
        }
        out.push(label.to_string());
        rest = &inner[end + 1..];
    }
    out
}

fn section_number(name: &str, text: &str) -> String {
    let digits: String = name.chars().filter(char::is_ascii_digit).collect();
    if !digits.is_empty() {
        return digits;
    }
    let after = text.split('§').nth(1).unwrap_or("");
    after.trim_start().chars().take_while(char::is_ascii_digit).collect()
}

/// Nodes of one section, root first, in text order.
pub fn parse_section(name: &str, text: &str) -> Vec<StatuteNode> {
    let section = section_number(name, text);
    let mut nodes = vec![StatuteNode { section: section.clone(), path: Vec::new(), children: 0, line: 0 }];
    // Open path: (level, label, node index).
    let mut stack: Vec<(usize, String, usize)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        for label in parse_labels(line) {
            let levels = candidate_levels(&label);
            let next_level = stack.last().map_or(LOWER, |(l, _, _)| l + 1);
            let continues = |level: usize| {
                stack.iter().rposition(|(l, prev, _)| {
                    *l == level && matches!((ordinal(prev, level), ordinal(&label, level)), (Some(a), Some(b)) if b == a + 1)
                })
            };
            let opens = |level: usize| level == next_level && ordinal(&label, level) == Some(1);
            let (level, keep) = if let Some(&l) = levels.iter().find(|l| opens(**l)) {
                (l, stack.len())
            } else if let Some((l, at)) = levels.iter().find_map(|l| continues(*l).map(|at| (*l, at))) {
                (l, at)
            } else if let Some((l, at)) = levels.iter().find_map(|l| stack.iter().rposition(|(sl, _, _)| sl == l).map(|at| (*l, at))) {
                (l, at)
            } else {
                (levels[0], stack.len())
            };
            stack.truncate(keep);
            let parent = stack.last().map_or(0, |(_, _, i)| *i);
            nodes[parent].children += 1;
            let mut path: Vec<String> = stack.iter().map(|(_, l, _)| l.clone()).collect();
            path.push(label.clone());
            nodes.push(StatuteNode { section: section.clone(), path, children: 0, line: n + 1 });
            stack.push((level, label, nodes.len() - 1));
        }
    }
    nodes
}

pub fn parse_all(statutes: &[StatuteText]) -> Vec<StatuteNode> {
    statutes.iter().flat_map(|s| parse_section(&s.name, &s.text)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub node_depth: Summary,
    pub leaf_depth: Summary,
}

pub fn tree_stats(nodes: &[StatuteNode]) -> TreeStats {
    let depths = |it: &mut dyn Iterator<Item = &StatuteNode>| it.map(|n| n.depth() as f64).collect::<Vec<_>>();
    let all = depths(&mut nodes.iter());
    let leaves = depths(&mut nodes.iter().filter(|n| n.is_leaf()));
    let empty = Summary { n: 0, min: 0.0, max: 0.0, mean: 0.0, stddev: 0.0, median: 0.0 };
    TreeStats {
        nodes: all.len(),
        leaves: leaves.len(),
        node_depth: Summary::of(&all).unwrap_or(empty),
        leaf_depth: Summary::of(&leaves).unwrap_or(empty),
    }
}

impl fmt::Display for TreeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "statute tree")?;
        writeln!(f, "  {:<9} {:>10} {:>12} {:>12} {:>12} {:>12} {:>8}", "", "min", "max", "avg", "stddev", "median", "count")?;
        writeln!(f, "  {:<9} {} {:>8}", "leaves", self.leaf_depth, self.leaves)?;
        writeln!(f, "  {:<9} {} {:>8}", "nodes", self.node_depth, self.nodes)
    }
}
