//! Static checks over a knowledge base: calls to undefined predicates and
//! recursion through negation or aggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::builtins::{goal_arguments, is_builtin};
use crate::clause::{ClauseId, Literal, LiteralKind};
use crate::kb::KnowledgeBase;
use crate::term::{PredKey, Term};

/// A body literal that depends on a user predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dependency {
    pub from: PredKey,
    pub to: PredKey,
    pub negative: bool,
    pub at: Option<ClauseId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LintReport {
    /// Called but neither defined nor declared dynamic, with call sites.
    pub undefined: BTreeMap<PredKey, Vec<Option<ClauseId>>>,
    /// Strongly connected groups of predicates containing a negative edge.
    pub negative_cycles: Vec<Vec<PredKey>>,
}

impl LintReport {
    pub fn is_clean(&self) -> bool {
        self.undefined.is_empty() && self.negative_cycles.is_empty()
    }
}

/// User predicates a literal depends on. Goals passed to aggregates count
/// as negative dependencies.
fn literal_deps(lit: &Literal) -> Vec<(PredKey, bool)> {
    let Some(key) = lit.pred_key() else { return Vec::new() };
    if lit.kind == LiteralKind::User {
        return vec![(key, lit.negated)];
    }
    goal_arguments(&key)
        .iter()
        .filter_map(|&i| lit.goal.args().get(i).and_then(Term::pred_key))
        .filter(|k| !is_builtin(k))
        .map(|k| (k, true))
        .collect()
}

pub fn dependencies(kb: &KnowledgeBase) -> Vec<Dependency> {
    let mut out = Vec::new();
    for clause in kb.all_clauses() {
        for lit in &clause.body {
            for (to, negative) in literal_deps(lit) {
                out.push(Dependency { from: clause.pred_key(), to, negative, at: clause.id.clone() });
            }
        }
    }
    out
}

/// Stratum of every predicate, or `None` if some cycle passes through a
/// negative edge. A predicate sits strictly above everything it depends on
/// negatively and no lower than what it depends on positively.
pub fn strata(kb: &KnowledgeBase) -> Option<HashMap<PredKey, usize>> {
    let deps = dependencies(kb);
    let mut level: HashMap<PredKey, usize> = kb.predicates().map(|k| (k.clone(), 0)).collect();
    for d in &deps {
        level.entry(d.to.clone()).or_insert(0);
    }
    let bound = level.len();
    loop {
        let mut changed = false;
        for d in &deps {
            let need = level[&d.to] + usize::from(d.negative);
            if level[&d.from] < need {
                if need > bound {
                    return None;
                }
                level.insert(d.from.clone(), need);
                changed = true;
            }
        }
        if !changed {
            return Some(level);
        }
    }
}

pub fn lint(kb: &KnowledgeBase) -> LintReport {
    let deps = dependencies(kb);
    let mut report = LintReport::default();
    for d in &deps {
        if !kb.is_defined(&d.to) {
            report.undefined.entry(d.to.clone()).or_default().push(d.at.clone());
        }
    }

    let mut graph: DiGraph<PredKey, bool> = DiGraph::new();
    let mut nodes: HashMap<PredKey, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<PredKey, bool>, k: &PredKey| *nodes.entry(k.clone()).or_insert_with(|| g.add_node(k.clone()));
    for d in &deps {
        let (a, b) = (node(&mut graph, &d.from), node(&mut graph, &d.to));
        graph.add_edge(a, b, d.negative);
    }
    for scc in tarjan_scc(&graph) {
        let members: BTreeSet<NodeIndex> = scc.iter().copied().collect();
        let negative = graph.edge_indices().any(|e| {
            let (a, b) = graph.edge_endpoints(e).expect("edge exists");
            graph[e] && members.contains(&a) && members.contains(&b)
        });
        if negative {
            let mut keys: Vec<PredKey> = scc.iter().map(|i| graph[*i].clone()).collect();
            keys.sort();
            report.negative_cycles.push(keys);
        }
    }
    report.negative_cycles.sort();
    report
}
