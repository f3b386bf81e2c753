//! Clause store indexed by predicate.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::builtins;
use crate::clause::{Clause, ClauseId};
use crate::parser::{parse_items, Item, ParseError};
use crate::term::{PredKey, Term};

#[derive(Debug, Error)]
pub enum KbError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{at}: clause for {key} would shadow a builtin")]
    ShadowsBuiltin { key: PredKey, at: String },
    #[error("{at}: variable {var} of a negated literal is never bound before it is selected")]
    UnsafeNegation { var: String, at: String },
    #[error("{file}:{line}: unsupported directive `{text}`")]
    Directive { file: String, line: u32, text: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Clauses grouped by `(functor, arity)`, each group in source order.
///
/// Cheap to clone: groups are shared until one is modified.
#[derive(Clone, Default, Debug)]
pub struct KnowledgeBase {
    preds: HashMap<PredKey, Arc<Vec<Arc<Clause>>>>,
    order: Vec<PredKey>,
    dynamic: BTreeSet<PredKey>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    pub fn add_clause(&mut self, clause: Clause) -> Result<(), KbError> {
        let key = clause.pred_key();
        let at = || clause.id.as_ref().map(ToString::to_string).unwrap_or_else(|| clause.head.to_string());
        if builtins::is_builtin(&key) {
            return Err(KbError::ShadowsBuiltin { key, at: at() });
        }
        if let Some((_, v)) = clause.unsafe_negation_vars().into_iter().next() {
            return Err(KbError::UnsafeNegation { var: v.to_string(), at: at() });
        }
        let group = self.preds.entry(key.clone()).or_insert_with(|| {
            self.order.push(key);
            Arc::new(Vec::new())
        });
        Arc::make_mut(group).push(Arc::new(clause));
        Ok(())
    }

    pub fn add_clauses(&mut self, clauses: impl IntoIterator<Item = Clause>) -> Result<(), KbError> {
        clauses.into_iter().try_for_each(|c| self.add_clause(c))
    }

    /// Mark a predicate as known even when it has no clauses, so that
    /// calling it fails instead of raising an unknown-predicate error.
    pub fn declare_dynamic(&mut self, key: PredKey) -> Result<(), KbError> {
        if builtins::is_builtin(&key) {
            return Err(KbError::ShadowsBuiltin { at: "declaration".into(), key });
        }
        self.dynamic.insert(key);
        Ok(())
    }

    /// Load clause text. `:- dynamic(...)` and `:- discontiguous(...)`
    /// directives are honoured; any other directive is an error.
    pub fn consult_str(&mut self, text: &str, file: &str) -> Result<usize, KbError> {
        let mut n = 0;
        for item in parse_items(text, file)? {
            match item {
                Item::Clause(c) => {
                    self.add_clause(c)?;
                    n += 1;
                }
                Item::Directive { body, line } => self.directive(&body, file, line)?,
            }
        }
        Ok(n)
    }

    pub fn consult_file(&mut self, path: &Path) -> Result<usize, KbError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| KbError::Io { path: path.display().to_string(), source })?;
        self.consult_str(&text, &path.display().to_string())
    }

    fn directive(&mut self, body: &[crate::clause::Literal], file: &str, line: u32) -> Result<(), KbError> {
        let bad = || KbError::Directive {
            file: file.to_string(),
            line,
            text: body.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
        };
        let [lit] = body else { return Err(bad()) };
        let Term::Compound(c) = &lit.goal else { return Err(bad()) };
        match c.functor().name() {
            "dynamic" => {
                for spec in c.args() {
                    let key = pred_spec(spec).ok_or_else(bad)?;
                    self.declare_dynamic(key)?;
                }
                Ok(())
            }
            "discontiguous" => c.args().iter().all(|s| pred_spec(s).is_some()).then_some(()).ok_or_else(bad),
            _ => Err(bad()),
        }
    }

    pub fn clauses(&self, key: &PredKey) -> Option<&Arc<Vec<Arc<Clause>>>> {
        self.preds.get(key)
    }

    pub fn is_dynamic(&self, key: &PredKey) -> bool {
        self.dynamic.contains(key)
    }

    /// Has clauses or was declared dynamic.
    pub fn is_defined(&self, key: &PredKey) -> bool {
        self.preds.contains_key(key) || self.dynamic.contains(key)
    }

    /// Predicates with clauses, in first-seen order.
    pub fn predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.order.iter()
    }

    pub fn dynamic_predicates(&self) -> impl Iterator<Item = &PredKey> {
        self.dynamic.iter()
    }

    pub fn all_clauses(&self) -> impl Iterator<Item = &Arc<Clause>> {
        self.order.iter().flat_map(move |k| self.preds[k].iter())
    }

    pub fn len(&self) -> usize {
        self.preds.values().map(|g| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    /// Copy with each predicate's clauses reordered by `permute`.
    pub fn with_clause_order(&self, mut permute: impl FnMut(&PredKey, &mut Vec<Arc<Clause>>)) -> KnowledgeBase {
        let mut out = self.clone();
        for (k, group) in out.preds.iter_mut() {
            permute(k, Arc::make_mut(group));
        }
        out
    }

    pub fn clause_by_id(&self, id: &ClauseId) -> Option<&Arc<Clause>> {
        self.all_clauses().find(|c| c.id.as_ref() == Some(id))
    }
}

/// `name/arity` as a predicate key.
pub fn pred_spec(t: &Term) -> Option<PredKey> {
    let Term::Compound(c) = t else { return None };
    if c.functor().name() != "/" || c.arity() != 2 {
        return None;
    }
    let Term::Atom(name) = &c.args()[0] else { return None };
    let Term::Int(n) = &c.args()[1] else { return None };
    Some(PredKey { name: name.clone(), arity: usize::try_from(n).ok()? })
}
