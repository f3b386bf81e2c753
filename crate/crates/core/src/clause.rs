//! Literals and clauses.

use std::fmt;
use std::sync::Arc;

use crate::builtins;
use crate::term::{PredKey, Term, Var};

/// Source position of a clause, printed as `file:line`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseId {
    pub file: Arc<str>,
    pub line: u32,
}

impl ClauseId {
    pub fn new(file: &str, line: u32) -> Self {
        ClauseId { file: file.into(), line }
    }
}

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    User,
    Builtin,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negated: bool,
    pub goal: Term,
    pub kind: LiteralKind,
    /// Variables of a negated goal that occur nowhere else in the enclosing
    /// clause or query; they may stay unbound when the negation is selected.
    locals: Arc<[Var]>,
}

impl Literal {
    /// `goal` must be an atom or compound.
    pub fn new(goal: Term, negated: bool) -> Self {
        let kind = match goal.pred_key() {
            Some(k) if builtins::is_builtin(&k) => LiteralKind::Builtin,
            _ => LiteralKind::User,
        };
        Literal { negated, goal, kind, locals: Arc::from(Vec::new()) }
    }

    pub fn positive(goal: Term) -> Self {
        Literal::new(goal, false)
    }

    pub fn negative(goal: Term) -> Self {
        Literal::new(goal, true)
    }

    pub fn pred_key(&self) -> Option<PredKey> {
        self.goal.pred_key()
    }

    pub fn locals(&self) -> &[Var] {
        &self.locals
    }

    pub(crate) fn with_goal(&self, goal: Term, locals: Arc<[Var]>) -> Literal {
        Literal { negated: self.negated, goal, kind: self.kind, locals }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "\\+ ")?;
        }
        write!(f, "{}", self.goal)
    }
}

/// Record, for every negated literal, which of its variables are local to it.
pub fn mark_negation_locals(head: Option<&Term>, body: &mut [Literal]) {
    let body_vars: Vec<Vec<Var>> = body.iter().map(|l| l.goal.vars()).collect();
    let head_vars = head.map(Term::vars).unwrap_or_default();
    for i in 0..body.len() {
        if !body[i].negated {
            continue;
        }
        let locals: Vec<Var> = body_vars[i]
            .iter()
            .filter(|v| {
                !head_vars.contains(v)
                    && body_vars.iter().enumerate().all(|(j, vs)| j == i || !vs.contains(v))
            })
            .cloned()
            .collect();
        body[i].locals = locals.into();
    }
}

/// A head with a (possibly empty) body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Literal>,
    pub id: Option<ClauseId>,
}

impl Clause {
    pub fn new(head: Term, mut body: Vec<Literal>, id: Option<ClauseId>) -> Self {
        mark_negation_locals(Some(&head), &mut body);
        Clause { head, body, id }
    }

    pub fn fact(head: Term) -> Self {
        Clause::new(head, Vec::new(), None)
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn pred_key(&self) -> PredKey {
        self.head.pred_key().expect("clause head is callable")
    }

    /// Structural equality ignoring the source position.
    pub fn same_structure(&self, other: &Clause) -> bool {
        self.head == other.head && self.body == other.body
    }

    /// Variables of a negated literal that are neither local nor bound by the
    /// head or an earlier positive literal.
    pub fn unsafe_negation_vars(&self) -> Vec<(usize, Var)> {
        let mut seen = self.head.vars();
        let mut out = Vec::new();
        for (i, lit) in self.body.iter().enumerate() {
            if lit.negated {
                for v in lit.goal.vars() {
                    if !seen.contains(&v) && !lit.locals.contains(&v) {
                        out.push((i, v));
                    }
                }
            } else {
                lit.goal.collect_vars(&mut seen);
            }
        }
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, lit) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{lit}")?;
            }
        }
        write!(f, ".")
    }
}
