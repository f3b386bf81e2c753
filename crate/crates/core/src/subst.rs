//! Substitutions, unification and renaming.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::clause::{Clause, Literal};
use crate::term::{Term, Var};

/// Mapping from variables to terms.
///
/// Stored in triangular form: an image may mention other bound variables.
/// [`Bindings::apply`] resolves chains to a fixpoint, so applying the
/// bindings is idempotent.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    map: HashMap<Var, Term>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    /// Resolved image of the variable called `name`, if bound.
    pub fn value(&self, name: &str) -> Option<Term> {
        self.map.get(&Var::new(name)).map(|t| self.apply(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Bind without checks; the caller guarantees `v` is unbound.
    pub(crate) fn bind(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub(crate) fn unbind(&mut self, v: &Var) {
        self.map.remove(v);
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    /// Follow variable bindings at the top level only.
    pub fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Replace every bound variable by its image, recursively.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match self.walk(t) {
            c @ Term::Compound(_) => c.map_vars(&mut |v| match self.map.get(v) {
                Some(image) => self.apply(image),
                None => Term::Var(v.clone()),
            }),
            other => other.clone(),
        }
    }

    /// Resolved bindings for the given variables only, skipping unbound ones.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Bindings {
        let mut out = Bindings::new();
        for v in vars {
            let t = self.apply(&Term::Var(v.clone()));
            if t != Term::Var(v.clone()) {
                out.map.insert(v.clone(), t);
            }
        }
        out
    }

    /// Fully resolved copy in which no image mentions a bound variable.
    pub fn resolved(&self) -> Bindings {
        Bindings { map: self.map.iter().map(|(k, v)| (k.clone(), self.apply(v))).collect() }
    }

    /// Variables sorted by name, for stable output.
    pub fn sorted(&self) -> Vec<(Var, Term)> {
        let mut v: Vec<_> = self.map.iter().map(|(k, t)| (k.clone(), self.apply(t))).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

impl fmt::Debug for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.sorted().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        write!(f, "}}")
    }
}

/// Replace each bound variable of `t` by its image, to fixpoint.
pub fn apply(bindings: &Bindings, t: &Term) -> Term {
    bindings.apply(t)
}

fn occurs(b: &Bindings, v: &Var, t: &Term) -> bool {
    match b.walk(t) {
        Term::Var(w) => w == v,
        Term::Compound(c) => c.args().iter().any(|a| occurs(b, v, a)),
        _ => false,
    }
}

/// Destructive unification used by the solver. Every newly bound variable
/// is pushed on `trail`; on failure the caller undoes the trail.
pub(crate) fn unify_in_place(b: &mut Bindings, trail: &mut Vec<Var>, x: &Term, y: &Term, occurs_check: bool) -> bool {
    let x = b.walk(x).clone();
    let y = b.walk(y).clone();
    match (&x, &y) {
        (Term::Var(v), Term::Var(w)) if v == w => true,
        (Term::Var(v), other) | (other, Term::Var(v)) => {
            if occurs_check && occurs(b, v, other) {
                return false;
            }
            b.bind(v.clone(), other.clone());
            trail.push(v.clone());
            true
        }
        (Term::Compound(c1), Term::Compound(c2)) => {
            c1.functor() == c2.functor()
                && c1.arity() == c2.arity()
                && c1
                    .args()
                    .iter()
                    .zip(c2.args())
                    .all(|(a, bb)| unify_in_place(b, trail, a, bb, occurs_check))
        }
        _ => x == y,
    }
}

pub(crate) fn undo(b: &mut Bindings, trail: &mut Vec<Var>, mark: usize) {
    while trail.len() > mark {
        let v = trail.pop().expect("trail longer than mark");
        b.unbind(&v);
    }
}

fn unify_impl(a: &Term, b: &Term, start: &Bindings, occurs_check: bool) -> Option<Bindings> {
    let mut out = start.clone();
    let mut trail = Vec::new();
    unify_in_place(&mut out, &mut trail, a, b, occurs_check).then_some(out)
}

/// Most general unifier of `a` and `b` extending `start`, without occurs check.
pub fn unify(a: &Term, b: &Term, start: &Bindings) -> Option<Bindings> {
    unify_impl(a, b, start, false)
}

/// As [`unify`], refusing bindings that would create cyclic terms.
pub fn unify_checked(a: &Term, b: &Term, start: &Bindings) -> Option<Bindings> {
    unify_impl(a, b, start, true)
}

/// Source of fresh variable names of the form `_G<n>`.
#[derive(Debug, Default)]
pub struct VarGen {
    next: Cell<u64>,
}

impl VarGen {
    pub fn new() -> Self {
        VarGen::default()
    }

    /// Start numbering above any `_G<n>` name already in use by `terms`.
    pub fn avoiding<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut max = 0;
        for t in terms {
            for v in t.vars() {
                if let Some(n) = v.name().strip_prefix("_G").and_then(|s| s.parse::<u64>().ok()) {
                    max = max.max(n);
                }
            }
        }
        VarGen { next: Cell::new(max) }
    }

    pub fn fresh(&self) -> Var {
        let n = self.next.get() + 1;
        self.next.set(n);
        Var::new(format!("_G{n}"))
    }
}

/// Copy of `clause` with every variable replaced by a fresh one.
pub fn rename_apart(clause: &Clause, gen: &VarGen) -> Clause {
    let mut map: HashMap<Var, Var> = HashMap::new();
    let mut rename = |t: &Term| {
        t.map_vars(&mut |v| Term::Var(map.entry(v.clone()).or_insert_with(|| gen.fresh()).clone()))
    };
    let head = rename(&clause.head);
    let body: Vec<Literal> = clause
        .body
        .iter()
        .map(|lit| {
            let goal = rename(&lit.goal);
            let locals: Arc<[Var]> = lit
                .locals()
                .iter()
                .map(|v| match rename(&Term::Var(v.clone())) {
                    Term::Var(w) => w,
                    _ => unreachable!("renaming maps variables to variables"),
                })
                .collect();
            lit.with_goal(goal, locals)
        })
        .collect();
    Clause { head, body, id: clause.id.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn unify_binds_variable() {
        let b = unify(&t("X"), &t("alice"), &Bindings::new()).unwrap();
        assert_eq!(b.value("X"), Some(t("alice")));
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn unify_compounds() {
        let b = unify(&t("f(X, b)"), &t("f(a, Y)"), &Bindings::new()).unwrap();
        assert_eq!(b.value("X"), Some(t("a")));
        assert_eq!(b.value("Y"), Some(t("b")));
    }

    #[test]
    fn functor_clash_fails() {
        assert!(unify(&t("f(X)"), &t("g(X)"), &Bindings::new()).is_none());
        assert!(unify(&t("f(a)"), &t("f(a, b)"), &Bindings::new()).is_none());
        assert!(unify(&t("5"), &t("5.0"), &Bindings::new()).is_none());
    }

    #[test]
    fn result_extends_start() {
        let start = unify(&t("Z"), &t("c"), &Bindings::new()).unwrap();
        let b = unify(&t("X"), &t("Z"), &start).unwrap();
        assert_eq!(b.value("X"), Some(t("c")));
        assert_eq!(b.value("Z"), Some(t("c")));
    }

    #[test]
    fn occurs_check_only_when_enabled() {
        assert!(unify_checked(&t("X"), &t("f(X)"), &Bindings::new()).is_none());
        assert!(unify(&t("X"), &t("f(X)"), &Bindings::new()).is_some());
        assert!(unify_checked(&t("f(X, Y)"), &t("f(Y, g(X))"), &Bindings::new()).is_none());
    }

    #[test]
    fn apply_examples() {
        let b = unify(&t("X"), &t("alice"), &Bindings::new()).unwrap();
        assert_eq!(apply(&b, &t("f(X, X)")), t("f(alice, alice)"));
        assert_eq!(apply(&Bindings::new(), &t("g(Y, 1)")), t("g(Y, 1)"));
        let mut b = Bindings::new();
        b.insert(Var::new("X"), t("g(Y)"));
        b.insert(Var::new("Y"), t("b"));
        assert_eq!(apply(&b, &t("X")), t("g(b)"));
        assert_eq!(apply(&b, &apply(&b, &t("h(X, Y)"))), apply(&b, &t("h(X, Y)")));
    }

    #[test]
    fn rename_apart_examples() {
        let gen = VarGen::new();
        let fact = &parse_program("p(a, b).", "r.pl").unwrap()[0];
        assert!(rename_apart(fact, &gen).same_structure(fact));

        let rule = &parse_program("p(X) :- q(X).", "r.pl").unwrap()[0];
        let r1 = rename_apart(rule, &gen);
        assert_eq!(r1.to_string(), "p(_G1) :- q(_G1).");
        let r2 = rename_apart(rule, &gen);
        let v1 = r1.head.var_set();
        let v2 = r2.head.var_set();
        assert!(v1.is_disjoint(&v2));
    }

    #[test]
    fn vargen_avoids_existing_names() {
        let gen = VarGen::avoiding([&t("f(_G7, X)")]);
        assert_eq!(gen.fresh().name(), "_G8");
    }
}
