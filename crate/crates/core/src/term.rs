//! Terms: the universal value of the engine.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use chrono::NaiveDate;
use num_bigint::BigInt;

use crate::number::{Decimal, Number};

/// A logic variable, identified by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Underscore-prefixed variables never show up in answers.
    pub fn is_hidden(&self) -> bool {
        self.0.starts_with('_')
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Atom(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, &self.0)
    }
}

/// Functor applied to one or more arguments.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Compound {
    functor: Atom,
    args: Arc<[Term]>,
}

impl Compound {
    /// `None` when `args` is empty: compounds have arity at least one.
    pub fn new(functor: Atom, args: Vec<Term>) -> Option<Self> {
        if args.is_empty() {
            None
        } else {
            Some(Compound { functor, args: args.into() })
        }
    }

    pub fn functor(&self) -> &Atom {
        &self.functor
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Atom(Atom),
    Int(BigInt),
    Dec(Decimal),
    Date(NaiveDate),
    Compound(Compound),
}

/// Name and arity of a callable term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Atom,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey { name: Atom::new(name), arity }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub const LIST_CONS: &str = "[|]";
pub const LIST_NIL: &str = "[]";

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Atom::new(name))
    }

    pub fn int(i: impl Into<BigInt>) -> Term {
        Term::Int(i.into())
    }

    /// Compound term; panics on an empty argument list.
    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::Compound(Compound::new(Atom::new(functor), args).expect("compound needs arguments"))
    }

    pub fn date(y: i32, m: u32, d: u32) -> Option<Term> {
        NaiveDate::from_ymd_opt(y, m, d).map(Term::Date)
    }

    pub fn from_number(n: Number) -> Term {
        match n {
            Number::Int(i) => Term::Int(i),
            Number::Dec(d) => Term::Dec(d),
        }
    }

    pub fn as_number(&self) -> Option<Number> {
        match self {
            Term::Int(i) => Some(Number::Int(i.clone())),
            Term::Dec(d) => Some(Number::Dec(d.clone())),
            _ => None,
        }
    }

    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        let mut acc = tail.unwrap_or_else(|| Term::atom(LIST_NIL));
        for item in items.into_iter().rev() {
            acc = Term::app(LIST_CONS, vec![item, acc]);
        }
        acc
    }

    /// Name and arity if this term can be called as a goal.
    pub fn pred_key(&self) -> Option<PredKey> {
        match self {
            Term::Atom(a) => Some(PredKey { name: a.clone(), arity: 0 }),
            Term::Compound(c) => Some(PredKey { name: c.functor.clone(), arity: c.arity() }),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => c.args(),
            _ => &[],
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(c) => c.args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(c) => c.args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    /// Rebuild the term, mapping every variable through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Compound(c) => Term::Compound(Compound {
                functor: c.functor.clone(),
                args: c.args.iter().map(|a| a.map_vars(f)).collect(),
            }),
            other => other.clone(),
        }
    }
}

impl From<Number> for Term {
    fn from(n: Number) -> Self {
        Term::from_number(n)
    }
}

// ---------------------------------------------------------------------------
// Operators and printing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Assoc {
    Xfx,
    Yfx,
}

/// Infix operators understood by the reader and used by the printer.
pub(crate) fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        "=" | "\\=" | "==" | "\\==" | "is" | "=:=" | "=\\=" | "<" | ">" | "=<" | ">=" => {
            (700, Assoc::Xfx)
        }
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "/" | "//" => (400, Assoc::Yfx),
        _ => return None,
    })
}

pub(crate) const PREFIX_MINUS_PREC: u32 = 200;
pub(crate) const ARG_PREC: u32 = 999;

pub(crate) fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

fn is_plain_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_atom(name) || name == LIST_NIL {
        return write!(f, "{name}");
    }
    write!(f, "'")?;
    for c in name.chars() {
        match c {
            '\'' => write!(f, "\\'")?,
            '\\' => write!(f, "\\\\")?,
            '\n' => write!(f, "\\n")?,
            '\t' => write!(f, "\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    write!(f, "'")
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, max_prec: u32) -> fmt::Result {
    match t {
        Term::Var(v) => write!(f, "{v}"),
        Term::Atom(a) => write!(f, "{a}"),
        Term::Int(i) => write!(f, "{i}"),
        Term::Dec(d) => write!(f, "{d}"),
        Term::Date(d) => write!(f, "\"{}\"", d.format("%Y-%m-%d")),
        Term::Compound(c) => {
            let name = c.functor.name();
            if name == LIST_CONS && c.arity() == 2 {
                return write_list(f, t);
            }
            if c.arity() == 2 {
                if let Some((prec, assoc)) = infix_op(name) {
                    let (lmax, rmax) = match assoc {
                        Assoc::Xfx => (prec - 1, prec - 1),
                        Assoc::Yfx => (prec, prec - 1),
                    };
                    let paren = prec > max_prec;
                    if paren {
                        write!(f, "(")?;
                    }
                    write_term(f, &c.args[0], lmax)?;
                    write!(f, " {name} ")?;
                    write_term(f, &c.args[1], rmax)?;
                    if paren {
                        write!(f, ")")?;
                    }
                    return Ok(());
                }
            }
            write!(f, "{}(", c.functor)?;
            for (i, a) in c.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_term(f, a, ARG_PREC)?;
            }
            write!(f, ")")
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    write!(f, "[")?;
    let mut cur = t;
    let mut first = true;
    loop {
        match cur {
            Term::Compound(c) if c.functor.name() == LIST_CONS && c.arity() == 2 => {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write_term(f, &c.args[0], ARG_PREC)?;
                cur = &c.args[1];
            }
            Term::Atom(a) if a.name() == LIST_NIL => break,
            other => {
                write!(f, "|")?;
                write_term(f, other, ARG_PREC)?;
                break;
            }
        }
    }
    write!(f, "]")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 1200)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 1200)
    }
}
