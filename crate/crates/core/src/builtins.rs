//! Predicates implemented natively: comparison, arithmetic, type tests,
//! aggregation over nested goals, and calendar computations.
//!
//! Dates are `Term::Date` values. Years, day counts and ages are integers.

use std::collections::HashSet;
use std::rc::Rc;

use chrono::{Datelike, NaiveDate};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{add, eval_arith};
use crate::calendar;
use crate::kb::KnowledgeBase;
use crate::number::Number;
use crate::solve::{sub_solutions, Shared, SolveError};
use crate::subst::{undo, unify_in_place, Bindings};
use crate::term::{PredKey, Term, Var};

/// Every builtin as `(name, arity)`.
pub const BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    ("=", 2),
    ("\\=", 2),
    ("==", 2),
    ("\\==", 2),
    ("is", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("var", 1),
    ("nonvar", 1),
    ("number", 1),
    ("integer", 1),
    ("atom", 1),
    ("ground", 1),
    ("is_date", 1),
    ("aggregate_sum", 3),
    ("aggregate_count", 2),
    ("aggregate_max", 3),
    ("aggregate_min", 3),
    ("days_between", 3),
    ("date_before", 2),
    ("days_in_year", 2),
    ("leap_year", 1),
    ("overlap_days", 5),
    ("year_start", 2),
    ("year_end", 2),
    ("year_of", 2),
    ("date_parts", 4),
    ("add_days", 3),
    ("latest", 3),
    ("earliest", 3),
    ("age_on", 3),
    ("quarter", 2),
    ("week_start", 2),
    ("week_in", 4),
    ("day_in", 4),
    ("months_in", 4),
];

pub fn is_builtin(key: &PredKey) -> bool {
    BUILTINS.iter().any(|(n, a)| *a == key.arity && *n == key.name.name())
}

/// Argument positions holding a goal that the builtin proves on its own.
/// Such goals depend non-monotonically on their predicate, like negation.
pub fn goal_arguments(key: &PredKey) -> &'static [usize] {
    match (key.name.name(), key.arity) {
        ("aggregate_count", 2) => &[0],
        ("aggregate_sum" | "aggregate_max" | "aggregate_min", 3) => &[1],
        _ => &[],
    }
}

pub(crate) enum Outcome {
    Fail,
    True,
    /// Each alternative is a list of pairs to unify.
    Choices(Vec<Vec<(Term, Term)>>),
}

impl From<bool> for Outcome {
    fn from(b: bool) -> Self {
        if b {
            Outcome::True
        } else {
            Outcome::Fail
        }
    }
}

pub(crate) struct Ctx<'s, 'kb> {
    pub kb: &'kb KnowledgeBase,
    pub shared: &'s Rc<Shared>,
    pub bindings: &'s mut Bindings,
    pub trail: &'s mut Vec<Var>,
    pub depth: usize,
}

impl Ctx<'_, '_> {
    fn walk(&self, t: &Term) -> Term {
        self.bindings.walk(t).clone()
    }

    fn resolve(&self, t: &Term) -> Term {
        self.bindings.apply(t)
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        unify_in_place(self.bindings, self.trail, a, b, self.shared.limits.occurs_check)
    }

    fn unify_int(&mut self, a: &Term, n: impl Into<BigInt>) -> bool {
        self.unify(a, &Term::Int(n.into()))
    }

    fn date(&self, t: &Term, goal: &Term) -> Result<NaiveDate, SolveError> {
        match self.walk(t) {
            Term::Date(d) => Ok(d),
            Term::Var(_) => Err(SolveError::Instantiation(self.resolve(goal).to_string())),
            other => Err(SolveError::Type(format!("expected a date, found `{other}` in `{}`", self.resolve(goal)))),
        }
    }

    fn int(&self, t: &Term, goal: &Term) -> Result<i64, SolveError> {
        match self.walk(t) {
            Term::Int(i) => i
                .to_i64()
                .ok_or_else(|| SolveError::Type(format!("integer {i} out of range in `{}`", self.resolve(goal)))),
            Term::Var(_) => Err(SolveError::Instantiation(self.resolve(goal).to_string())),
            other => Err(SolveError::Type(format!("expected an integer, found `{other}` in `{}`", self.resolve(goal)))),
        }
    }

    fn year(&self, t: &Term, goal: &Term) -> Result<i32, SolveError> {
        let y = self.int(t, goal)?;
        i32::try_from(y)
            .ok()
            .filter(|y| (-9999..=9999).contains(y))
            .ok_or_else(|| SolveError::Type(format!("year {y} out of range")))
    }

    /// Instances of `template`, one per distinct instance of `goal` proved.
    fn collect(&self, template: &Term, goal: &Term, whole: &Term) -> Result<Vec<Term>, SolveError> {
        let g = self.resolve(goal);
        match &g {
            Term::Var(_) => return Err(SolveError::Instantiation(self.resolve(whole).to_string())),
            Term::Atom(_) | Term::Compound(_) => {}
            other => return Err(SolveError::Type(format!("`{other}` is not callable"))),
        }
        if g.pred_key().is_some_and(|k| is_builtin(&k)) {
            return Err(SolveError::Type(format!("cannot aggregate over builtin goal `{g}`")));
        }
        let t = self.resolve(template);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for b in sub_solutions(self.kb, self.shared, &g, self.depth + 1)? {
            if seen.insert(b.apply(&g)) {
                out.push(b.apply(&t));
            }
        }
        Ok(out)
    }
}

fn number_of(t: &Term, whole: &Term) -> Result<Number, SolveError> {
    t.as_number()
        .ok_or_else(|| SolveError::Type(format!("aggregated value `{t}` is not a number in `{whole}`")))
}

fn compare(ctx: &Ctx, op: &str, a: &Term, b: &Term) -> Result<bool, SolveError> {
    let ord = match (ctx.walk(a), ctx.walk(b)) {
        (Term::Date(x), Term::Date(y)) => x.cmp(&y),
        _ => eval_arith(a, ctx.bindings)?.cmp(&eval_arith(b, ctx.bindings)?),
    };
    Ok(match op {
        "=:=" => ord.is_eq(),
        "=\\=" => ord.is_ne(),
        "<" => ord.is_lt(),
        ">" => ord.is_gt(),
        "=<" => ord.is_le(),
        ">=" => ord.is_ge(),
        _ => unreachable!("not a comparison: {op}"),
    })
}

/// Maximum (or minimum) of numbers or of dates.
fn extreme(values: Vec<Term>, want_max: bool, whole: &Term) -> Result<Option<Term>, SolveError> {
    let mut best: Option<Term> = None;
    for v in values {
        let replace = match (&best, &v) {
            (None, Term::Date(_)) => true,
            (None, _) => {
                number_of(&v, whole)?;
                true
            }
            (Some(Term::Date(b)), Term::Date(d)) => {
                if want_max {
                    d > b
                } else {
                    d < b
                }
            }
            (Some(b), _) => {
                let (x, y) = (number_of(&v, whole)?, number_of(b, whole)?);
                if want_max {
                    x > y
                } else {
                    x < y
                }
            }
        };
        if replace {
            best = Some(v);
        }
    }
    Ok(best)
}

pub(crate) fn call(ctx: &mut Ctx, goal: &Term) -> Result<Outcome, SolveError> {
    let (name, args): (&str, &[Term]) = match goal {
        Term::Atom(a) => (a.name(), &[]),
        Term::Compound(c) => (c.functor().name(), c.args()),
        _ => return Err(SolveError::Type(format!("`{goal}` is not callable"))),
    };
    let g = goal;
    Ok(match (name, args) {
        ("true", []) => Outcome::True,
        ("fail" | "false", []) => Outcome::Fail,
        ("=", [a, b]) => ctx.unify(a, b).into(),
        ("\\=", [a, b]) => {
            let mark = ctx.trail.len();
            let ok = ctx.unify(a, b);
            undo(ctx.bindings, ctx.trail, mark);
            (!ok).into()
        }
        ("==", [a, b]) => (ctx.resolve(a) == ctx.resolve(b)).into(),
        ("\\==", [a, b]) => (ctx.resolve(a) != ctx.resolve(b)).into(),
        ("is", [x, e]) => {
            let n = eval_arith(e, ctx.bindings)?;
            ctx.unify(x, &Term::from_number(n)).into()
        }
        ("=:=" | "=\\=" | "<" | ">" | "=<" | ">=", [a, b]) => compare(ctx, name, a, b)?.into(),
        ("var", [a]) => ctx.walk(a).is_var().into(),
        ("nonvar", [a]) => (!ctx.walk(a).is_var()).into(),
        ("number", [a]) => matches!(ctx.walk(a), Term::Int(_) | Term::Dec(_)).into(),
        ("integer", [a]) => matches!(ctx.walk(a), Term::Int(_)).into(),
        ("atom", [a]) => matches!(ctx.walk(a), Term::Atom(_)).into(),
        ("ground", [a]) => ctx.resolve(a).is_ground().into(),
        ("is_date", [a]) => matches!(ctx.walk(a), Term::Date(_)).into(),

        ("aggregate_sum", [t, q, s]) => {
            let whole = ctx.resolve(g);
            let mut total = Number::Int(BigInt::from(0));
            for v in ctx.collect(t, q, g)? {
                total = add(&total, &number_of(&v, &whole)?);
            }
            ctx.unify(s, &Term::from_number(total)).into()
        }
        ("aggregate_count", [q, n]) => {
            let count = ctx.collect(q, q, g)?.len();
            ctx.unify_int(n, count).into()
        }
        ("aggregate_max" | "aggregate_min", [t, q, m]) => {
            let whole = ctx.resolve(g);
            let values = ctx.collect(t, q, g)?;
            match extreme(values, name == "aggregate_max", &whole)? {
                Some(best) => ctx.unify(m, &best).into(),
                None => Outcome::Fail,
            }
        }

        ("days_between", [a, b, n]) => {
            let days = calendar::days_between(ctx.date(a, g)?, ctx.date(b, g)?);
            ctx.unify_int(n, days).into()
        }
        ("date_before", [a, b]) => calendar::date_before(ctx.date(a, g)?, ctx.date(b, g)?).into(),
        ("days_in_year", [y, n]) => {
            let days = calendar::days_in_year(ctx.year(y, g)?);
            ctx.unify_int(n, days).into()
        }
        ("leap_year", [y]) => calendar::is_leap_year(ctx.year(y, g)?).into(),
        ("overlap_days", [s1, e1, s2, e2, n]) => {
            let days = calendar::overlap_days(ctx.date(s1, g)?, ctx.date(e1, g)?, ctx.date(s2, g)?, ctx.date(e2, g)?);
            ctx.unify_int(n, days).into()
        }
        ("year_start" | "year_end", [y, d]) => {
            let year = ctx.year(y, g)?;
            let day = if name == "year_start" { calendar::year_start(year) } else { calendar::year_end(year) };
            match day {
                Some(day) => ctx.unify(d, &Term::Date(day)).into(),
                None => Outcome::Fail,
            }
        }
        ("year_of", [d, y]) => {
            let year = ctx.date(d, g)?.year();
            ctx.unify_int(y, year).into()
        }
        ("date_parts", [d, y, m, dd]) => match ctx.walk(d) {
            Term::Var(_) => {
                let (year, month, day) = (ctx.year(y, g)?, ctx.int(m, g)?, ctx.int(dd, g)?);
                let built = u32::try_from(month)
                    .ok()
                    .zip(u32::try_from(day).ok())
                    .and_then(|(mo, da)| NaiveDate::from_ymd_opt(year, mo, da));
                match built {
                    Some(date) => ctx.unify(d, &Term::Date(date)).into(),
                    None => Outcome::Fail,
                }
            }
            _ => {
                let date = ctx.date(d, g)?;
                (ctx.unify_int(y, date.year()) && ctx.unify_int(m, date.month()) && ctx.unify_int(dd, date.day()))
                    .into()
            }
        },
        ("latest" | "earliest", [a, b, out]) => {
            let (x, y) = (ctx.date(a, g)?, ctx.date(b, g)?);
            let pick = if (name == "latest") == (x >= y) { x } else { y };
            ctx.unify(out, &Term::Date(pick)).into()
        }
        ("add_days", [d, n, out]) => {
            let (date, days) = (ctx.date(d, g)?, ctx.int(n, g)?);
            match calendar::add_days(date, days) {
                Some(r) => ctx.unify(out, &Term::Date(r)).into(),
                None => Outcome::Fail,
            }
        }
        ("age_on", [birth, on, age]) => {
            let years = calendar::age_on(ctx.date(birth, g)?, ctx.date(on, g)?);
            ctx.unify_int(age, years).into()
        }
        ("quarter", [d, q]) => {
            let quarter = calendar::quarter(ctx.date(d, g)?);
            ctx.unify_int(q, quarter).into()
        }
        ("week_start", [d, w]) => {
            let start = calendar::week_start(ctx.date(d, g)?);
            ctx.unify(w, &Term::Date(start)).into()
        }
        ("week_in" | "day_in", [s, e, y, out]) => {
            let (start, end, year) = (ctx.date(s, g)?, ctx.date(e, g)?, ctx.year(y, g)?);
            let days = if name == "week_in" {
                calendar::weeks_in_range(start, end, year)
            } else {
                calendar::days_in_range(start, end, year)
            };
            Outcome::Choices(days.into_iter().map(|d| vec![(out.clone(), Term::Date(d))]).collect())
        }
        ("months_in", [s, e, y, n]) => {
            let months = calendar::months_in_range(ctx.date(s, g)?, ctx.date(e, g)?, ctx.year(y, g)?);
            ctx.unify_int(n, months).into()
        }
        _ => return Err(SolveError::Type(format!("no builtin {name}/{}", args.len()))),
    })
}
