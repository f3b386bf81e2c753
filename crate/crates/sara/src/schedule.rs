//! Section 1 rate tables read back out of the knowledge base, with the
//! structural checks every table must pass.

use std::fmt;

use num_bigint::BigInt;
use taxlog_core::arith::{add, div, mul, sub};
use taxlog_core::{parse_query, solve_all, KnowledgeBase, Number, SolveError, SolveLimits, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub over: Number,
    /// `None` for the top bracket.
    pub not_over: Option<Number>,
    pub base: Number,
    pub rate_percent: Number,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSchedule {
    pub table: String,
    pub rows: Vec<Bracket>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("table {0} has no rows")]
    Empty(String),
    #[error("table {table}: malformed row {row}")]
    Malformed { table: String, row: String },
    #[error("table {0} does not start at zero with zero base")]
    NotFromZero(String),
    #[error("table {table}: row {index} starts at {found}, previous row ends at {expected}")]
    Gap { table: String, index: usize, expected: String, found: String },
    #[error("table {table}: jump at {at}: {below} below, {above} above")]
    Discontinuous { table: String, at: String, below: String, above: String },
    #[error("table {table}: rate in row {index} is negative or falls")]
    Regressive { table: String, index: usize },
    #[error("table {0}: only the last row may be open-ended")]
    OpenEnded(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn zero() -> Number {
    Number::Int(BigInt::from(0))
}

fn hundred() -> Number {
    Number::Int(BigInt::from(100))
}

impl BracketSchedule {
    /// Rows of `bracket(Table, ...)` facts, sorted by lower bound.
    pub fn from_kb(kb: &KnowledgeBase, table: &str) -> Result<Self, ScheduleError> {
        let q = parse_query(&format!("bracket({table}, Over, NotOver, Base, Rate)")).expect("well-formed query");
        let mut rows = Vec::new();
        for s in solve_all(kb, &q, SolveLimits::default())? {
            let get = |v: &str| s.bindings.value(v).unwrap_or_else(|| Term::atom("?"));
            let bad = || ScheduleError::Malformed { table: table.to_string(), row: s.bindings.to_string() };
            let num = |v: &str| get(v).as_number().ok_or_else(bad);
            let not_over = match get("NotOver") {
                Term::Atom(a) if a.name() == "none" => None,
                t => Some(t.as_number().ok_or_else(bad)?),
            };
            rows.push(Bracket { over: num("Over")?, not_over, base: num("Base")?, rate_percent: num("Rate")? });
        }
        if rows.is_empty() {
            return Err(ScheduleError::Empty(table.to_string()));
        }
        rows.sort_by(|a, b| a.over.cmp(&b.over));
        Ok(BracketSchedule { table: table.to_string(), rows })
    }

    /// The four section 1 tables.
    pub fn section1(kb: &KnowledgeBase) -> Result<Vec<Self>, ScheduleError> {
        ["s1_a", "s1_b", "s1_c", "s1_d"].iter().map(|t| Self::from_kb(kb, t)).collect()
    }

    fn row_tax(row: &Bracket, income: &Number) -> Number {
        let excess = sub(income, &row.over);
        add(&row.base, &div(&mul(&row.rate_percent, &excess), &hundred()).expect("division by 100 is exact"))
    }

    /// Tax on `income`, exact. Zero for income at or below zero.
    pub fn tax_on(&self, income: &Number) -> Number {
        if *income <= zero() {
            return zero();
        }
        let row = self
            .rows
            .iter()
            .rev()
            .find(|r| *income > r.over)
            .expect("first row starts at zero");
        Self::row_tax(row, income)
    }

    /// Lower bounds start at zero, rows are contiguous, the tax is
    /// continuous at every boundary and marginal rates never fall.
    pub fn check(&self) -> Result<(), ScheduleError> {
        let t = || self.table.clone();
        let first = &self.rows[0];
        if first.over != zero() || first.base != zero() {
            return Err(ScheduleError::NotFromZero(t()));
        }
        for (i, pair) in self.rows.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            let Some(end) = &lo.not_over else { return Err(ScheduleError::OpenEnded(t())) };
            if *end != hi.over {
                return Err(ScheduleError::Gap {
                    table: t(),
                    index: i + 1,
                    expected: end.to_string(),
                    found: hi.over.to_string(),
                });
            }
            let below = Self::row_tax(lo, end);
            if below != hi.base {
                return Err(ScheduleError::Discontinuous {
                    table: t(),
                    at: end.to_string(),
                    below: below.to_string(),
                    above: hi.base.to_string(),
                });
            }
            if hi.rate_percent < lo.rate_percent {
                return Err(ScheduleError::Regressive { table: t(), index: i + 1 });
            }
        }
        if self.rows.iter().any(|r| r.rate_percent < zero()) {
            return Err(ScheduleError::Regressive { table: t(), index: 0 });
        }
        if self.rows.last().is_some_and(|r| r.not_over.is_some()) {
            return Err(ScheduleError::OpenEnded(t()));
        }
        Ok(())
    }
}

impl fmt::Display for BracketSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.table)?;
        for r in &self.rows {
            let upper = r.not_over.as_ref().map_or("-".to_string(), ToString::to_string);
            writeln!(f, "  {:>10} {:>10} {:>10} {:>5}%", r.over, upper, r.base, r.rate_percent)?;
        }
        Ok(())
    }
}
