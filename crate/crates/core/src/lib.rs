//! A small Horn-clause engine.
//!
//! Programs are definite clauses with negation as failure. Numbers are
//! exact (big integers and decimals), dates are first-class terms, and a
//! handful of builtins cover arithmetic, aggregation and the calendar.
//!
//! ```
//! use taxlog_core::{parse_query, solve_all, KnowledgeBase, SolveLimits};
//!
//! let mut kb = KnowledgeBase::new();
//! kb.consult_str("wage(alice, 30000).\nrich(P) :- wage(P, W), W > 25000.\n", "demo.pl").unwrap();
//! let answers = solve_all(&kb, &parse_query("rich(Who)").unwrap(), SolveLimits::default()).unwrap();
//! assert_eq!(answers[0].bindings.to_string(), "{Who = alice}");
//! ```

pub mod arith;
pub mod builtins;
pub mod calendar;
pub mod clause;
pub mod kb;
pub mod lint;
pub mod number;
pub mod parser;
pub mod solve;
pub mod subst;
pub mod term;

pub use arith::{eval_arith, ArithError};
pub use clause::{Clause, ClauseId, Literal, LiteralKind};
pub use kb::{KbError, KnowledgeBase};
pub use lint::{lint, LintReport};
pub use number::{Decimal, Number};
pub use parser::{parse_items, parse_program, parse_query, parse_term, Item, ParseError};
pub use solve::{prove, solve_all, Resource, Solution, SolveError, SolveLimits, Solver, TraceStep, Via};
pub use subst::{apply, rename_apart, unify, unify_checked, Bindings, VarGen};
pub use term::{Atom, Compound, PredKey, Term, Var};
