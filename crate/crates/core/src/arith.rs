//! Evaluation of ground arithmetic expressions.
//!
//! Integers stay integers under `+ - * min max` and exact `/`; any decimal
//! operand makes the result a decimal. Nothing is ever converted to binary
//! floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::number::{Decimal, Number, DEFAULT_DIVISION_SCALE};
use crate::subst::Bindings;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("arithmetic on unbound variable in `{0}`")]
    Unbound(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("unknown arithmetic operator `{0}`")]
    UnknownOperator(String),
    #[error("`{0}` is not a number")]
    NotANumber(String),
}

/// Names of evaluable functors, with arity.
pub const OPERATORS: &[(&str, usize)] = &[
    ("+", 2),
    ("-", 2),
    ("*", 2),
    ("/", 2),
    ("//", 2),
    ("-", 1),
    ("abs", 1),
    ("min", 2),
    ("max", 2),
    ("round", 1),
    ("floor", 1),
    ("ceiling", 1),
    ("percent", 2),
];

fn both_int<'a>(a: &'a Number, b: &'a Number) -> Option<(&'a BigInt, &'a BigInt)> {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => Some((x, y)),
        _ => None,
    }
}

fn dec(n: Number) -> Number {
    match n {
        Number::Int(i) => Number::Dec(Decimal::from_int(i)),
        d => d,
    }
}

pub fn add(a: &Number, b: &Number) -> Number {
    match both_int(a, b) {
        Some((x, y)) => Number::Int(x + y),
        None => Number::Dec(a.to_decimal().add(&b.to_decimal())),
    }
}

pub fn sub(a: &Number, b: &Number) -> Number {
    match both_int(a, b) {
        Some((x, y)) => Number::Int(x - y),
        None => Number::Dec(a.to_decimal().sub(&b.to_decimal())),
    }
}

pub fn mul(a: &Number, b: &Number) -> Number {
    match both_int(a, b) {
        Some((x, y)) => Number::Int(x * y),
        None => Number::Dec(a.to_decimal().mul(&b.to_decimal())),
    }
}

/// Exact quotient; integer when both operands are integers and it divides.
pub fn div(a: &Number, b: &Number) -> Option<Number> {
    if b.is_zero() {
        return None;
    }
    if let Some((x, y)) = both_int(a, b) {
        let (q, r) = x.div_rem(y);
        if r == BigInt::from(0) {
            return Some(Number::Int(q));
        }
    }
    a.to_decimal().div(&b.to_decimal(), DEFAULT_DIVISION_SCALE).map(Number::Dec)
}

pub fn round_half_away(a: &Number) -> Number {
    match a {
        Number::Int(_) => a.clone(),
        Number::Dec(d) => Number::Int(d.round_half_away()),
    }
}

/// Evaluate `expr` after applying `bindings`.
pub fn eval_arith(expr: &Term, bindings: &Bindings) -> Result<Number, ArithError> {
    let t = bindings.walk(expr);
    match t {
        Term::Int(i) => Ok(Number::Int(i.clone())),
        Term::Dec(d) => Ok(Number::Dec(d.clone())),
        Term::Var(_) => Err(ArithError::Unbound(bindings.apply(expr).to_string())),
        Term::Atom(a) => Err(ArithError::UnknownOperator(format!("{}/0", a.name()))),
        Term::Date(_) => Err(ArithError::NotANumber(t.to_string())),
        Term::Compound(c) => {
            let name = c.functor().name();
            let args = c
                .args()
                .iter()
                .map(|a| eval_arith(a, bindings))
                .collect::<Result<Vec<_>, _>>()?;
            let shown = || bindings.apply(expr).to_string();
            Ok(match (name, args.as_slice()) {
                ("+", [a, b]) => add(a, b),
                ("-", [a, b]) => sub(a, b),
                ("*", [a, b]) => mul(a, b),
                ("/", [a, b]) => div(a, b).ok_or_else(|| ArithError::DivisionByZero(shown()))?,
                ("//", [a, b]) => {
                    if b.is_zero() {
                        return Err(ArithError::DivisionByZero(shown()));
                    }
                    let q = div(a, b).expect("divisor is non-zero");
                    Number::Int(q.to_decimal().floor())
                }
                ("-", [a]) => sub(&Number::Int(BigInt::from(0)), a),
                ("abs", [a]) => {
                    if a.is_negative() {
                        sub(&Number::Int(BigInt::from(0)), a)
                    } else {
                        a.clone()
                    }
                }
                ("min", [a, b]) => {
                    if b < a {
                        b.clone()
                    } else {
                        a.clone()
                    }
                }
                ("max", [a, b]) => {
                    if b > a {
                        b.clone()
                    } else {
                        a.clone()
                    }
                }
                ("round", [a]) => round_half_away(a),
                ("floor", [a]) => Number::Int(a.to_decimal().floor()),
                ("ceiling", [a]) => Number::Int(a.to_decimal().ceil()),
                ("percent", [p, x]) => {
                    let prod = dec(mul(p, x));
                    div(&prod, &Number::Int(BigInt::from(100))).expect("non-zero divisor")
                }
                _ => return Err(ArithError::UnknownOperator(format!("{}/{}", name, args.len()))),
            })
        }
    }
}
