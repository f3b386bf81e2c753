//! Exact numbers: arbitrary-precision integers and scaled decimals.
//!
//! Nothing in the engine touches binary floating point. A [`Decimal`] is a
//! `BigInt` mantissa with a base-ten scale, kept normalized so that equal
//! values have equal representations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Fractional digits kept when a quotient does not terminate.
pub const DEFAULT_DIVISION_SCALE: u32 = 12;

/// `mantissa / 10^scale`, with no trailing zero digits in the mantissa when
/// `scale > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decimal {
    mantissa: BigInt,
    scale: u32,
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), n as usize)
}

/// Integer division rounding half away from zero.
fn div_round_half_away(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        return q;
    }
    let twice = r.abs() * 2u32;
    if twice >= den.abs() {
        if num.is_negative() != den.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

impl Decimal {
    pub fn new(mantissa: BigInt, scale: u32) -> Self {
        let mut d = Decimal { mantissa, scale };
        d.normalize();
        d
    }

    pub fn from_int(i: BigInt) -> Self {
        Decimal { mantissa: i, scale: 0 }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.scale = 0;
            return;
        }
        let ten = BigInt::from(10u32);
        while self.scale > 0 {
            let (q, r) = self.mantissa.div_rem(&ten);
            if !r.is_zero() {
                break;
            }
            self.mantissa = q;
            self.scale -= 1;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_integral(&self) -> bool {
        self.scale == 0
    }

    /// Mantissa rescaled to `scale` (which must be at least `self.scale`).
    fn rescaled(&self, scale: u32) -> BigInt {
        &self.mantissa * pow10(scale - self.scale)
    }

    pub fn add(&self, other: &Decimal) -> Decimal {
        let s = self.scale.max(other.scale);
        Decimal::new(self.rescaled(s) + other.rescaled(s), s)
    }

    pub fn sub(&self, other: &Decimal) -> Decimal {
        let s = self.scale.max(other.scale);
        Decimal::new(self.rescaled(s) - other.rescaled(s), s)
    }

    pub fn mul(&self, other: &Decimal) -> Decimal {
        Decimal::new(&self.mantissa * &other.mantissa, self.scale + other.scale)
    }

    pub fn neg(&self) -> Decimal {
        Decimal { mantissa: -&self.mantissa, scale: self.scale }
    }

    pub fn abs(&self) -> Decimal {
        Decimal { mantissa: self.mantissa.abs(), scale: self.scale }
    }

    /// Exact quotient when it terminates within `max_scale` digits, otherwise
    /// rounded half away from zero at `max_scale`. `None` on division by zero.
    pub fn div(&self, other: &Decimal, max_scale: u32) -> Option<Decimal> {
        if other.mantissa.is_zero() {
            return None;
        }
        // self / other = (m1 * 10^s2) / (m2 * 10^s1)
        let num = &self.mantissa * pow10(other.scale);
        let den = &other.mantissa * pow10(self.scale);
        let scaled = num * pow10(max_scale);
        Some(Decimal::new(div_round_half_away(&scaled, &den), max_scale))
    }

    /// Round to an integer, half away from zero.
    pub fn round_half_away(&self) -> BigInt {
        div_round_half_away(&self.mantissa, &pow10(self.scale))
    }

    pub fn floor(&self) -> BigInt {
        self.mantissa.div_floor(&pow10(self.scale))
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.mantissa).div_floor(&pow10(self.scale)))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        self.rescaled(s).cmp(&other.rescaled(s))
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Always renders at least one fractional digit so the text reads back as
/// a decimal rather than an integer.
impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.mantissa.is_negative();
        let digits = self.mantissa.abs().to_string();
        let scale = self.scale as usize;
        let (int_part, frac_part) = if scale == 0 {
            (digits, "0".to_string())
        } else if digits.len() > scale {
            let (a, b) = digits.split_at(digits.len() - scale);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(scale - digits.len()), digits))
        };
        if neg {
            write!(f, "-")?;
        }
        write!(f, "{int_part}.{frac_part}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed decimal literal `{0}`")]
pub struct ParseDecimalError(pub String);

impl FromStr for Decimal {
    type Err = ParseDecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDecimalError(s.to_string());
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty()
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
        let mantissa = if neg { -mantissa } else { mantissa };
        Ok(Decimal::new(mantissa, frac_part.len() as u32))
    }
}

/// Result of evaluating an arithmetic expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Number {
    Int(BigInt),
    Dec(Decimal),
}

impl Number {
    pub fn to_decimal(&self) -> Decimal {
        match self {
            Number::Int(i) => Decimal::from_int(i.clone()),
            Number::Dec(d) => d.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Int(i) => i.is_zero(),
            Number::Dec(d) => d.mantissa.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Number::Int(i) => i.is_negative(),
            Number::Dec(d) => d.mantissa.is_negative(),
        }
    }

    pub fn one() -> Number {
        Number::Int(BigInt::one())
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a.cmp(b),
            _ => self.to_decimal().cmp(&other.to_decimal()),
        }
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Int(i) => write!(f, "{i}"),
            Number::Dec(d) => write!(f, "{d}"),
        }
    }
}
