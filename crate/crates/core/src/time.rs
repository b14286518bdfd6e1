//! Exact time arithmetic.
//!
//! Release dates, deadlines, landmarks and every interval produced by the
//! rounding pipeline are exact rationals. Only energies are floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: divide in floating point.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Parses a decimal literal such as `-12.5e-3` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(q)
}

/// Parses `"p/q"` or a decimal string.
pub fn parse_rational_str(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => parse_decimal(text),
    }
}

/// Reads a JSON number or `"p/q"` string as an exact rational.
pub fn rational_from_json(value: &Value, path: &str) -> Result<Rational> {
    match value {
        Value::Number(n) => parse_decimal(&n.to_string())
            .ok_or_else(|| Error::parse(path, format!("unreadable number {n}"))),
        Value::String(s) => parse_rational_str(s)
            .ok_or_else(|| Error::parse(path, format!("expected a rational, got {s:?}"))),
        other => Err(Error::parse(
            path,
            format!("expected a number, got {other}"),
        )),
    }
}

/// Emits a rational as a JSON number when the number prints and parses back
/// exactly; otherwise as a `"p/q"` string.
pub fn rational_to_json(q: &Rational) -> Value {
    if q.is_integer() {
        if let Some(i) = q.to_integer().to_i64() {
            return Value::from(i);
        }
    }
    let f = to_f64(q);
    if f.is_finite() {
        if let Some(num) = serde_json::Number::from_f64(f) {
            if parse_decimal(&num.to_string()).as_ref() == Some(q) {
                return Value::Number(num);
            }
        }
    }
    Value::String(format!("{}/{}", q.numer(), q.denom()))
}

/// Closed time interval `[start, end]`.
///
/// Two intervals conflict only when their interiors meet; touching endpoints
/// are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: Rational,
    pub end: Rational,
}

impl Interval {
    pub fn new(start: Rational, end: Rational) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> Rational {
        &self.end - &self.start
    }

    pub fn len_f64(&self) -> f64 {
        to_f64(&self.len())
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// The interiors intersect.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains_point_interior(&self, t: &Rational) -> bool {
        &self.start < t && t < &self.end
    }

    /// Intersection with positive length, if any.
    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let start = max(&self.start, &other.start);
        let end = min(&self.end, &other.end);
        (start < end).then(|| Interval::new(start, end))
    }

    pub fn midpoint(&self) -> Rational {
        (&self.start + &self.end) / int(2)
    }

    pub fn translate(&self, by: &Rational) -> Interval {
        Interval::new(&self.start + by, &self.end + by)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// `2^k` as a rational.
pub fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::one() << k as usize)
}

/// Rounds `q` up to the nearest integer.
pub fn ceil(q: &Rational) -> BigInt {
    let (d, r) = q.numer().div_mod_floor(q.denom());
    if r.is_zero() {
        d
    } else {
        d + 1
    }
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}
