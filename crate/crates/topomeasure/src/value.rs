//! Exact values: nonnegative rationals plus a distinguished infinity.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("infinity minus infinity is undefined")]
    InfiniteDifference,
    #[error("negative value {0}")]
    Negative(String),
    #[error("bad value literal {0:?}")]
    Parse(String),
}

/// A value of a set function: a finite rational or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Rational),
    Infinite,
}

impl Value {
    pub const ZERO: Value = Value::Finite(Ratio::new_raw(0, 1));
    pub const ONE: Value = Value::Finite(Ratio::new_raw(1, 1));

    pub fn int(n: i64) -> Self {
        Value::Finite(Rational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Value::Finite(Rational::new(num, den))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Value::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Value::Finite(r) if r.is_zero())
    }

    pub fn finite(self) -> Option<Rational> {
        match self {
            Value::Finite(r) => Some(r),
            Value::Infinite => None,
        }
    }

    /// `self - rhs`; errors on `inf - inf` and on negative results.
    pub fn checked_sub(self, rhs: Value) -> Result<Value, ValueError> {
        match (self, rhs) {
            (Value::Infinite, Value::Infinite) => Err(ValueError::InfiniteDifference),
            (Value::Infinite, Value::Finite(_)) => Ok(Value::Infinite),
            (Value::Finite(a), Value::Infinite) => Err(ValueError::Negative(format!("{a} - inf"))),
            (Value::Finite(a), Value::Finite(b)) => {
                let d = a - b;
                if d.is_negative() {
                    Err(ValueError::Negative(d.to_string()))
                } else {
                    Ok(Value::Finite(d))
                }
            }
        }
    }
}

impl Default for Value {
    fn default() -> Self {
        Value::ZERO
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Finite(r)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Infinite,
        }
    }
}

impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::ZERO, Add::add)
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::Infinite) => Ordering::Less,
            (Value::Infinite, Value::Finite(_)) => Ordering::Greater,
            (Value::Infinite, Value::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(r) => write!(f, "{r}"),
            Value::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Value {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Value::Infinite);
        }
        let bad = || ValueError::Parse(s.to_string());
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Rational::new(n, d)
            }
            None => Rational::from_integer(s.parse().map_err(|_| bad())?),
        };
        if r.is_negative() {
            return Err(ValueError::Negative(r.to_string()));
        }
        Ok(Value::Finite(r))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(Value::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Value::ratio(4, 2).to_string(), "2");
        assert_eq!(Value::Infinite.to_string(), "inf");
    }

    #[test]
    fn infinity_absorbs_sums() {
        assert_eq!(Value::ONE + Value::Infinite, Value::Infinite);
        assert_eq!(
            Value::Infinite.checked_sub(Value::Infinite),
            Err(ValueError::InfiniteDifference)
        );
        assert_eq!(Value::Infinite.checked_sub(Value::ONE), Ok(Value::Infinite));
    }

    #[test]
    fn negative_differences_are_errors() {
        assert!(Value::ZERO.checked_sub(Value::ONE).is_err());
        assert_eq!(Value::ONE.checked_sub(Value::ONE), Ok(Value::ZERO));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "1/2", "7/3", "inf", "12"] {
            assert_eq!(s.parse::<Value>().unwrap().to_string(), s);
        }
        assert!("-1".parse::<Value>().is_err());
        assert!("1/0".parse::<Value>().is_err());
        assert_eq!("6/4".parse::<Value>().unwrap().to_string(), "3/2");
    }
}
