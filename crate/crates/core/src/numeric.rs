//! The numeric values of expression evaluation: exact integers and reals.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub enum NumericValue {
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
}

impl NumericValue {
    pub fn parse(text: &str) -> Option<NumericValue> {
        if text.contains('.') {
            text.parse().ok().map(NumericValue::Real)
        } else {
            text.parse::<i64>()
                .map(NumericValue::Int)
                .ok()
                .or_else(|| text.parse().ok().map(NumericValue::Real))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            NumericValue::Int(i) => i as f64,
            NumericValue::Real(r) => r,
        }
    }

    /// The exact integer this value equals, if any.
    pub fn as_integer(self) -> Option<i64> {
        match self {
            NumericValue::Int(i) => Some(i),
            NumericValue::Real(r) if r.fract() == 0.0 && r.abs() < 9.0e15 => Some(r as i64),
            NumericValue::Real(_) => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self.as_f64() == 0.0
    }

    fn int_op(
        self,
        other: NumericValue,
        exact: fn(i64, i64) -> Option<i64>,
        real: fn(f64, f64) -> f64,
    ) -> NumericValue {
        match (self, other) {
            (NumericValue::Int(a), NumericValue::Int(b)) => exact(a, b)
                .map(NumericValue::Int)
                .unwrap_or_else(|| NumericValue::Real(real(a as f64, b as f64))),
            (a, b) => NumericValue::Real(real(a.as_f64(), b.as_f64())),
        }
    }

    /// Integer division stays exact only when it divides evenly.
    pub fn checked_div(self, other: NumericValue) -> Result<NumericValue, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(match (self, other) {
            (NumericValue::Int(a), NumericValue::Int(b)) if a.checked_rem(b) == Some(0) => {
                NumericValue::Int(a / b)
            }
            (a, b) => NumericValue::Real(a.as_f64() / b.as_f64()),
        })
    }
}

impl std::ops::Add for NumericValue {
    type Output = NumericValue;

    fn add(self, other: NumericValue) -> NumericValue {
        self.int_op(other, i64::checked_add, |a, b| a + b)
    }
}

impl std::ops::Sub for NumericValue {
    type Output = NumericValue;

    fn sub(self, other: NumericValue) -> NumericValue {
        self.int_op(other, i64::checked_sub, |a, b| a - b)
    }
}

impl std::ops::Mul for NumericValue {
    type Output = NumericValue;

    fn mul(self, other: NumericValue) -> NumericValue {
        self.int_op(other, i64::checked_mul, |a, b| a * b)
    }
}

impl std::ops::Neg for NumericValue {
    type Output = NumericValue;

    fn neg(self) -> NumericValue {
        match self {
            NumericValue::Int(i) => i
                .checked_neg()
                .map(NumericValue::Int)
                .unwrap_or(NumericValue::Real(-(i as f64))),
            NumericValue::Real(r) => NumericValue::Real(-r),
        }
    }
}

impl PartialEq for NumericValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for NumericValue {}

impl PartialOrd for NumericValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order across kinds; NaN sorts via IEEE total order.
impl Ord for NumericValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NumericValue::Int(a), NumericValue::Int(b)) => a.cmp(b),
            (a, b) => a.as_f64().total_cmp(&b.as_f64()),
        }
    }
}

impl Hash for NumericValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.as_integer() {
            Some(i) => i.hash(state),
            None => self.as_f64().to_bits().hash(state),
        }
    }
}

impl fmt::Display for NumericValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericValue::Int(i) => write!(f, "{i}"),
            NumericValue::Real(r) => write!(f, "{r:?}"),
        }
    }
}

impl Serialize for NumericValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NumericValue::Int(i) => s.serialize_i64(*i),
            NumericValue::Real(r) => s.serialize_f64(*r),
        }
    }
}

impl From<i64> for NumericValue {
    fn from(i: i64) -> Self {
        NumericValue::Int(i)
    }
}
