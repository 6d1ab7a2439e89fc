use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Commutative monoids supported as edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Monoid {
    IntAdd,
    RationalAdd,
    BoolOr,
}

impl Monoid {
    pub fn name(self) -> &'static str {
        match self {
            Monoid::IntAdd => "int",
            Monoid::RationalAdd => "rational",
            Monoid::BoolOr => "bool",
        }
    }

    pub fn from_name(s: &str) -> Option<Monoid> {
        match s {
            "int" => Some(Monoid::IntAdd),
            "rational" => Some(Monoid::RationalAdd),
            "bool" => Some(Monoid::BoolOr),
            _ => None,
        }
    }

    pub fn zero(self) -> Weight {
        match self {
            Monoid::IntAdd => Weight::Int(0),
            Monoid::RationalAdd => Weight::Rat(BigRational::zero()),
            Monoid::BoolOr => Weight::Bool(false),
        }
    }

    pub fn is_cancellative(self) -> bool {
        !matches!(self, Monoid::BoolOr)
    }

    /// Parses a weight literal as written in formula text.
    pub fn parse_literal(self, s: &str) -> Option<Weight> {
        match self {
            Monoid::IntAdd => s.parse::<i128>().ok().map(Weight::Int),
            Monoid::RationalAdd => parse_rational(s).map(Weight::Rat),
            Monoid::BoolOr => match s {
                "true" => Some(Weight::Bool(true)),
                "false" => Some(Weight::Bool(false)),
                _ => None,
            },
        }
    }
}

/// A monoid element. Integer sums are kept in 128 bits so that no sum of
/// stored 64-bit weights can overflow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Int(i128),
    Rat(BigRational),
    Bool(bool),
}

impl Weight {
    pub fn monoid(&self) -> Monoid {
        match self {
            Weight::Int(_) => Monoid::IntAdd,
            Weight::Rat(_) => Monoid::RationalAdd,
            Weight::Bool(_) => Monoid::BoolOr,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Int(v) => *v == 0,
            Weight::Rat(v) => v.is_zero(),
            Weight::Bool(b) => !*b,
        }
    }

    pub fn add_assign(&mut self, other: &Weight) {
        match (self, other) {
            (Weight::Int(a), Weight::Int(b)) => {
                *a = a.checked_add(*b).expect("integer weight sum overflow")
            }
            (Weight::Rat(a), Weight::Rat(b)) => *a += b,
            (Weight::Bool(a), Weight::Bool(b)) => *a |= *b,
            (a, b) => panic!("mixed monoids: {a:?} + {b:?}"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Weight::Int(v) => match i64::try_from(*v) {
                Ok(v) => serde_json::Value::from(v),
                Err(_) => serde_json::Value::String(v.to_string()),
            },
            Weight::Rat(r) => serde_json::Value::String(rational_string(r)),
            Weight::Bool(b) => serde_json::Value::Bool(*b),
        }
    }

    pub fn from_json(v: &serde_json::Value, monoid: Monoid) -> Option<Weight> {
        match monoid {
            Monoid::IntAdd => match v {
                serde_json::Value::Number(n) => n.as_i64().map(|v| Weight::Int(v as i128)),
                serde_json::Value::String(s) => s.parse::<i128>().ok().map(Weight::Int),
                _ => None,
            },
            Monoid::RationalAdd => json_rational(v).map(Weight::Rat),
            Monoid::BoolOr => v.as_bool().map(Weight::Bool),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Int(v) => write!(f, "{v}"),
            Weight::Rat(r) => write!(f, "{}", rational_string(r)),
            Weight::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Canonical text of a rational: `p` for integers, `p/q` otherwise, lowest terms.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` with integer p, q (q nonzero); result is normalized.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).ok()?;
    let q = BigInt::from_str(q).ok()?;
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

/// Accepts rational strings and JSON integers; rejects floats.
pub fn json_rational(v: &serde_json::Value) -> Option<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(BigRational::from_integer(BigInt::from(i)))
            } else {
                n.as_u64().map(|u| BigRational::from_integer(BigInt::from(u)))
            }
        }
        _ => None,
    }
}

pub fn is_probability(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_is_lowest_terms() {
        assert_eq!(rational_string(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(rational_string(&parse_rational("6/3").unwrap()), "2");
        assert_eq!(rational_string(&parse_rational("-3/9").unwrap()), "-1/3");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("0.5").is_none());
    }

    #[test]
    fn json_rational_rejects_floats() {
        assert!(json_rational(&serde_json::json!(0.5)).is_none());
        assert_eq!(json_rational(&serde_json::json!(3)), Some(rat(3, 1)));
        assert_eq!(json_rational(&serde_json::json!("3/6")), Some(rat(1, 2)));
    }

    #[test]
    fn int_weights_accumulate_past_64_bits() {
        let mut w = Weight::Int(i64::MAX as i128);
        w.add_assign(&Weight::Int(i64::MAX as i128));
        assert_eq!(w, Weight::Int(2 * i64::MAX as i128));
        assert!(matches!(w.to_json(), serde_json::Value::String(_)));
    }

    #[test]
    fn bool_monoid_is_or() {
        let mut w = Monoid::BoolOr.zero();
        assert!(w.is_zero());
        w.add_assign(&Weight::Bool(true));
        w.add_assign(&Weight::Bool(true));
        assert_eq!(w, Weight::Bool(true));
    }
}
