//! Exact ordered-field scalars used for every coordinate of every point.
//!
//! The catalog structures live over the rationals, and all of the
//! quantifier elimination is endpoint comparison plus midpoint picking, so
//! the only requirement on a scalar is an exact, totally ordered field with
//! a floor function and access to the reduced denominator. Any
//! `num_rational::Ratio<T>` over a signed integer type qualifies.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact, totally ordered field element.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    /// `n / d`, `d != 0`.
    fn from_fraction(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn floor(&self) -> Self;

    /// Exponent of `prime` in the reduced denominator.
    fn denominator_valuation(&self, prime: u64) -> u32;

    /// Whether this is an integer.
    fn is_integral(&self) -> bool {
        self.floor() == *self
    }

    fn to_i64(&self) -> Option<i64>;

    fn midpoint(&self, other: &Self) -> Self {
        (self.clone() + other.clone()) / Self::from_i64(2)
    }

    fn parse_exact(text: &str) -> Option<Self> {
        Self::from_str(text.trim()).ok()
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + Hash
        + Debug
        + Display
        + FromStr
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static,
{
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(T::from_i64(n).expect("integer fits the scalar type"))
    }

    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn denominator_valuation(&self, prime: u64) -> u32 {
        let p = T::from_u64(prime).expect("prime fits the scalar type");
        let mut d = self.denom().clone();
        let mut k = 0;
        while !d.is_zero() && (d.clone() % p.clone()).is_zero() {
            d = d / p.clone();
            k += 1;
        }
        k
    }

    fn is_integral(&self) -> bool {
        self.denom().is_one()
    }

    fn to_i64(&self) -> Option<i64> {
        if self.is_integral() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn parse_exact(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n = T::from_str(n.trim()).ok()?;
                let d = T::from_str(d.trim()).ok()?;
                if d.is_zero() {
                    None
                } else {
                    Some(Ratio::new(n, d))
                }
            }
            None => T::from_str(text).ok().map(Ratio::from_integer),
        }
    }
}

/// Serde adapter writing a scalar as its exact text, `a/b` or `a`.
pub mod text {
    use super::Scalar;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<Q: Scalar, S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, Q: Scalar, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        Q::parse_exact(&text).ok_or_else(|| D::Error::custom(format!("not an exact rational: {text}")))
    }
}

/// A rational strictly between `lo` and `hi` (either may be unbounded) whose
/// reduced denominator carries `prime` to exactly the power `level`.
///
/// `prime` must be odd so the dyadic refinement never disturbs the valuation.
pub fn rational_with_level<Q: Scalar>(lo: Option<&Q>, hi: Option<&Q>, prime: u64, level: u32) -> Q {
    debug_assert!(prime > 2);
    let p = Q::from_i64(prime as i64);
    let mut unit = Q::one();
    for _ in 0..level {
        unit = unit / p.clone();
    }
    let (lo, hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l.clone(), h.clone()),
        (Some(l), None) => (l.clone(), l.clone() + Q::from_i64(4)),
        (None, Some(h)) => (h.clone() - Q::from_i64(4), h.clone()),
        (None, None) => (Q::from_i64(-2), Q::from_i64(2)),
    };
    assert!(lo < hi, "empty interval");
    // Shrink the grid until three consecutive grid points fit strictly inside.
    let width = hi.clone() - lo.clone();
    let three = Q::from_i64(3);
    while unit.clone() * three.clone() >= width {
        unit = unit / Q::from_i64(2);
    }
    let mut j = (lo.clone() / unit.clone()).floor() + Q::one();
    loop {
        let candidate = j.clone() * unit.clone();
        debug_assert!(candidate > lo && candidate < hi);
        if candidate.denominator_valuation(prime) == level {
            return candidate;
        }
        j = j + Q::one();
    }
}
