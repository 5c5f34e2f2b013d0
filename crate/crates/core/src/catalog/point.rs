use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// Unary sort predicates of the EX1 signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort {
    P1,
    P2,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::P1 => "P1",
            Sort::P2 => "P2",
        }
    }
}

/// The two blocks of the EHR universe. Every constant lives in `Low`; the
/// whole `High` block sits above all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Low,
    High,
}

impl Tier {
    pub fn index(self) -> u8 {
        match self {
            Tier::Low => 0,
            Tier::High => 1,
        }
    }

    pub fn from_index(t: u8) -> Option<Self> {
        match t {
            0 => Some(Tier::Low),
            1 => Some(Tier::High),
            _ => None,
        }
    }
}

/// An element of one catalog universe.
///
/// The derived order is the structure order within each universe:
/// `Tier` compares by `(tier, q)` and `Pair` lexicographically, and every
/// `Pair` is below every `Single`. Comparing points of different
/// universes is meaningless.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point<Q> {
    /// DLO: a rational.
    Rat(Q),
    /// EHR: `(tier, q)`.
    Tier(Tier, Q),
    /// EX1, sort P1: `(n, m)` with `f((n, m)) = n`.
    Pair(Q, Q),
    /// EX1, sort P2.
    Single(Q),
}

impl<Q: Scalar> Point<Q> {
    pub fn rat(q: Q) -> Self {
        Point::Rat(q)
    }

    pub fn low(q: Q) -> Self {
        Point::Tier(Tier::Low, q)
    }

    pub fn high(q: Q) -> Self {
        Point::Tier(Tier::High, q)
    }

    /// The EHR constant `c_i`.
    pub fn constant(i: u64) -> Self {
        Point::Tier(Tier::Low, Q::from_i64(i as i64))
    }

    /// Index `i` when this point interprets the EHR constant `c_i`.
    pub fn constant_index(&self) -> Option<u64> {
        match self {
            Point::Tier(Tier::Low, q) => q.to_i64().filter(|i| *i >= 0).map(|i| i as u64),
            _ => None,
        }
    }

    pub fn sort(&self) -> Option<Sort> {
        match self {
            Point::Pair(..) => Some(Sort::P1),
            Point::Single(_) => Some(Sort::P2),
            _ => None,
        }
    }

    /// The EX1 function: projection on P1, identity on P2.
    pub fn fiber_base(&self) -> Option<&Q> {
        match self {
            Point::Pair(n, _) => Some(n),
            _ => None,
        }
    }

    /// Every rational coordinate, in order.
    pub fn coordinates(&self) -> Vec<&Q> {
        match self {
            Point::Rat(q) | Point::Tier(_, q) | Point::Single(q) => vec![q],
            Point::Pair(n, m) => vec![n, m],
        }
    }

    /// Concrete literal syntax, `@{...}`.
    pub fn literal(&self) -> String {
        format!("@{{{}}}", self.payload())
    }

    pub fn payload(&self) -> String {
        match self {
            Point::Rat(q) => q.to_string(),
            Point::Tier(t, q) => format!("{};{}", q, t.index()),
            Point::Pair(n, m) => format!("({},{})", n, m),
            Point::Single(q) => format!("{}:P2", q),
        }
    }

    /// Parses a payload (the text between `@{` and `}`).
    pub fn parse_payload(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix('(') {
            let inner = inner.strip_suffix(')')?;
            let (n, m) = inner.split_once(',')?;
            return Some(Point::Pair(Q::parse_exact(n)?, Q::parse_exact(m)?));
        }
        if let Some(q) = text.strip_suffix(":P2") {
            return Some(Point::Single(Q::parse_exact(q)?));
        }
        if let Some((q, t)) = text.split_once(';') {
            let t: u8 = t.trim().parse().ok()?;
            return Some(Point::Tier(Tier::from_index(t)?, Q::parse_exact(q)?));
        }
        Some(Point::Rat(Q::parse_exact(text)?))
    }

    /// Parses a full literal `@{...}`.
    pub fn parse_literal(text: &str) -> Option<Self> {
        let inner = text.trim().strip_prefix("@{")?.strip_suffix('}')?;
        Self::parse_payload(inner)
    }

    /// Parses a whitespace-separated sequence of literals. An empty string is
    /// the empty list.
    pub fn parse_list(text: &str) -> Option<Vec<Self>> {
        let mut out = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let end = rest.find('}')?;
            out.push(Self::parse_literal(&rest[..=end])?);
            rest = rest[end + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        }
        Some(out)
    }
}

impl<Q: Scalar> fmt::Display for Point<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{{{}}}", self.payload())
    }
}

impl<Q: Scalar> Serialize for Point<Q> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.literal())
    }
}

impl<'de, Q: Scalar> Deserialize<'de> for Point<Q> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Point::parse_literal(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("malformed point literal {text:?}")))
    }
}
