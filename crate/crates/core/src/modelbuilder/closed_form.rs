//! Intensional descriptions of submodel universes with decidable
//! membership.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::definable::{Component, Cut, DefinableSet, Dyadic, LevelPicker, Picker};
use crate::catalog::point::{Point, Sort};
use crate::catalog::{StructureHandle, StructureId};
use crate::closure::ClosureSet;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar", tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm<Q> {
    /// Everything outside a definable set.
    Complement { text: String, removed: DefinableSet<Q> },
    /// The elements all of whose coordinates have `prime`-adic denominator
    /// valuation exactly `level` (for EX1, a P1 element also qualifies when
    /// its base lies in `keep`), together with `keep`.
    Slice { text: String, prime: u64, level: u32, keep: ClosureSet<Q> },
}

impl<Q: Scalar> ClosedForm<Q> {
    pub fn text(&self) -> &str {
        match self {
            ClosedForm::Complement { text, .. } | ClosedForm::Slice { text, .. } => text,
        }
    }

    pub fn contains(&self, p: &Point<Q>) -> bool {
        match self {
            ClosedForm::Complement { removed, .. } => !removed.contains(p),
            ClosedForm::Slice { prime, level, keep, .. } => {
                if keep.contains(p) {
                    return true;
                }
                let at = |q: &Q| q.denominator_valuation(*prime) == *level;
                match p {
                    Point::Rat(q) | Point::Tier(_, q) | Point::Single(q) => at(q),
                    Point::Pair(n, m) => at(m) && (at(n) || keep.contains(&Point::Single(n.clone()))),
                }
            }
        }
    }

    /// Picker producing elements of this form inside open cells.
    pub fn picker(&self, n: usize) -> Box<dyn Picker<Q>> {
        match self {
            ClosedForm::Complement { .. } => Box::new(Dyadic(n)),
            ClosedForm::Slice { prime, level, .. } => Box::new(LevelPicker { prime: *prime, level: *level, variant: n }),
        }
    }

    /// Elements where membership changes.
    pub fn landmarks(&self) -> Vec<Point<Q>> {
        match self {
            ClosedForm::Complement { removed, .. } => removed.anchors(),
            ClosedForm::Slice { keep, .. } => keep.listed().cloned().collect(),
        }
    }
}

fn literal_list<Q: Scalar>(pts: &[Point<Q>]) -> String {
    pts.iter().map(Point::payload).collect::<Vec<_>>().join(", ")
}

/// `M` minus the excluded elements; in EX1 an excluded P2 element takes its
/// whole fiber with it so the rest stays closed under `f`.
pub fn complement_of<Q: Scalar>(s: &StructureHandle, excluded: &[Point<Q>], z_intensional: bool) -> ClosedForm<Q> {
    let mut comps: Vec<Component<Q>> = Vec::new();
    let excluded: BTreeSet<Point<Q>> = excluded.iter().cloned().collect();
    for p in &excluded {
        if let Point::Single(n) = p {
            comps.push(Component { lower: Cut::BeforeFiber(n.clone()), upper: Cut::AfterFiber(n.clone()), sort: Some(Sort::P1) });
        }
        if matches!(p, Point::Pair(n, _) if excluded.contains(&Point::Single(n.clone()))) {
            continue;
        }
        comps.push(Component::singleton(p.clone()));
    }
    comps.sort_by_key(order_key);
    let pts: Vec<Point<Q>> = excluded.iter().cloned().collect();
    let fibers: Vec<String> = pts
        .iter()
        .filter_map(|p| match p {
            Point::Single(n) => Some(format!("f^-1({n})")),
            _ => None,
        })
        .collect();
    let mut text = format!("M \\ {{{}}}", literal_list(&pts));
    if !fibers.is_empty() {
        text = format!("M \\ ({{{}}} u {})", literal_list(&pts), fibers.join(" u "));
    }
    if s.id == StructureId::Ehr && z_intensional {
        text = format!("[{text}] u Z");
    }
    ClosedForm::Complement { text, removed: DefinableSet { components: comps } }
}

/// An element inside the component; disjoint convex components sort by it.
fn order_key<Q: Scalar>(c: &Component<Q>) -> Point<Q> {
    match (&c.lower, c.as_singleton()) {
        (_, Some(p)) => p.clone(),
        (Cut::BeforeFiber(n), None) => Point::Pair(n.clone(), Q::zero()),
        _ => unreachable!("complement components are singletons or fibers"),
    }
}

/// Smallest odd prime dividing no denominator among `pts`.
pub fn fresh_prime<Q: Scalar>(pts: &[Point<Q>]) -> u64 {
    let mut p = 3u64;
    loop {
        let is_prime = (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if is_prime && pts.iter().all(|x| x.coordinates().iter().all(|q| q.denominator_valuation(p) == 0)) {
            return p;
        }
        p += 2;
    }
}

pub fn slice<Q: Scalar>(prime: u64, level: u32, keep: ClosureSet<Q>, keep_text: &str) -> ClosedForm<Q> {
    let text = format!("{{x : v_{prime}(denominators of x) = {level}}} u {keep_text}");
    ClosedForm::Slice { text, prime, level, keep }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    #[test]
    fn complement_keeps_fibers_consistent() {
        let s = StructureHandle::ex1();
        let f = complement_of(&s, &[Point::Single(q(2, 1)), Point::Pair(q(5, 1), q(1, 1))], false);
        assert!(!f.contains(&Point::Single(q(2, 1))));
        assert!(!f.contains(&Point::Pair(q(2, 1), q(9, 1))));
        assert!(!f.contains(&Point::Pair(q(5, 1), q(1, 1))));
        assert!(f.contains(&Point::Pair(q(5, 1), q(2, 1))));
        assert!(f.contains(&Point::Single(q(5, 1))));
        assert_eq!(f.text(), "M \\ ({(5,1), 2:P2} u f^-1(2))");
    }

    #[test]
    fn slices() {
        let s = StructureHandle::ex1();
        let keep = s.acl(&[Point::Pair(q(2, 1), q(3, 1))]);
        let f = slice(5, 1, keep, "acl(A)");
        assert!(f.contains(&Point::Pair(q(2, 1), q(3, 1))));
        assert!(f.contains(&Point::Single(q(2, 1))));
        assert!(f.contains(&Point::Pair(q(2, 1), q(1, 5))));
        assert!(!f.contains(&Point::Pair(q(2, 1), q(1, 25))));
        assert!(f.contains(&Point::Pair(q(1, 5), q(2, 5))));
        assert!(!f.contains(&Point::Pair(q(1, 25), q(2, 5))));
        assert_eq!(fresh_prime(&[Point::Rat(q(1, 3)), Point::Rat(q(2, 35))]), 11);
    }
}
