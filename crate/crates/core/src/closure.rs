//! Definable and algebraic closure of finite sets.
//!
//! In all three structures the closure of `A` is obtained from `A` by
//! adding the constants (EHR, kept intensional since there are infinitely
//! many) and the `f`-images of P1 elements (EX1). Nothing else is ever
//! added: every finite definable set over `A` has its elements at cell
//! boundaries over `A`, and those boundaries are exactly these points.
//! Because the order is linear, `dcl` and `acl` coincide.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::point::Point;
use crate::catalog::{StructureHandle, StructureId};
use crate::error::Result;
use crate::logic::{parse_formula, Formula};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureKind {
    Dcl,
    Acl,
}

/// One closure element with the formula over the base that pins it down;
/// the formula's solution set has at most `bound` elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct ClosureElement<Q> {
    pub point: Point<Q>,
    pub formula: String,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct ClosureSet<Q> {
    pub structure: StructureId,
    pub kind: ClosureKind,
    pub base: Vec<Point<Q>>,
    pub elements: Vec<ClosureElement<Q>>,
    /// All constants `c_i` belong to the set without being listed.
    pub intensional_constants: bool,
}

impl<Q: Scalar> ClosureSet<Q> {
    /// The empty set, as a relativizer.
    pub fn empty(structure: StructureId) -> Self {
        ClosureSet { structure, kind: ClosureKind::Acl, base: vec![], elements: vec![], intensional_constants: false }
    }

    /// A plain finite set, each element defined by itself.
    pub fn listing(structure: StructureId, points: &[Point<Q>]) -> Self {
        let pts: BTreeSet<Point<Q>> = points.iter().cloned().collect();
        ClosureSet {
            structure,
            kind: ClosureKind::Acl,
            base: pts.iter().cloned().collect(),
            elements: pts.into_iter().map(|p| ClosureElement { formula: format!("x = {p}"), point: p, bound: 1 }).collect(),
            intensional_constants: false,
        }
    }

    pub fn contains(&self, p: &Point<Q>) -> bool {
        (self.intensional_constants && p.constant_index().is_some()) || self.element(p).is_some()
    }

    /// Elements are kept sorted by point.
    pub fn element(&self, p: &Point<Q>) -> Option<&ClosureElement<Q>> {
        self.elements.binary_search_by(|e| e.point.cmp(p)).ok().map(|i| &self.elements[i])
    }

    /// Adds the elements of `other`, returning the newly listed points.
    pub fn absorb(&mut self, other: &ClosureSet<Q>) -> Vec<Point<Q>> {
        let mut added = Vec::new();
        for e in &other.elements {
            if let Err(i) = self.elements.binary_search_by(|x| x.point.cmp(&e.point)) {
                self.elements.insert(i, e.clone());
                added.push(e.point.clone());
            }
        }
        for b in &other.base {
            if !self.base.contains(b) {
                self.base.push(b.clone());
            }
        }
        self.intensional_constants |= other.intensional_constants;
        added
    }

    pub fn listed(&self) -> impl Iterator<Item = &Point<Q>> {
        self.elements.iter().map(|e| &e.point)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && !self.intensional_constants
    }

    /// Defining formula of a member, including constants outside the list.
    pub fn provenance(&self, p: &Point<Q>) -> Option<(String, usize)> {
        if let Some(e) = self.element(p) {
            return Some((e.formula.clone(), e.bound));
        }
        match p.constant_index() {
            Some(i) if self.intensional_constants => Some((format!("x = c{i}"), 1)),
            _ => None,
        }
    }

    pub fn parsed_formula(&self, e: &ClosureElement<Q>, s: &StructureHandle) -> Result<Formula<Q>> {
        Ok(parse_formula(&e.formula, &s.signature)?)
    }
}

/// `(C1 ∩ C2) \ Z` with the intensional part summarized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct Overlap<Q> {
    pub listed: Vec<Point<Q>>,
    /// Every constant is in the overlap (both sides intensional, `Z` not).
    pub all_constants: bool,
}

impl<Q: Scalar> Overlap<Q> {
    pub fn is_empty(&self) -> bool {
        self.listed.is_empty() && !self.all_constants
    }

    /// Listed elements plus `c0` standing in for the constant family.
    pub fn witnesses(&self) -> Vec<Point<Q>> {
        let mut out = self.listed.clone();
        if self.all_constants {
            let c0 = Point::constant(0);
            if !out.contains(&c0) {
                out.insert(0, c0);
            }
        }
        out
    }
}

/// `(a ∩ b) \ z`.
pub fn overlap<Q: Scalar>(a: &ClosureSet<Q>, b: &ClosureSet<Q>, z: &ClosureSet<Q>) -> Overlap<Q> {
    let mut listed: BTreeSet<Point<Q>> = BTreeSet::new();
    let (small, large) = if a.elements.len() <= b.elements.len() { (a, b) } else { (b, a) };
    for p in small.listed() {
        if large.contains(p) && !z.contains(p) {
            listed.insert(p.clone());
        }
    }
    // Constants listed on one side and intensional on the other.
    for (x, y) in [(a, b), (b, a)] {
        if y.intensional_constants {
            listed.extend(x.listed().filter(|p| p.constant_index().is_some() && !z.contains(p)).cloned());
        }
    }
    Overlap {
        listed: listed.into_iter().collect(),
        all_constants: a.intensional_constants && b.intensional_constants && !z.intensional_constants,
    }
}

/// Relativizing set for separability queries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar", rename_all = "snake_case", tag = "kind", content = "of")]
pub enum ZSpec<Q> {
    Empty,
    /// `acl` of a finite set; `AclOf(vec![])` is `acl(∅)`.
    AclOf(Vec<Point<Q>>),
    DclEmpty,
}

impl<Q: Scalar> ZSpec<Q> {
    pub fn resolve(&self, s: &StructureHandle) -> ClosureSet<Q> {
        match self {
            ZSpec::Empty => ClosureSet::empty(s.id),
            ZSpec::AclOf(pts) => s.acl(pts),
            ZSpec::DclEmpty => s.dcl(&[]),
        }
    }

    /// Finite base whose closure is `Z`.
    pub fn base(&self) -> Vec<Point<Q>> {
        match self {
            ZSpec::AclOf(pts) => pts.clone(),
            ZSpec::Empty | ZSpec::DclEmpty => vec![],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ZSpec::Empty => "empty".into(),
            ZSpec::DclEmpty => "dcl(empty)".into(),
            ZSpec::AclOf(pts) if pts.is_empty() => "acl(empty)".into(),
            ZSpec::AclOf(pts) => {
                let list: Vec<String> = pts.iter().map(Point::literal).collect();
                format!("acl({})", list.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar", rename_all = "snake_case", tag = "outcome")]
pub enum Exchange<Q> {
    Holds { reason: String },
    /// `b ∈ acl(a) \ acl(∅)` but `a ∉ acl(b)`.
    Fails { a: Point<Q>, b: Point<Q>, b_from_a: String },
}

impl<Q: Scalar> Exchange<Q> {
    pub fn holds(&self) -> bool {
        matches!(self, Exchange::Holds { .. })
    }
}

impl StructureHandle {
    fn closure<Q: Scalar>(&self, kind: ClosureKind, base: &[Point<Q>]) -> ClosureSet<Q> {
        let base: Vec<Point<Q>> = base.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut elements: Vec<ClosureElement<Q>> = base
            .iter()
            .map(|a| ClosureElement { point: a.clone(), formula: format!("x = {a}"), bound: 1 })
            .collect();
        if self.id == StructureId::Ex1 {
            for a in &base {
                if let Point::Pair(n, _) = a {
                    let fa = Point::Single(n.clone());
                    if !elements.iter().any(|e| e.point == fa) {
                        elements.push(ClosureElement { point: fa, formula: format!("x = f({a})"), bound: 1 });
                    }
                }
            }
        }
        elements.sort_by(|x, y| x.point.cmp(&y.point));
        ClosureSet { structure: self.id, kind, base, elements, intensional_constants: self.has_constants() }
    }

    pub fn dcl<Q: Scalar>(&self, base: &[Point<Q>]) -> ClosureSet<Q> {
        self.closure(ClosureKind::Dcl, base)
    }

    pub fn acl<Q: Scalar>(&self, base: &[Point<Q>]) -> ClosureSet<Q> {
        self.closure(ClosureKind::Acl, base)
    }

    /// `acl(A ∪ Z)`.
    pub fn acl_with<Q: Scalar>(&self, a: &[Point<Q>], z: &ZSpec<Q>) -> ClosureSet<Q> {
        let mut base = a.to_vec();
        base.extend(z.base());
        self.acl(&base)
    }

    /// Tests `b ∈ acl(a) ∧ b ∉ acl(∅) ⇒ a ∈ acl(b)`.
    pub fn exchange_check<Q: Scalar>(&self, a: &Point<Q>, b: &Point<Q>) -> Exchange<Q> {
        let acl_a = self.acl(std::slice::from_ref(a));
        let acl_empty = self.acl::<Q>(&[]);
        if !acl_a.contains(b) {
            return Exchange::Holds { reason: format!("{b} is not in acl({a})") };
        }
        if acl_empty.contains(b) {
            return Exchange::Holds { reason: format!("{b} is in acl(empty)") };
        }
        if self.acl(std::slice::from_ref(b)).contains(a) {
            return Exchange::Holds { reason: format!("{a} is in acl({b})") };
        }
        let (formula, _) = acl_a.provenance(b).expect("member has provenance");
        Exchange::Fails { a: a.clone(), b: b.clone(), b_from_a: formula }
    }
}

/// `in_closure` as a free function.
pub fn in_closure<Q: Scalar>(c: &ClosureSet<Q>, p: &Point<Q>) -> bool {
    c.contains(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Binding;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    #[test]
    fn examples() {
        let dlo = StructureHandle::dlo();
        let c = dlo.dcl(&[Point::Rat(q(0, 1))]);
        assert_eq!(c.listed().cloned().collect::<Vec<_>>(), vec![Point::Rat(q(0, 1))]);
        assert!(!in_closure(&dlo.acl(&[Point::Rat(q(0, 1))]), &Point::Rat(q(1, 1))));
        assert!(dlo.acl::<R>(&[]).is_empty());

        let ex1 = StructureHandle::ex1();
        let a = Point::Pair(q(2, 1), q(3, 1));
        let c = ex1.dcl(std::slice::from_ref(&a));
        assert_eq!(c.listed().cloned().collect::<Vec<_>>(), vec![a.clone(), Point::Single(q(2, 1))]);
        assert_eq!(c.provenance(&Point::Single(q(2, 1))).unwrap().0, "x = f(@{(2,3)})");
        let c = ex1.acl(&[Point::Single(q(2, 1))]);
        assert_eq!(c.elements.len(), 1);

        let ehr = StructureHandle::ehr();
        let c = ehr.dcl(&[Point::low(q(1, 2))]);
        assert!(c.intensional_constants);
        assert!(c.contains(&Point::constant(100)));
        assert!(!c.contains(&Point::low(q(3, 4))));
        assert!(in_closure(&ehr.acl::<R>(&[]), &Point::constant(100)));
    }

    #[test]
    fn defining_formulas_pin_their_points() {
        let ex1 = StructureHandle::ex1();
        let c = ex1.acl(&[Point::Pair(q(2, 1), q(3, 1)), Point::Single(q(5, 1))]);
        for e in &c.elements {
            let phi = c.parsed_formula(e, &ex1).unwrap();
            let set = ex1.definable_set(&phi, &Binding::new()).unwrap();
            assert!(set.is_finite() && set.components.len() <= e.bound);
            assert!(set.contains(&e.point));
        }
    }

    #[test]
    fn exchange() {
        let ex1 = StructureHandle::ex1();
        let e = ex1.exchange_check(&Point::Pair(q(2, 1), q(3, 1)), &Point::Single(q(2, 1)));
        assert!(!e.holds());
        let dlo = StructureHandle::dlo();
        assert!(dlo.exchange_check(&Point::Rat(q(0, 1)), &Point::Rat(q(1, 1))).holds());
        let ehr = StructureHandle::ehr();
        assert!(ehr.exchange_check(&Point::low(q(1, 2)), &Point::low(q(3, 4))).holds());
    }

    #[test]
    fn overlaps() {
        let ehr = StructureHandle::ehr();
        let a = ehr.acl(&[Point::low(q(1, 2))]);
        let b = ehr.acl(&[Point::low(q(3, 4))]);
        let none = ClosureSet::empty(StructureId::Ehr);
        let o = overlap(&a, &b, &none);
        assert!(o.all_constants && o.listed.is_empty());
        assert_eq!(o.witnesses(), vec![Point::constant(0)]);
        let z = ZSpec::AclOf(vec![]).resolve(&ehr);
        assert!(overlap(&a, &b, &z).is_empty());
    }
}
