//! Separability in the hypergraph of elementary submodels, decided by
//! closure criteria.
//!
//! * T0, `A` from `B` modulo `Z`: `(acl(A ∪ Z) ∩ B) \ Z = ∅`.
//! * T2, `A` and `B` modulo `Z`: `(acl(A ∪ Z) ∩ acl(B ∪ Z)) \ Z = ∅`.
//!
//! The same answer holds for submodels of every size and for submodels
//! prime over finite sets; the hypergraph class is echoed, not branched on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::point::Point;
use crate::catalog::types::Presentation;
use crate::catalog::{StructureHandle, StructureId};
use crate::closure::{overlap, ClosureSet, Overlap, ZSpec};
use crate::error::{Error, Result};
use crate::logic::Binding;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    T0,
    T2,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "t0" => Ok(Mode::T0),
            "t2" => Ok(Mode::T2),
            other => Err(format!("unknown mode `{other}` (expected t0 or t2)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::T0 => "t0",
            Mode::T2 => "t2",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HypergraphClass {
    /// All elementary submodels.
    #[default]
    #[serde(rename = "H")]
    All,
    /// Countable elementary submodels.
    #[serde(rename = "H_omega1")]
    Countable,
    /// Elementary submodels prime over finite sets.
    #[serde(rename = "H_p")]
    Prime,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct SeparabilityQuery<Q> {
    pub structure: StructureId,
    pub mode: Mode,
    pub a: Vec<Point<Q>>,
    pub b: Vec<Point<Q>>,
    pub z: ZSpec<Q>,
    #[serde(default)]
    pub class: HypergraphClass,
}

impl<Q: Scalar> SeparabilityQuery<Q> {
    pub fn new(structure: StructureId, mode: Mode, a: Vec<Point<Q>>, b: Vec<Point<Q>>, z: ZSpec<Q>) -> Self {
        SeparabilityQuery { structure, mode, a, b, z, class: HypergraphClass::All }
    }

    pub fn handle(&self) -> StructureHandle {
        StructureHandle::new(self.structure)
    }

    /// The same query with the sides swapped.
    pub fn reversed(&self) -> Self {
        SeparabilityQuery { a: self.b.clone(), b: self.a.clone(), ..self.clone() }
    }
}

/// A closure element responsible for a negative answer, with how each side
/// defines it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Offender<Q> {
    pub point: Point<Q>,
    pub from_a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_b: Option<String>,
}

/// Escape witnesses for one isolated type: realizations outside `acl(A)`
/// and outside `acl(B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct TypeCoverage<Q> {
    pub name: String,
    pub formula: String,
    pub outside_acl_a: Option<Point<Q>>,
    pub outside_acl_b: Option<Point<Q>>,
}

impl<Q: Scalar> TypeCoverage<Q> {
    pub fn escapes(&self) -> bool {
        self.outside_acl_a.is_some() && self.outside_acl_b.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Certificate<Q> {
    /// `acl(A ∪ Z)`.
    pub closure_a: ClosureSet<Q>,
    /// `acl(B ∪ Z)`, for the two-sided criteria.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_b: Option<ClosureSet<Q>>,
    pub z: ClosureSet<Q>,
    pub offending: Vec<Offender<Q>>,
    /// Every constant lies in both closures and outside `Z`.
    #[serde(default)]
    pub all_constants_shared: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_coverage: Vec<TypeCoverage<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Verdict<Q> {
    pub answer: bool,
    pub structure: StructureId,
    pub mode: Mode,
    pub hypergraph_class: HypergraphClass,
    pub z: String,
    pub criterion: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub conditions: BTreeMap<String, bool>,
    pub certificate: Certificate<Q>,
    pub notes: Vec<String>,
}

impl<Q: Scalar> Verdict<Q> {
    /// Re-derives the answer from the certificate alone: every offender is
    /// in the closures it is claimed to be in and outside `Z`.
    pub fn recheck(&self) -> bool {
        let c = &self.certificate;
        let offenders_ok = c.offending.iter().all(|o| {
            c.closure_a.contains(&o.point)
                && c.closure_b.as_ref().is_none_or(|b| b.contains(&o.point))
                && !c.z.contains(&o.point)
        });
        let clean = c.offending.is_empty() && !c.all_constants_shared;
        let types_ok = c.type_coverage.iter().all(TypeCoverage::escapes);
        offenders_ok && (self.answer == (clean && types_ok))
    }
}

const T0_CRITERION: &str = "(acl(A u Z) n B) \\ Z = empty";
const T2_CRITERION: &str = "(acl(A u Z) n acl(B u Z)) \\ Z = empty";

pub const EX1_FIBER_NOTE: &str = "EX1 fiber example: for b = f(a), b is in dcl(a) while the fiber f^-1(b) is infinite; \
     so a cannot be separated from b, b can be separated from a, and a, b are not T2-separable";
pub const EX1_TRANSPOSITION_NOTE: &str = "suspected transposition: the original statement of the EX1 fiber example \
     says a is separable from b but b is not separable from a; the closure criterion gives the reverse orientation \
     and is followed here";

fn check_points<Q: Scalar>(s: &StructureHandle, pts: &[Point<Q>]) -> Result<()> {
    for p in pts {
        if !s.admits(p) {
            return Err(Error::ForeignPoint { point: p.to_string(), structure: s.id.to_string() });
        }
    }
    Ok(())
}

fn list(pts: &[&Point<impl Scalar>]) -> String {
    pts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

/// Query invariants shared by every criterion.
fn preconditions<Q: Scalar>(s: &StructureHandle, q: &SeparabilityQuery<Q>, z: &ClosureSet<Q>) -> Result<()> {
    if q.a.is_empty() || q.b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    check_points(s, &q.a)?;
    check_points(s, &q.b)?;
    check_points(s, &q.z.base())?;
    let shared: Vec<&Point<Q>> = q.a.iter().filter(|p| q.b.contains(p) && !z.contains(p)).collect();
    if !shared.is_empty() {
        return Err(Error::Precondition(format!("A and B share {} outside Z", list(&shared))));
    }
    if q.b.iter().all(|p| z.contains(p)) {
        return Err(Error::Precondition("B is contained in Z".into()));
    }
    if q.mode == Mode::T2 && q.a.iter().all(|p| z.contains(p)) {
        return Err(Error::Precondition("A is contained in Z".into()));
    }
    Ok(())
}

fn notes<Q: Scalar>(s: &StructureHandle, a: &[Point<Q>], b: &[Point<Q>]) -> Vec<String> {
    let mut notes = vec![format!("saturation: {}", s.saturation_note)];
    if s.id == StructureId::Ex1 {
        let linked = |x: &[Point<Q>], y: &[Point<Q>]| {
            x.iter().any(|p| matches!(p, Point::Pair(n, _) if y.contains(&Point::Single(n.clone()))))
        };
        if linked(a, b) || linked(b, a) {
            notes.push(EX1_FIBER_NOTE.to_string());
            notes.push(EX1_TRANSPOSITION_NOTE.to_string());
        }
    }
    notes
}

fn offenders_from_overlap<Q: Scalar>(o: &Overlap<Q>, a: &ClosureSet<Q>, b: &ClosureSet<Q>) -> Vec<Offender<Q>> {
    o.witnesses()
        .into_iter()
        .map(|p| Offender {
            from_a: a.provenance(&p).map(|x| x.0).unwrap_or_default(),
            from_b: b.provenance(&p).map(|x| x.0),
            point: p,
        })
        .collect()
}

pub fn criterion_t0<Q: Scalar>(q: &SeparabilityQuery<Q>) -> Result<Verdict<Q>> {
    let s = q.handle();
    let z = q.z.resolve(&s);
    preconditions(&s, &SeparabilityQuery { mode: Mode::T0, ..q.clone() }, &z)?;
    let closure_a = s.acl_with(&q.a, &q.z);
    let offending: Vec<Offender<Q>> = q
        .b
        .iter()
        .filter(|p| closure_a.contains(p) && !z.contains(p))
        .map(|p| Offender { point: p.clone(), from_a: closure_a.provenance(p).unwrap().0, from_b: None })
        .collect();
    Ok(Verdict {
        answer: offending.is_empty(),
        structure: s.id,
        mode: Mode::T0,
        hypergraph_class: q.class,
        z: q.z.describe(),
        criterion: T0_CRITERION.into(),
        conditions: BTreeMap::new(),
        certificate: Certificate {
            closure_a,
            closure_b: None,
            z,
            offending,
            all_constants_shared: false,
            type_coverage: vec![],
        },
        notes: notes(&s, &q.a, &q.b),
    })
}

pub fn criterion_t2<Q: Scalar>(q: &SeparabilityQuery<Q>) -> Result<Verdict<Q>> {
    let s = q.handle();
    let z = q.z.resolve(&s);
    preconditions(&s, &SeparabilityQuery { mode: Mode::T2, ..q.clone() }, &z)?;
    let closure_a = s.acl_with(&q.a, &q.z);
    let closure_b = s.acl_with(&q.b, &q.z);
    let o = overlap(&closure_a, &closure_b, &z);
    let offending = offenders_from_overlap(&o, &closure_a, &closure_b);
    Ok(Verdict {
        answer: o.is_empty(),
        structure: s.id,
        mode: Mode::T2,
        hypergraph_class: q.class,
        z: q.z.describe(),
        criterion: T2_CRITERION.into(),
        conditions: BTreeMap::new(),
        certificate: Certificate {
            closure_a,
            closure_b: Some(closure_b),
            z,
            offending,
            all_constants_shared: o.all_constants,
            type_coverage: vec![],
        },
        notes: notes(&s, &q.a, &q.b),
    })
}

/// Dispatches on the query mode.
pub fn criterion<Q: Scalar>(q: &SeparabilityQuery<Q>) -> Result<Verdict<Q>> {
    match q.mode {
        Mode::T0 => criterion_t0(q),
        Mode::T2 => criterion_t2(q),
    }
}

/// A realization of the formula outside `c`, if one exists.
fn escape<Q: Scalar>(s: &StructureHandle, set: &crate::catalog::definable::DefinableSet<Q>, c: &ClosureSet<Q>) -> Option<Point<Q>> {
    for comp in &set.components {
        if let Some(p) = comp.as_singleton() {
            if !c.contains(p) {
                return Some(p.clone());
            }
            continue;
        }
        // Infinite component: finitely many listed points and constants
        // cannot exhaust it, and the dyadic samples find a free one.
        for cell in s.component_cells(comp) {
            for n in 0..16 {
                for p in cell.shape.sample(&crate::catalog::definable::Dyadic(n)) {
                    if comp.contains(&p) && !c.contains(&p) {
                        return Some(p);
                    }
                }
            }
        }
    }
    None
}

/// Mutual separability of `A` and `B` in a saturated model: disjoint
/// closures, and every isolated 1-type over the empty set escapes both
/// closures.
pub fn saturated_pair_separability<Q: Scalar>(
    s: &StructureHandle,
    a: &[Point<Q>],
    b: &[Point<Q>],
) -> Result<Verdict<Q>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("A and B must be nonempty".into()));
    }
    check_points(s, a)?;
    check_points(s, b)?;
    let closure_a = s.acl(a);
    let closure_b = s.acl(b);
    let z = ClosureSet::empty(s.id);
    let o = overlap(&closure_a, &closure_b, &z);
    let cond1 = o.is_empty();

    // Enough of the EHR family to reach past every block A and B touch.
    let reach = a
        .iter()
        .chain(b)
        .filter_map(|p| match p {
            Point::Tier(crate::Tier::Low, q) => q.floor().to_i64(),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(0) as usize
        + 2;
    let family = s.list_isolated_1types::<Q>(reach);
    let mut coverage = Vec::new();
    for t in &family.types {
        let Presentation::Formula(phi) = &t.presentation else { continue };
        let set = s.definable_set(phi, &Binding::new())?;
        coverage.push(TypeCoverage {
            name: t.name.clone(),
            formula: phi.to_string(),
            outside_acl_a: escape(s, &set, &closure_a),
            outside_acl_b: escape(s, &set, &closure_b),
        });
    }
    let cond2 = coverage.iter().all(TypeCoverage::escapes);
    let mut notes = notes(s, a, b);
    if !family.complete {
        notes.push(format!(
            "isolated types: the family is infinite; listed up to c{reach}. Each type x = c_i has c_i as its only \
             realization and c_i lies in acl(empty), so it never escapes; each block c_i < x < c_(i+1) and x < c0 \
             is an infinite interval and always escapes the finite listed part of a closure"
        ));
    }
    let mut conditions = BTreeMap::new();
    conditions.insert("1: acl(A) n acl(B) = empty".to_string(), cond1);
    conditions.insert("2: every isolated type escapes acl(A) and acl(B)".to_string(), cond2);
    Ok(Verdict {
        answer: cond1 && cond2,
        structure: s.id,
        mode: Mode::T0,
        hypergraph_class: HypergraphClass::All,
        z: ZSpec::<Q>::Empty.describe(),
        criterion: "acl(A) n acl(B) = empty and every isolated 1-type over empty escapes acl(A) and acl(B)".into(),
        conditions,
        certificate: Certificate {
            offending: offenders_from_overlap(&o, &closure_a, &closure_b),
            closure_a,
            closure_b: Some(closure_b),
            z,
            all_constants_shared: o.all_constants,
            type_coverage: coverage,
        },
        notes,
    })
}

/// Six-condition report for a pair of elements:
/// (1) a is Z-separable from b, (2) b is Z-separable from a, (3) a and b
/// are T2 Z-separable, (4) a ∉ dcl(bZ), (5) b ∉ dcl(aZ),
/// (6) (dcl(aZ) ∩ dcl(bZ)) \ Z = ∅. (1)-(3) are read off (5), (4), (6).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct QoReport<Q> {
    pub structure: StructureId,
    pub a: Point<Q>,
    pub b: Point<Q>,
    pub z: String,
    pub conditions: [bool; 6],
    /// All six agree.
    pub consistent: bool,
    /// Exchange, quite o-minimality and almost omega-categoricity hold and
    /// `Z` is acl-closed, so agreement is guaranteed.
    pub hypotheses_met: bool,
    pub shared: Vec<Point<Q>>,
}

pub fn qo_equivalence_report<Q: Scalar>(
    s: &StructureHandle,
    a: &Point<Q>,
    b: &Point<Q>,
    z_spec: &ZSpec<Q>,
) -> Result<QoReport<Q>> {
    check_points(s, &[a.clone(), b.clone()])?;
    let z = z_spec.resolve(s);
    if a == b {
        return Err(Error::Precondition("a and b must be distinct".into()));
    }
    for p in [a, b] {
        if z.contains(p) {
            return Err(Error::Precondition(format!("{p} lies in Z")));
        }
    }
    let dcl_a = s.acl_with(std::slice::from_ref(a), z_spec);
    let dcl_b = s.acl_with(std::slice::from_ref(b), z_spec);
    let c4 = !dcl_b.contains(a);
    let c5 = !dcl_a.contains(b);
    let o = overlap(&dcl_a, &dcl_b, &z);
    let c6 = o.is_empty();
    let conditions = [c5, c4, c6, c4, c5, c6];
    let consistent = conditions.iter().all(|c| *c == conditions[0]);
    let f = s.flags;
    let z_closed = s.acl::<Q>(&[]).is_empty() || z.intensional_constants;
    Ok(QoReport {
        structure: s.id,
        a: a.clone(),
        b: b.clone(),
        z: z_spec.describe(),
        conditions,
        consistent,
        hypotheses_met: f.exchange_principle && f.quite_o_minimal && f.almost_omega_categorical && z_closed,
        shared: o.witnesses(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct MatrixEntry<Q> {
    pub i: usize,
    pub j: usize,
    pub shared: Vec<Point<Q>>,
    pub empty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct FiniteSetsReport<Q> {
    pub verdict: Verdict<Q>,
    pub matrix: Vec<MatrixEntry<Q>>,
    pub pairwise: bool,
    pub aggregate: bool,
    pub agree: bool,
}

/// Pairwise criterion for finite sets in the quite o-minimal,
/// almost omega-categorical entries: every `(dcl(a_i Z) ∩ dcl(b_j Z)) \ Z` is
/// empty; checked against the aggregate `(dcl(A Z) ∩ dcl(B Z)) \ Z`.
pub fn qo_finite_sets<Q: Scalar>(
    s: &StructureHandle,
    a: &[Point<Q>],
    b: &[Point<Q>],
    z_spec: &ZSpec<Q>,
) -> Result<FiniteSetsReport<Q>> {
    if !s.flags.quite_o_minimal {
        return Err(Error::HypothesesUnmet("quite_o_minimal = false".into()));
    }
    if !s.flags.almost_omega_categorical {
        return Err(Error::HypothesesUnmet("almost_omega_categorical = false".into()));
    }
    let q = SeparabilityQuery::new(s.id, Mode::T2, a.to_vec(), b.to_vec(), z_spec.clone());
    let mut verdict = criterion_t2(&q)?;
    let z = z_spec.resolve(s);
    let mut matrix = Vec::new();
    for (i, ai) in a.iter().enumerate() {
        let ca = s.acl_with(std::slice::from_ref(ai), z_spec);
        for (j, bj) in b.iter().enumerate() {
            let cb = s.acl_with(std::slice::from_ref(bj), z_spec);
            let o = overlap(&ca, &cb, &z);
            matrix.push(MatrixEntry { i, j, empty: o.is_empty(), shared: o.witnesses() });
        }
    }
    let pairwise = matrix.iter().all(|m| m.empty);
    let aggregate = verdict.answer;
    verdict.answer = pairwise;
    verdict.criterion = "(dcl(a_i Z) n dcl(b_j Z)) \\ Z = empty for all i, j".into();
    verdict.conditions.insert("aggregate".into(), aggregate);
    verdict.conditions.insert("pairwise".into(), pairwise);
    Ok(FiniteSetsReport { verdict, matrix, pairwise, aggregate, agree: pairwise == aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    fn query(id: StructureId, mode: Mode, a: Point<R>, b: Point<R>, z: ZSpec<R>) -> SeparabilityQuery<R> {
        SeparabilityQuery::new(id, mode, vec![a], vec![b], z)
    }

    #[test]
    fn t0_examples() {
        let v = criterion_t0(&query(StructureId::Dlo, Mode::T0, Point::Rat(q(0, 1)), Point::Rat(q(1, 1)), ZSpec::Empty)).unwrap();
        assert!(v.answer && v.recheck());
        let a = Point::Pair(q(2, 1), q(3, 1));
        let b = Point::Single(q(2, 1));
        let v = criterion_t0(&query(StructureId::Ex1, Mode::T0, a.clone(), b.clone(), ZSpec::Empty)).unwrap();
        assert!(!v.answer && v.recheck());
        assert_eq!(v.certificate.offending[0].from_a, "x = f(@{(2,3)})");
        assert!(v.notes.iter().any(|n| n.starts_with("EX1 fiber example")));
        assert!(v.notes.iter().any(|n| n.starts_with("suspected transposition")));
        let v = criterion_t0(&query(StructureId::Ex1, Mode::T0, b, a, ZSpec::Empty)).unwrap();
        assert!(v.answer);
        for z in [ZSpec::Empty, ZSpec::AclOf(vec![])] {
            let v = criterion_t0(&query(StructureId::Ehr, Mode::T0, Point::low(q(1, 2)), Point::low(q(3, 4)), z)).unwrap();
            assert!(v.answer);
        }
    }

    #[test]
    fn t2_examples() {
        let v = criterion_t2(&query(StructureId::Dlo, Mode::T2, Point::Rat(q(0, 1)), Point::Rat(q(1, 1)), ZSpec::Empty)).unwrap();
        assert!(v.answer);
        let v = criterion_t2(&query(StructureId::Ehr, Mode::T2, Point::low(q(1, 2)), Point::low(q(3, 4)), ZSpec::Empty)).unwrap();
        assert!(!v.answer && v.certificate.all_constants_shared && v.recheck());
        assert_eq!(v.certificate.offending[0].point, Point::constant(0));
        let v = criterion_t2(&query(StructureId::Ehr, Mode::T2, Point::low(q(1, 2)), Point::low(q(3, 4)), ZSpec::AclOf(vec![]))).unwrap();
        assert!(v.answer);
    }

    #[test]
    fn preconditions_are_errors() {
        let p = Point::Rat(q(0, 1));
        let r = criterion_t0(&query(StructureId::Dlo, Mode::T0, p.clone(), p.clone(), ZSpec::Empty));
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = criterion_t0(&query(StructureId::Dlo, Mode::T0, Point::Rat(q(1, 1)), p.clone(), ZSpec::AclOf(vec![p.clone()])));
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = criterion_t0(&query(StructureId::Dlo, Mode::T0, Point::low(q(1, 1)), p, ZSpec::Empty));
        assert!(matches!(r, Err(Error::ForeignPoint { .. })));
    }

    #[test]
    fn saturated_pairs() {
        let dlo = StructureHandle::dlo();
        let v = saturated_pair_separability(&dlo, &[Point::Rat(q(0, 1))], &[Point::Rat(q(1, 1))]).unwrap();
        assert!(v.answer && v.recheck());
        let ex1 = StructureHandle::ex1();
        let v = saturated_pair_separability(&ex1, &[Point::Pair(q(2, 1), q(3, 1))], &[Point::Single(q(5, 1))]).unwrap();
        assert!(v.answer);
        assert_eq!(v.certificate.type_coverage.len(), 2);
        let v = saturated_pair_separability(&ex1, &[Point::Pair(q(2, 1), q(3, 1))], &[Point::Single(q(2, 1))]).unwrap();
        assert!(!v.answer && !v.conditions["1: acl(A) n acl(B) = empty"]);
        let ehr = StructureHandle::ehr();
        let v = saturated_pair_separability(&ehr, &[Point::low(q(1, 2))], &[Point::low(q(3, 4))]).unwrap();
        assert!(!v.answer && v.recheck());
        let stuck: Vec<_> = v.certificate.type_coverage.iter().filter(|t| !t.escapes()).collect();
        assert!(stuck.iter().any(|t| t.formula == "x = c0"));
        assert!(v.conditions.values().all(|c| !c));
    }

    #[test]
    fn six_way_report() {
        let ehr = StructureHandle::ehr();
        let r = qo_equivalence_report(&ehr, &Point::low(q(1, 2)), &Point::low(q(3, 4)), &ZSpec::AclOf(vec![])).unwrap();
        assert_eq!(r.conditions, [true; 6]);
        assert!(r.consistent && r.hypotheses_met);
        let ex1 = StructureHandle::ex1();
        let r = qo_equivalence_report(&ex1, &Point::Pair(q(2, 1), q(3, 1)), &Point::Single(q(2, 1)), &ZSpec::Empty).unwrap();
        assert_eq!(r.conditions, [false, true, false, true, false, false]);
        assert!(!r.consistent && !r.hypotheses_met);
        let dlo = StructureHandle::dlo();
        assert!(qo_equivalence_report(&dlo, &Point::Rat(q(0, 1)), &Point::Rat(q(0, 1)), &ZSpec::Empty).is_err());
    }

    #[test]
    fn finite_sets() {
        let dlo = StructureHandle::dlo();
        let pts = |xs: &[i64]| xs.iter().map(|x| Point::Rat(q(*x, 1))).collect::<Vec<_>>();
        let r = qo_finite_sets(&dlo, &pts(&[0, 1]), &pts(&[2, 3]), &ZSpec::Empty).unwrap();
        assert!(r.verdict.answer && r.agree && r.matrix.len() == 4);
        let ehr = StructureHandle::ehr();
        let r = qo_finite_sets(&ehr, &[Point::low(q(1, 2))], &[Point::low(q(3, 4)), Point::low(q(7, 8))], &ZSpec::DclEmpty).unwrap();
        assert!(r.verdict.answer && r.agree);
        let ex1 = StructureHandle::ex1();
        let e = qo_finite_sets(&ex1, &[Point::Single(q(1, 1))], &[Point::Single(q(2, 1))], &ZSpec::Empty).unwrap_err();
        assert_eq!(e.to_string(), "theorem hypotheses unmet: quite_o_minimal = false");
    }
}
