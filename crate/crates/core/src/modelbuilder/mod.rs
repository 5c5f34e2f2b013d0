//! Staged construction of separating elementary submodels.
//!
//! A chain of finite acl-closed carriers is grown by processing one-variable
//! formulas with parameters in the carrier, in a fair order, and adding a
//! witness for each one not yet realized. Witnesses are chosen so that the
//! carrier never meets the forbidden set outside `Z`. When the case is
//! recognized, a closed form with decidable membership describes the union
//! of the chain's intended limit, and every chosen witness lies inside it.

pub mod closed_form;
pub mod verify;
pub mod witness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use closed_form::ClosedForm;
pub use verify::{tarski_vaught_verify, TvReport, TvStatus};
pub use witness::{choose_witness, WitnessCase, WitnessChoice};

use crate::catalog::point::Point;
use crate::catalog::{StructureHandle, StructureId};
use crate::closure::{ClosureSet, ZSpec};
use crate::error::Error;
use crate::logic::enumerate::{templates, Template};
use crate::logic::Binding;
use crate::scalar::Scalar;
use crate::separability::{criterion_t0, criterion_t2, Mode, SeparabilityQuery, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Contains `acl(A u Z)`, misses `B \ Z`.
    T0,
    /// The `A` side of a twin pair.
    T2A,
    /// The `B` side of a twin pair.
    T2B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Membership is decided by the closed form.
    Complete,
    /// Only a finite stage trace is available.
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar", tag = "outcome", rename_all = "snake_case")]
pub enum Outcome<Q> {
    Inconsistent,
    AlreadyRealized { witness: Point<Q> },
    WitnessAdded { choice: WitnessChoice<Q> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Processed<Q> {
    pub formula: String,
    pub params: Vec<Point<Q>>,
    #[serde(flatten)]
    pub outcome: Outcome<Q>,
}

/// One extension step. The carrier after the stage is the `contains` set
/// plus everything added up to and including this stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Stage<Q> {
    pub index: usize,
    pub added: Vec<Point<Q>>,
    pub carrier_size: usize,
    pub processed: Vec<Processed<Q>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildParams {
    pub budget: usize,
    pub quota: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct SubmodelDescription<Q> {
    pub structure: StructureId,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForm<Q>>,
    /// `acl(A u Z)` for this side.
    pub contains: ClosureSet<Q>,
    /// Points that must stay outside.
    pub excludes: Vec<Point<Q>>,
    pub z: ZSpec<Q>,
    pub stages: Vec<Stage<Q>>,
    pub status: Status,
    pub params: BuildParams,
}

impl<Q: Scalar> SubmodelDescription<Q> {
    pub fn handle(&self) -> StructureHandle {
        StructureHandle::new(self.structure)
    }

    /// Decidable membership, when a closed form is attached.
    pub fn member(&self, p: &Point<Q>) -> Option<bool> {
        self.closed_form.as_ref().map(|f| f.contains(p))
    }

    /// Listed carrier after each stage, in stage order.
    pub fn carriers(&self) -> Vec<Vec<Point<Q>>> {
        let mut cur: Vec<Point<Q>> = self.contains.listed().cloned().collect();
        let mut out = Vec::with_capacity(self.stages.len());
        for st in &self.stages {
            cur.extend(st.added.iter().cloned());
            out.push(cur.clone());
        }
        out
    }

    /// The full carrier as a closure set.
    pub fn final_carrier(&self) -> ClosureSet<Q> {
        let mut c = self.contains.clone();
        let pts: Vec<Point<Q>> = self.stages.iter().flat_map(|s| s.added.iter().cloned()).collect();
        c.absorb(&ClosureSet::listing(self.structure, &pts));
        c
    }

    pub fn witness_count(&self) -> usize {
        self.stages
            .iter()
            .flat_map(|s| &s.processed)
            .filter(|p| matches!(p.outcome, Outcome::WitnessAdded { .. }))
            .count()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub budget: usize,
    /// Formula instances processed per stage.
    pub quota: usize,
    pub closed_form: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { budget: 200, quota: 4, closed_form: true }
    }
}

#[derive(Debug, Error)]
pub enum BuildError<Q: Scalar> {
    /// The criterion fails; the verdict carries the offending closure element.
    #[error("refused: {}", .0.criterion)]
    Refused(Box<Verdict<Q>>),
    #[error(transparent)]
    Failed(#[from] Error),
}

/// Position in the fair enumeration: every template instance whose largest
/// parameter index is `m` is visited before any with index `m + 1`.
#[derive(Clone, Copy, Debug, Default)]
struct Cursor {
    m: usize,
    template: usize,
    pos: usize,
}

/// The `pos`-th parameter tuple of the given arity whose largest index is `m`.
fn tuple_at(arity: usize, m: usize, pos: usize) -> Option<Vec<usize>> {
    match arity {
        0 => (m == 0 && pos == 0).then(Vec::new),
        1 => (pos == 0).then(|| vec![m]),
        2 if pos <= m => Some(vec![pos, m]),
        2 if pos < 2 * m + 1 => Some(vec![m, pos - m - 1]),
        2 => None,
        _ => unimplemented!("templates have at most two parameters"),
    }
}

impl Cursor {
    fn next<Q>(&mut self, templates: &[Template<Q>], carrier_len: usize) -> Option<(usize, Vec<usize>)> {
        loop {
            if self.m >= carrier_len {
                return None;
            }
            if self.template >= templates.len() {
                *self = Cursor { m: self.m + 1, template: 0, pos: 0 };
                continue;
            }
            match tuple_at(templates[self.template].arity, self.m, self.pos) {
                Some(t) => {
                    self.pos += 1;
                    return Some((self.template, t));
                }
                None => {
                    self.template += 1;
                    self.pos = 0;
                }
            }
        }
    }
}

struct Chain<'a, Q> {
    s: &'a StructureHandle,
    z: &'a ZSpec<Q>,
    hint: Option<&'a ClosedForm<Q>>,
    templates: &'a [Template<Q>],
    /// Carrier points in the order they were added.
    order: Vec<Point<Q>>,
    /// The carrier itself; acl-closed over `Z`.
    carrier: ClosureSet<Q>,
    cursor: Cursor,
    stages: Vec<Stage<Q>>,
}

impl<'a, Q: Scalar> Chain<'a, Q> {
    fn new(s: &'a StructureHandle, z: &'a ZSpec<Q>, hint: Option<&'a ClosedForm<Q>>, templates: &'a [Template<Q>], start: ClosureSet<Q>) -> Self {
        Chain { s, z, hint, templates, order: start.listed().cloned().collect(), carrier: start, cursor: Cursor::default(), stages: vec![] }
    }

    /// A carrier element in the set, found by range search.
    fn realized(&self, set: &crate::catalog::definable::DefinableSet<Q>) -> Option<Point<Q>> {
        let sorted = &self.carrier.elements;
        for comp in &set.components {
            let start = sorted.partition_point(|e| comp.lower.locate(&e.point) == std::cmp::Ordering::Less);
            for e in &sorted[start..] {
                if comp.upper.locate(&e.point) != std::cmp::Ordering::Less {
                    break;
                }
                if comp.contains(&e.point) {
                    return Some(e.point.clone());
                }
            }
            if self.carrier.intensional_constants {
                if let Some(c) = self.s.first_constant_in(comp) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn stage(&mut self, quota: usize, forbidden: &ClosureSet<Q>) -> Result<(), Error> {
        let mut processed = Vec::with_capacity(quota);
        let mut added = Vec::new();
        for _ in 0..quota {
            let Some((t, idx)) = self.cursor.next(self.templates, self.order.len()) else { break };
            let params: Vec<Point<Q>> = idx.iter().map(|&i| self.order[i].clone()).collect();
            let phi = self.templates[t].instantiate(&params);
            let set = self.s.definable_set(&phi, &Binding::new())?;
            let outcome = if set.is_empty() {
                Outcome::Inconsistent
            } else if let Some(w) = self.realized(&set) {
                Outcome::AlreadyRealized { witness: w }
            } else {
                let choice = choose_witness(self.s, &phi, &params, forbidden, self.z, self.hint)?;
                let ext = self.s.acl_with(std::slice::from_ref(&choice.chosen), self.z);
                let new = self.carrier.absorb(&ext);
                self.order.extend(new.iter().cloned());
                added.extend(new);
                Outcome::WitnessAdded { choice }
            };
            processed.push(Processed { formula: phi.to_string(), params, outcome });
        }
        self.stages.push(Stage { index: self.stages.len(), added, carrier_size: self.order.len(), processed });
        Ok(())
    }
}

fn query<Q: Scalar>(s: &StructureHandle, mode: Mode, a: &[Point<Q>], b: &[Point<Q>], z: &ZSpec<Q>) -> SeparabilityQuery<Q> {
    SeparabilityQuery::new(s.id, mode, a.to_vec(), b.to_vec(), z.clone())
}

fn status<Q>(f: &Option<ClosedForm<Q>>) -> Status {
    if f.is_some() {
        Status::Complete
    } else {
        Status::Incomplete
    }
}

/// An elementary submodel containing `acl(A u Z)` and missing `B \ Z`.
/// Refuses exactly when the T0 criterion fails.
pub fn build_t0_separator<Q: Scalar>(
    s: &StructureHandle,
    a: &[Point<Q>],
    b: &[Point<Q>],
    z: &ZSpec<Q>,
    opts: &BuildOptions,
) -> Result<SubmodelDescription<Q>, BuildError<Q>> {
    let verdict = criterion_t0(&query(s, Mode::T0, a, b, z))?;
    if !verdict.answer {
        return Err(BuildError::Refused(Box::new(verdict)));
    }
    let zs = &verdict.certificate.z;
    let excludes: Vec<Point<Q>> = b.iter().filter(|p| !zs.contains(p)).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let closed_form = opts.closed_form.then(|| closed_form::complement_of(s, &excludes, zs.intensional_constants));
    let contains = verdict.certificate.closure_a.clone();
    let forbidden = ClosureSet::listing(s.id, &excludes);
    let tpl = templates::<Q>(&s.signature);
    let mut chain = Chain::new(s, z, closed_form.as_ref(), &tpl, contains.clone());
    for _ in 0..opts.budget {
        chain.stage(opts.quota, &forbidden)?;
    }
    let stages = chain.stages;
    Ok(SubmodelDescription {
        structure: s.id,
        role: Role::T0,
        status: status(&closed_form),
        closed_form,
        contains,
        excludes,
        z: z.clone(),
        stages,
        params: BuildParams { budget: opts.budget, quota: opts.quota },
    })
}

/// Elementary submodels `N_a ⊇ acl(A u Z)`, `N_b ⊇ acl(B u Z)` with
/// `(N_a ∩ N_b) \ Z = ∅`, grown alternately. Refuses exactly when the T2
/// criterion fails.
pub fn build_t2_separators<Q: Scalar>(
    s: &StructureHandle,
    a: &[Point<Q>],
    b: &[Point<Q>],
    z: &ZSpec<Q>,
    opts: &BuildOptions,
) -> Result<(SubmodelDescription<Q>, SubmodelDescription<Q>), BuildError<Q>> {
    let verdict = criterion_t2(&query(s, Mode::T2, a, b, z))?;
    if !verdict.answer {
        return Err(BuildError::Refused(Box::new(verdict)));
    }
    let cert = &verdict.certificate;
    let (acl_a, acl_b) = (cert.closure_a.clone(), cert.closure_b.clone().expect("T2 certificate has both closures"));
    let zs = &cert.z;
    let outside_z = |c: &ClosureSet<Q>| -> Vec<Point<Q>> { c.listed().filter(|p| !zs.contains(p)).cloned().collect() };
    let (forms_a, forms_b) = if opts.closed_form {
        let all: Vec<Point<Q>> = acl_a.listed().chain(acl_b.listed()).chain(zs.listed()).cloned().collect();
        let prime = closed_form::fresh_prime(&all);
        (
            Some(closed_form::slice(prime, 1, acl_a.clone(), "acl(A u Z)")),
            Some(closed_form::slice(prime, 2, acl_b.clone(), "acl(B u Z)")),
        )
    } else {
        (None, None)
    };
    let tpl = templates::<Q>(&s.signature);
    let mut ca = Chain::new(s, z, forms_a.as_ref(), &tpl, acl_a.clone());
    let mut cb = Chain::new(s, z, forms_b.as_ref(), &tpl, acl_b.clone());
    for _ in 0..opts.budget {
        ca.stage(opts.quota, &cb.carrier)?;
        cb.stage(opts.quota, &ca.carrier)?;
    }
    let params = BuildParams { budget: opts.budget, quota: opts.quota };
    let (stages_a, stages_b) = (ca.stages, cb.stages);
    let da = SubmodelDescription {
        structure: s.id,
        role: Role::T2A,
        status: status(&forms_a),
        closed_form: forms_a,
        excludes: outside_z(&acl_b),
        contains: acl_a.clone(),
        z: z.clone(),
        stages: stages_a,
        params,
    };
    let db = SubmodelDescription {
        structure: s.id,
        role: Role::T2B,
        status: status(&forms_b),
        closed_form: forms_b,
        excludes: outside_z(&acl_a),
        contains: acl_b,
        z: z.clone(),
        stages: stages_b,
        params,
    };
    Ok((da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::overlap;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    fn opts(budget: usize) -> BuildOptions {
        BuildOptions { budget, ..BuildOptions::default() }
    }

    #[test]
    fn tuples_cover_each_index_once() {
        for m in 0..5 {
            let mut seen = Vec::new();
            let mut pos = 0;
            while let Some(t) = tuple_at(2, m, pos) {
                assert_eq!(*t.iter().max().unwrap(), m);
                seen.push(t);
                pos += 1;
            }
            assert_eq!(seen.len(), 2 * m + 1);
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), 2 * m + 1);
        }
    }

    #[test]
    fn dlo_t0() {
        let s = StructureHandle::dlo();
        let d = build_t0_separator::<R>(&s, &[Point::Rat(q(0, 1))], &[Point::Rat(q(1, 1))], &ZSpec::Empty, &opts(30)).unwrap();
        assert_eq!(d.closed_form.as_ref().unwrap().text(), "M \\ {1}");
        assert_eq!(d.status, Status::Complete);
        assert!(d.witness_count() > 0);
        for carrier in d.carriers() {
            assert!(!carrier.contains(&Point::Rat(q(1, 1))));
        }
        let last = d.final_carrier();
        assert!(s.acl(&last.listed().cloned().collect::<Vec<_>>()).listed().eq(last.listed()));
    }

    #[test]
    fn ex1_t0() {
        let s = StructureHandle::ex1();
        let d = build_t0_separator::<R>(&s, &[Point::Single(q(2, 1))], &[Point::Pair(q(2, 1), q(3, 1))], &ZSpec::Empty, &opts(30)).unwrap();
        assert_eq!(d.closed_form.as_ref().unwrap().text(), "M \\ {(2,3)}");
        let err = build_t0_separator::<R>(&s, &[Point::Pair(q(2, 1), q(3, 1))], &[Point::Single(q(2, 1))], &ZSpec::Empty, &opts(3));
        match err {
            Err(BuildError::Refused(v)) => assert_eq!(v.certificate.offending[0].point, Point::Single(q(2, 1))),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn twins_stay_disjoint() {
        let s = StructureHandle::ehr();
        let (a, b) = (vec![Point::low(q(1, 2))], vec![Point::low(q(3, 4))]);
        let z = ZSpec::AclOf(vec![]);
        let (da, db) = build_t2_separators::<R>(&s, &a, &b, &z, &opts(20)).unwrap();
        let zs = z.resolve(&s);
        for (x, y) in da.carriers().iter().zip(db.carriers()) {
            let o = overlap(&ClosureSet::listing(s.id, x), &ClosureSet::listing(s.id, &y), &zs);
            assert!(o.is_empty());
        }
        let fa = da.final_carrier();
        assert!(fa.listed().all(|p| da.member(p) == Some(true) && db.member(p) != Some(true) || zs.contains(p)));
        assert!(matches!(build_t2_separators::<R>(&s, &a, &b, &ZSpec::Empty, &opts(2)), Err(BuildError::Refused(_))));
    }

    #[test]
    fn staged_only_is_incomplete() {
        let s = StructureHandle::dlo();
        let o = BuildOptions { closed_form: false, ..opts(5) };
        let d = build_t0_separator::<R>(&s, &[Point::Rat(q(0, 1))], &[Point::Rat(q(1, 1))], &ZSpec::Empty, &o).unwrap();
        assert_eq!(d.status, Status::Incomplete);
        let json = serde_json::to_string(&d).unwrap();
        let back: SubmodelDescription<R> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }
}
