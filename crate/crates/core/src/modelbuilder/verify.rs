//! Sampling check that a described subset is the universe of an elementary
//! submodel: every satisfiable `exists x phi(x, a)` with parameters from the
//! subset must have a witness inside it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::closed_form::ClosedForm;
use super::{Cursor, Role, Status, SubmodelDescription};
use crate::catalog::definable::{Component, Cut, DefinableSet};
use crate::catalog::point::Point;
use crate::catalog::StructureHandle;
use crate::closure::{ClosureSet, ZSpec};
use crate::logic::enumerate::{templates, FormulaGen};
use crate::logic::{Binding, Formula};
use crate::scalar::Scalar;

/// Constants checked explicitly when the required set lists them
/// intensionally.
const CONSTANT_PROBE: u64 = 20;
const POOL_CAP: usize = 32;
const PICKS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvStatus {
    Pass,
    Fail,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar", tag = "kind", rename_all = "snake_case")]
pub enum Failure<Q> {
    /// `M` satisfies `formula` but no witness lies in the subset.
    Formula { formula: String, params: Vec<Point<Q>> },
    MissingRequired { point: Point<Q> },
    ContainsExcluded { point: Point<Q> },
    CarrierOutside { stage: usize, point: Point<Q> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct TvReport<Q> {
    pub status: TvStatus,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    /// Existential formulas evaluated.
    pub checked: usize,
    /// Of those, the ones true in `M`.
    pub satisfiable: usize,
    pub pool: Vec<Point<Q>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure<Q>>,
}

fn shift<Q: Scalar>(p: &Point<Q>, d: &Q) -> Point<Q> {
    match p {
        Point::Rat(q) => Point::Rat(q.clone() + d.clone()),
        Point::Tier(t, q) => Point::Tier(*t, q.clone() + d.clone()),
        Point::Single(q) => Point::Single(q.clone() + d.clone()),
        Point::Pair(n, m) => Point::Pair(n.clone(), m.clone() + d.clone()),
    }
}

fn neighbors<Q: Scalar>(p: &Point<Q>) -> Vec<Point<Q>> {
    let mut out = match p {
        Point::Single(n) => vec![Point::Pair(n.clone(), Q::zero()), Point::Pair(n.clone(), Q::one())],
        Point::Pair(n, _) => vec![Point::Single(n.clone())],
        _ => vec![],
    };
    out.extend([Q::one(), -Q::one(), Q::from_fraction(1, 2), Q::from_fraction(-1, 2)].iter().map(|d| shift(p, d)));
    out
}

/// Parameters drawn from the subset: boundary landmarks first, then the
/// required set, the staged carrier, nearby points and random members.
fn pool<Q: Scalar>(s: &StructureHandle, desc: &SubmodelDescription<Q>, form: &ClosedForm<Q>, rng: &mut ChaCha8Rng) -> Vec<Point<Q>> {
    let landmarks = form.landmarks();
    let mut seeds: Vec<Point<Q>> = landmarks.clone();
    seeds.extend(desc.contains.listed().cloned());
    seeds.extend(desc.excludes.iter().cloned());
    seeds.extend(desc.final_carrier().listed().take(8).cloned());
    let mut cand = landmarks.clone();
    cand.extend(landmarks.iter().flat_map(neighbors));
    cand.extend(seeds.iter().cloned());
    cand.extend(seeds.iter().flat_map(neighbors));
    let cells = s.cells(seeds.iter().cloned());
    for _ in 0..6 {
        if let Some(cell) = cells.choose(rng) {
            cand.extend(cell.shape.sample(form.picker(rng.gen_range(0..PICKS)).as_ref()));
        }
    }
    let mut out: Vec<Point<Q>> = Vec::new();
    for p in cand {
        if s.admits(&p) && form.contains(&p) && !out.contains(&p) {
            out.push(p);
        }
        if out.len() == POOL_CAP {
            break;
        }
    }
    out
}

/// A member of both the component and the subset, if the bounded search
/// finds one.
fn witness_in<Q: Scalar>(s: &StructureHandle, comp: &Component<Q>, form: &ClosedForm<Q>) -> Option<Point<Q>> {
    if let Some(p) = comp.as_singleton() {
        return form.contains(p).then(|| p.clone());
    }
    let mut relevant = comp.anchors();
    relevant.extend(form.landmarks().into_iter().filter(|p| comp.contains(p)));
    let cells: Vec<_> = s.cells(relevant).into_iter().filter(|c| comp.contains(&c.representative())).collect();
    for cell in cells.iter().filter(|c| c.shape.is_singleton()) {
        let p = cell.representative();
        if form.contains(&p) {
            return Some(p);
        }
    }
    for n in 0..PICKS {
        let picker = form.picker(n);
        for cell in cells.iter().filter(|c| !c.shape.is_singleton()) {
            for p in cell.shape.sample(picker.as_ref()) {
                if comp.contains(&p) && form.contains(&p) {
                    return Some(p);
                }
            }
        }
    }
    None
}

fn search<Q: Scalar>(s: &StructureHandle, set: &DefinableSet<Q>, form: &ClosedForm<Q>) -> Option<Point<Q>> {
    set.components.iter().find_map(|c| witness_in(s, c, form))
}

fn exact_checks<Q: Scalar>(desc: &SubmodelDescription<Q>, member: &dyn Fn(&Point<Q>) -> bool) -> Option<Failure<Q>> {
    for p in desc.contains.listed() {
        if !member(p) {
            return Some(Failure::MissingRequired { point: p.clone() });
        }
    }
    if desc.contains.intensional_constants {
        for i in 0..=CONSTANT_PROBE {
            let c = Point::constant(i);
            if !member(&c) {
                return Some(Failure::MissingRequired { point: c });
            }
        }
    }
    for p in &desc.excludes {
        if member(p) {
            return Some(Failure::ContainsExcluded { point: p.clone() });
        }
    }
    None
}

/// Checks `desc` against `samples` existential formulas of quantifier depth
/// at most `depth`; half are template instances over the parameter pool in
/// fair order, the rest random. The report depends only on the arguments.
pub fn tarski_vaught_verify<Q: Scalar>(desc: &SubmodelDescription<Q>, depth: usize, samples: usize, seed: u64) -> TvReport<Q> {
    let s = desc.handle();
    let mut report = TvReport { status: TvStatus::Pass, depth, samples, seed, checked: 0, satisfiable: 0, pool: vec![], failure: None };
    let Some(form) = desc.closed_form.as_ref().filter(|_| desc.status == Status::Complete) else {
        // Staged only: the finite carrier is checked against the exclusions.
        let excluded = ClosureSet::listing(desc.structure, &desc.excludes);
        for st in &desc.stages {
            if let Some(p) = st.added.iter().find(|p| excluded.contains(p)) {
                report.status = TvStatus::Fail;
                report.failure = Some(Failure::CarrierOutside { stage: st.index, point: p.clone() });
                return report;
            }
        }
        report.status = TvStatus::Incomplete;
        return report;
    };
    let fail = |mut r: TvReport<Q>, f: Failure<Q>| {
        r.status = TvStatus::Fail;
        r.failure = Some(f);
        r
    };
    if let Some(f) = exact_checks(desc, &|p| form.contains(p)) {
        return fail(report, f);
    }
    for st in &desc.stages {
        if let Some(p) = st.added.iter().find(|p| !form.contains(p)) {
            return fail(report, Failure::CarrierOutside { stage: st.index, point: p.clone() });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = pool(&s, desc, form, &mut rng);
    report.pool = pool.clone();
    let tpl = templates::<Q>(&s.signature);
    let mut cursor = Cursor::default();
    for i in 0..samples {
        let systematic = if i < samples / 2 { cursor.next(&tpl, pool.len()) } else { None };
        let (phi, params) = match systematic {
            Some((t, idx)) => {
                let params: Vec<Point<Q>> = idx.iter().map(|&j| pool[j].clone()).collect();
                (tpl[t].instantiate(&params), params)
            }
            None => {
                let k = rng.gen_range(0..=2.min(pool.len()));
                let params: Vec<Point<Q>> = pool.choose_multiple(&mut rng, k).cloned().collect();
                let gen = FormulaGen::new(&s.signature, &params);
                let phi = gen.one_variable(&mut rng, depth.saturating_sub(1));
                let used = phi.params();
                (phi, used)
            }
        };
        report.checked += 1;
        let Ok(set) = s.definable_set(&phi, &Binding::new()) else { continue };
        if set.is_empty() {
            continue;
        }
        report.satisfiable += 1;
        if search(&s, &set, form).is_none() {
            let formula = Formula::exists("x", phi).to_string();
            return fail(report, Failure::Formula { formula, params });
        }
    }
    report
}

/// Non-elementary descriptions used as negative controls.
pub mod controls {
    use super::*;
    use crate::catalog::point::Sort;
    use crate::catalog::StructureId;
    use crate::modelbuilder::BuildParams;

    fn described<Q: Scalar>(structure: StructureId, text: &str, removed: Vec<Component<Q>>, contains: &[Point<Q>]) -> SubmodelDescription<Q> {
        let s = StructureHandle::new(structure);
        SubmodelDescription {
            structure,
            role: Role::T0,
            closed_form: Some(ClosedForm::Complement { text: text.into(), removed: DefinableSet { components: removed } }),
            contains: s.acl(contains),
            excludes: vec![],
            z: ZSpec::Empty,
            stages: vec![],
            status: Status::Complete,
            params: BuildParams { budget: 0, quota: 0 },
        }
    }

    /// DLO minus the open interval `(0, 1)`.
    pub fn interval_gap<Q: Scalar>() -> SubmodelDescription<Q> {
        let (zero, one) = (Point::Rat(Q::zero()), Point::Rat(Q::one()));
        let gap = Component { lower: Cut::After(zero.clone()), upper: Cut::Before(one.clone()), sort: None };
        described(StructureId::Dlo, "M \\ (0,1)", vec![gap], &[zero, one])
    }

    /// EX1 without the base point `2:P2` but with its whole fiber.
    pub fn orphaned_fiber<Q: Scalar>() -> SubmodelDescription<Q> {
        let two = Q::from_i64(2);
        let base = Point::Single(two.clone());
        described(StructureId::Ex1, "M \\ {2:P2}", vec![Component::singleton(base)], &[Point::Single(Q::zero())])
    }

    /// EX1 without the fiber over `2` but with `2:P2` itself.
    pub fn emptied_fiber<Q: Scalar>() -> SubmodelDescription<Q> {
        let two = Q::from_i64(2);
        let fiber = Component { lower: Cut::BeforeFiber(two.clone()), upper: Cut::AfterFiber(two.clone()), sort: Some(Sort::P1) };
        described(StructureId::Ex1, "M \\ f^-1(2)", vec![fiber], &[Point::Single(two)])
    }

    pub fn all<Q: Scalar>() -> Vec<SubmodelDescription<Q>> {
        vec![interval_gap(), orphaned_fiber(), emptied_fiber()]
    }
}
