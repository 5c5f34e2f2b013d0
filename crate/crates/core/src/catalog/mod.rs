//! The three computable ordered structures.
//!
//! * `dlo`: the rationals with their order.
//! * `ehr`: a dense order with constants `c_0 < c_1 < ...`, realized as two
//!   tiers of rationals; `c_i` is `(i, low)` and the whole high tier lies
//!   above every constant, so the non-isolated type "above all constants"
//!   is realized.
//! * `ex1`: sorts `P1 = Q x Q` (lexicographic) below `P2 = Q`, with
//!   `f((n, m)) = n`. `f` is extended by the identity on `P2`.
//!
//! Every structure is evaluated exactly by orbit decomposition: given a
//! finite set of relevant elements, [`StructureHandle::cells`] cuts the
//! universe into finitely many convex orbits of the automorphisms fixing
//! that set, and quantifiers range over one representative per orbit.

pub mod automorphism;
pub mod definable;
mod eval;
pub mod point;
pub mod types;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::logic::Signature;
use crate::scalar::Scalar;
use definable::{Cell, Component, Cut, Line, Shape};
use point::{Point, Sort, Tier};

pub const DEFAULT_DEPTH_BUDGET: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureId {
    Dlo,
    Ehr,
    Ex1,
}

impl StructureId {
    pub const ALL: [StructureId; 3] = [StructureId::Dlo, StructureId::Ehr, StructureId::Ex1];

    pub fn name(self) -> &'static str {
        match self {
            StructureId::Dlo => "dlo",
            StructureId::Ehr => "ehr",
            StructureId::Ex1 => "ex1",
        }
    }
}

impl fmt::Display for StructureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dlo" => Ok(StructureId::Dlo),
            "ehr" => Ok(StructureId::Ehr),
            "ex1" => Ok(StructureId::Ex1),
            other => Err(format!("unknown structure `{other}` (expected dlo, ehr or ex1)")),
        }
    }
}

/// Hand-verified model-theoretic facts about a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub omega_categorical: bool,
    pub quite_o_minimal: bool,
    pub almost_omega_categorical: bool,
    pub exchange_principle: bool,
    pub dcl_equals_acl: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureHandle {
    pub id: StructureId,
    pub signature: Signature,
    pub flags: Flags,
    pub saturation_note: &'static str,
    pub depth_budget: usize,
}

impl StructureHandle {
    pub fn new(id: StructureId) -> Self {
        match id {
            StructureId::Dlo => StructureHandle {
                id,
                signature: Signature::dlo(),
                flags: Flags {
                    omega_categorical: true,
                    quite_o_minimal: true,
                    almost_omega_categorical: true,
                    exchange_principle: true,
                    dcl_equals_acl: true,
                },
                saturation_note: "(Q,<) is the countable saturated model: every cut over finitely many \
                                  rationals is realized by a midpoint",
                depth_budget: DEFAULT_DEPTH_BUDGET,
            },
            StructureId::Ehr => StructureHandle {
                id,
                signature: Signature::ehr(),
                flags: Flags {
                    omega_categorical: false,
                    quite_o_minimal: true,
                    almost_omega_categorical: true,
                    exchange_principle: true,
                    dcl_equals_acl: true,
                },
                saturation_note: "two-tier model: low tier Q with c_i = (i,0), high tier a copy of Q above \
                                  every constant; every cut over finitely many elements and constants, \
                                  including 'c_i < x for all i', is realized (spot-checked by sampled cuts)",
                depth_budget: DEFAULT_DEPTH_BUDGET,
            },
            StructureId::Ex1 => StructureHandle {
                id,
                signature: Signature::ex1(),
                flags: Flags {
                    omega_categorical: true,
                    quite_o_minimal: false,
                    almost_omega_categorical: true,
                    exchange_principle: false,
                    dcl_equals_acl: true,
                },
                saturation_note: "Q x Q over Q is the countable model of an omega-categorical theory, hence \
                                  omega-saturated",
                depth_budget: DEFAULT_DEPTH_BUDGET,
            },
        }
    }

    pub fn dlo() -> Self {
        Self::new(StructureId::Dlo)
    }

    pub fn ehr() -> Self {
        Self::new(StructureId::Ehr)
    }

    pub fn ex1() -> Self {
        Self::new(StructureId::Ex1)
    }

    pub fn with_depth_budget(mut self, budget: usize) -> Self {
        self.depth_budget = budget;
        self
    }

    pub fn admits<Q: Scalar>(&self, p: &Point<Q>) -> bool {
        self.signature.admits(p)
    }

    pub fn has_constants(&self) -> bool {
        self.id == StructureId::Ehr
    }

    pub fn constant<Q: Scalar>(&self, i: u64) -> Option<Point<Q>> {
        self.has_constants().then(|| Point::constant(i))
    }

    pub fn is_constant<Q: Scalar>(&self, p: &Point<Q>) -> bool {
        self.has_constants() && p.constant_index().is_some()
    }

    /// Closes a finite set under the function symbols (only EX1 has one).
    pub fn function_closure<Q: Scalar>(&self, points: impl IntoIterator<Item = Point<Q>>) -> BTreeSet<Point<Q>> {
        let mut out = BTreeSet::new();
        for p in points {
            if let Point::Pair(n, _) = &p {
                out.insert(Point::Single(n.clone()));
            }
            out.insert(p);
        }
        out
    }

    /// Orbit decomposition of the universe over a finite set of elements,
    /// in ascending order. The set is closed under `f` first.
    pub fn cells<Q: Scalar>(&self, relevant: impl IntoIterator<Item = Point<Q>>) -> Vec<Cell<Q>> {
        let relevant = self.function_closure(relevant);
        match self.id {
            StructureId::Dlo => {
                let values: Vec<Q> = relevant
                    .iter()
                    .map(|p| match p {
                        Point::Rat(q) => q.clone(),
                        other => panic!("{other} is not a dlo element"),
                    })
                    .collect();
                line_cells(&values, Line::Rat, Cut::NegInf, Cut::PosInf, None)
            }
            StructureId::Ehr => ehr_cells(&relevant),
            StructureId::Ex1 => ex1_cells(&relevant),
        }
    }

    /// The cells making up one component (its boundaries are cell
    /// boundaries once its anchors are relevant).
    pub fn component_cells<Q: Scalar>(&self, component: &Component<Q>) -> Vec<Cell<Q>> {
        self.cells(component.anchors())
            .into_iter()
            .filter(|c| component.contains(&c.representative()))
            .collect()
    }

    /// The first constant inside a component, in the order `c_0, c_1, ...`.
    pub fn first_constant_in<Q: Scalar>(&self, component: &Component<Q>) -> Option<Point<Q>> {
        if !self.has_constants() {
            return None;
        }
        let start = match &component.lower {
            Cut::NegInf => 0,
            Cut::Before(Point::Tier(Tier::Low, q)) | Cut::After(Point::Tier(Tier::Low, q)) => {
                let f = q.floor().to_i64().unwrap_or(0);
                f.max(0) as u64
            }
            // Lower cut in the high tier: nothing above it is a constant.
            _ => return None,
        };
        (start..start + 2).map(Point::constant).find(|c| component.contains(c))
    }

    /// Ordering key for "how wide" a component is: whole lines beat
    /// half-lines, which beat bounded sets spanning more than one rational
    /// line, which beat bounded intervals (compared by length).
    pub fn width<Q: Scalar>(&self, component: &Component<Q>) -> Width<Q> {
        let lo = component.lower.anchor();
        let hi = component.upper.anchor();
        match (&component.lower, &component.upper) {
            (Cut::NegInf, Cut::PosInf) => Width::Line,
            (Cut::NegInf, _) | (_, Cut::PosInf) => Width::HalfLine,
            (Cut::Before(a), Cut::After(b)) if a == b => Width::Finite(Q::zero()),
            (Cut::Before(_) | Cut::After(_), Cut::Before(_) | Cut::After(_)) => {
                match same_line_length(lo.as_ref().unwrap(), hi.as_ref().unwrap()) {
                    Some(len) => Width::Finite(len),
                    None => Width::Broad,
                }
            }
            _ => Width::Broad,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Width<Q> {
    Finite(Q),
    Broad,
    HalfLine,
    Line,
}

fn same_line_length<Q: Scalar>(a: &Point<Q>, b: &Point<Q>) -> Option<Q> {
    match (a, b) {
        (Point::Rat(x), Point::Rat(y)) | (Point::Single(x), Point::Single(y)) => Some(y.clone() - x.clone()),
        (Point::Tier(s, x), Point::Tier(t, y)) if s == t => Some(y.clone() - x.clone()),
        (Point::Pair(n1, x), Point::Pair(n2, y)) if n1 == n2 => Some(y.clone() - x.clone()),
        _ => None,
    }
}

fn make_point<Q: Scalar>(line: &Line<Q>, q: Q) -> Point<Q> {
    match line {
        Line::Rat => Point::Rat(q),
        Line::Tier(t) => Point::Tier(*t, q),
        Line::P2 => Point::Single(q),
        Line::Fiber(n) => Point::Pair(n.clone(), q),
    }
}

/// Cells of one rational line cut at `values` (sorted, distinct).
fn line_cells<Q: Scalar>(values: &[Q], line: Line<Q>, start: Cut<Q>, end: Cut<Q>, sort: Option<Sort>) -> Vec<Cell<Q>> {
    let mut cells = Vec::with_capacity(2 * values.len() + 1);
    let mut lower = start;
    let mut lo: Option<Q> = None;
    for v in values {
        let p = make_point(&line, v.clone());
        cells.push(Cell {
            lower,
            upper: Cut::Before(p.clone()),
            sort,
            shape: Shape::Interval { line: line.clone(), lo: lo.clone(), hi: Some(v.clone()) },
        });
        cells.push(Cell { lower: Cut::Before(p.clone()), upper: Cut::After(p.clone()), sort, shape: Shape::Singleton(p.clone()) });
        lower = Cut::After(p);
        lo = Some(v.clone());
    }
    cells.push(Cell { lower, upper: end, sort, shape: Shape::Interval { line, lo, hi: None } });
    cells
}

fn ehr_cells<Q: Scalar>(relevant: &BTreeSet<Point<Q>>) -> Vec<Cell<Q>> {
    let pts: Vec<(Tier, Q)> = relevant
        .iter()
        .map(|p| match p {
            Point::Tier(t, q) => (*t, q.clone()),
            other => panic!("{other} is not an ehr element"),
        })
        .collect();
    let gap = |below: Option<&(Tier, Q)>, above: Option<&(Tier, Q)>| -> Shape<Q> {
        match (below, above) {
            (Some((s, x)), Some((t, y))) if s == t => Shape::Interval { line: Line::Tier(*s), lo: Some(x.clone()), hi: Some(y.clone()) },
            (Some((_, x)), Some((_, y))) => Shape::CrossTier { lo: Some(x.clone()), hi: Some(y.clone()) },
            (None, Some((Tier::Low, y))) => Shape::Interval { line: Line::Tier(Tier::Low), lo: None, hi: Some(y.clone()) },
            (None, Some((Tier::High, y))) => Shape::CrossTier { lo: None, hi: Some(y.clone()) },
            (Some((Tier::High, x)), None) => Shape::Interval { line: Line::Tier(Tier::High), lo: Some(x.clone()), hi: None },
            (Some((Tier::Low, x)), None) => Shape::CrossTier { lo: Some(x.clone()), hi: None },
            (None, None) => Shape::CrossTier { lo: None, hi: None },
        }
    };
    let mut cells = Vec::with_capacity(2 * pts.len() + 1);
    let mut lower = Cut::NegInf;
    let mut prev: Option<&(Tier, Q)> = None;
    for cur in &pts {
        let p = Point::Tier(cur.0, cur.1.clone());
        cells.push(Cell { lower, upper: Cut::Before(p.clone()), sort: None, shape: gap(prev, Some(cur)) });
        cells.push(Cell { lower: Cut::Before(p.clone()), upper: Cut::After(p.clone()), sort: None, shape: Shape::Singleton(p.clone()) });
        lower = Cut::After(p);
        prev = Some(cur);
    }
    cells.push(Cell { lower, upper: Cut::PosInf, sort: None, shape: gap(prev, None) });
    cells
}

fn ex1_cells<Q: Scalar>(relevant: &BTreeSet<Point<Q>>) -> Vec<Cell<Q>> {
    let bases: Vec<Q> = relevant
        .iter()
        .filter_map(|p| match p {
            Point::Single(q) => Some(q.clone()),
            Point::Pair(..) => None,
            other => panic!("{other} is not an ex1 element"),
        })
        .collect();
    let p1 = Some(Sort::P1);
    let mut cells = Vec::new();
    let mut lower = Cut::NegInf;
    let mut lo: Option<Q> = None;
    for b in &bases {
        cells.push(Cell {
            lower,
            upper: Cut::BeforeFiber(b.clone()),
            sort: p1,
            shape: Shape::BaseBlock { lo: lo.clone(), hi: Some(b.clone()) },
        });
        let fiber: Vec<Q> = relevant
            .iter()
            .filter_map(|p| match p {
                Point::Pair(n, m) if n == b => Some(m.clone()),
                _ => None,
            })
            .collect();
        cells.extend(line_cells(&fiber, Line::Fiber(b.clone()), Cut::BeforeFiber(b.clone()), Cut::AfterFiber(b.clone()), p1));
        lower = Cut::AfterFiber(b.clone());
        lo = Some(b.clone());
    }
    cells.push(Cell { lower, upper: Cut::PosInf, sort: p1, shape: Shape::BaseBlock { lo, hi: None } });
    cells.extend(line_cells(&bases, Line::P2, Cut::NegInf, Cut::PosInf, Some(Sort::P2)));
    cells
}
