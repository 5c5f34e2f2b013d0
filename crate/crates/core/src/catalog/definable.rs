//! One-variable definable sets in normal form: finitely many maximal convex
//! components, each bounded by Dedekind cuts of the structure order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::point::{Point, Sort, Tier};
use crate::scalar::{rational_with_level, Scalar};

/// A cut of the order. `Before(p)` sits immediately below `p`, `After(p)`
/// immediately above it. The fiber cuts only occur in EX1: they sit below
/// (above) the whole P1 fiber over a base value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar", rename_all = "snake_case")]
pub enum Cut<Q> {
    NegInf,
    Before(Point<Q>),
    After(Point<Q>),
    BeforeFiber(#[serde(with = "crate::scalar::text")] Q),
    AfterFiber(#[serde(with = "crate::scalar::text")] Q),
    PosInf,
}

impl<Q: Scalar> Cut<Q> {
    /// `Less` when `p` lies below the cut.
    pub fn locate(&self, p: &Point<Q>) -> Ordering {
        let below = match self {
            Cut::NegInf => false,
            Cut::PosInf => true,
            Cut::Before(a) => p < a,
            Cut::After(a) => p <= a,
            Cut::BeforeFiber(n) => matches!(p, Point::Pair(b, _) if b < n),
            Cut::AfterFiber(n) => matches!(p, Point::Pair(b, _) if b <= n),
        };
        if below {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// The element that pins this cut down, if any. For fiber cuts that is
    /// the P2 base point.
    pub fn anchor(&self) -> Option<Point<Q>> {
        match self {
            Cut::Before(p) | Cut::After(p) => Some(p.clone()),
            Cut::BeforeFiber(n) | Cut::AfterFiber(n) => Some(Point::Single(n.clone())),
            Cut::NegInf | Cut::PosInf => None,
        }
    }
}

/// A nonempty convex set: everything strictly between two cuts, optionally
/// restricted to one EX1 sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct Component<Q> {
    pub lower: Cut<Q>,
    pub upper: Cut<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort: Option<Sort>,
}

impl<Q: Scalar> Component<Q> {
    pub fn singleton(p: Point<Q>) -> Self {
        Component { lower: Cut::Before(p.clone()), upper: Cut::After(p), sort: None }
    }

    pub fn contains(&self, p: &Point<Q>) -> bool {
        self.lower.locate(p) == Ordering::Greater
            && self.upper.locate(p) == Ordering::Less
            && self.sort.is_none_or(|s| p.sort() == Some(s))
    }

    pub fn as_singleton(&self) -> Option<&Point<Q>> {
        match (&self.lower, &self.upper) {
            (Cut::Before(a), Cut::After(b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// Lower endpoint with its openness, when the endpoint is an element.
    pub fn lower_point(&self) -> Option<(&Point<Q>, bool)> {
        match &self.lower {
            Cut::Before(p) => Some((p, false)),
            Cut::After(p) => Some((p, true)),
            _ => None,
        }
    }

    pub fn upper_point(&self) -> Option<(&Point<Q>, bool)> {
        match &self.upper {
            Cut::After(p) => Some((p, false)),
            Cut::Before(p) => Some((p, true)),
            _ => None,
        }
    }

    pub fn anchors(&self) -> Vec<Point<Q>> {
        self.lower.anchor().into_iter().chain(self.upper.anchor()).collect()
    }
}

/// Finite union of pairwise disjoint, maximal convex components in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct DefinableSet<Q> {
    pub components: Vec<Component<Q>>,
}

impl<Q: Scalar> DefinableSet<Q> {
    pub fn empty() -> Self {
        DefinableSet { components: vec![] }
    }

    pub fn contains(&self, p: &Point<Q>) -> bool {
        self.components.iter().any(|c| c.contains(p))
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Every component is a single element.
    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.as_singleton().is_some())
    }

    pub fn isolated_points(&self) -> Vec<&Point<Q>> {
        self.components.iter().filter_map(Component::as_singleton).collect()
    }

    /// Elements pinning down some component boundary.
    pub fn anchors(&self) -> Vec<Point<Q>> {
        self.components.iter().flat_map(Component::anchors).collect()
    }

    /// Merges runs of consecutive selected cells into maximal components.
    pub(crate) fn from_cells(cells: &[Cell<Q>], selected: &[bool]) -> Self {
        let mut components = Vec::new();
        let mut i = 0;
        while i < cells.len() {
            if !selected[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < cells.len() && selected[i + 1] {
                i += 1;
            }
            let run = &cells[start..=i];
            let first_sort = run[0].sort;
            let sort = if run.iter().all(|c| c.sort == first_sort) { first_sort } else { None };
            components.push(Component { lower: run[0].lower.clone(), upper: run[run.len() - 1].upper.clone(), sort });
            i += 1;
        }
        DefinableSet { components }
    }
}

/// Which rational line an open cell lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Line<Q> {
    Rat,
    Tier(Tier),
    P2,
    /// The P1 fiber over a base value; the free coordinate is the second one.
    Fiber(Q),
}

/// Geometry of one cell of a decomposition. Open bounds are exclusive and
/// `None` means unbounded on that side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape<Q> {
    Singleton(Point<Q>),
    Interval { line: Line<Q>, lo: Option<Q>, hi: Option<Q> },
    /// EHR: the low tier above `lo` together with the high tier below `hi`.
    CrossTier { lo: Option<Q>, hi: Option<Q> },
    /// EX1: P1 elements whose base lies strictly between `lo` and `hi`.
    BaseBlock { lo: Option<Q>, hi: Option<Q> },
}

/// One orbit of the automorphisms fixing a finite set pointwise, presented
/// as a convex set with a geometric description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell<Q> {
    pub lower: Cut<Q>,
    pub upper: Cut<Q>,
    pub sort: Option<Sort>,
    pub shape: Shape<Q>,
}

/// Chooses a rational inside an open interval.
pub trait Picker<Q> {
    fn pick(&self, lo: Option<&Q>, hi: Option<&Q>) -> Q;
}

/// Midpoints, or one unit past a single bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct Midpoint;

impl<Q: Scalar> Picker<Q> for Midpoint {
    fn pick(&self, lo: Option<&Q>, hi: Option<&Q>) -> Q {
        match (lo, hi) {
            (Some(l), Some(h)) => l.midpoint(h),
            (Some(l), None) => l.clone() + Q::one(),
            (None, Some(h)) => h.clone() - Q::one(),
            (None, None) => Q::zero(),
        }
    }
}

/// The `n`-th point of a deterministic dyadic sequence filling the interval:
/// bounded intervals visit `1/2, 1/4, 3/4, 1/8, ...` of the way across,
/// half-lines step out by `1, 2, 1/2, 4, 1/4, ...`, and the whole line
/// visits `0, 1, -1, 2, -2, ...`.
#[derive(Clone, Copy, Debug)]
pub struct Dyadic(pub usize);

impl<Q: Scalar> Picker<Q> for Dyadic {
    fn pick(&self, lo: Option<&Q>, hi: Option<&Q>) -> Q {
        let n = self.0;
        match (lo, hi) {
            (Some(l), Some(h)) => {
                // n = 0 -> 1/2; then the odd numerators over 4, 8, ...
                let mut denom: i64 = 2;
                let mut k = n;
                loop {
                    let slots = (denom / 2) as usize;
                    if k < slots {
                        let t = Q::from_fraction(2 * k as i64 + 1, denom);
                        return l.clone() + (h.clone() - l.clone()) * t;
                    }
                    k -= slots;
                    denom *= 2;
                }
            }
            (Some(l), None) => l.clone() + half_line_step::<Q>(n),
            (None, Some(h)) => h.clone() - half_line_step::<Q>(n),
            (None, None) => {
                let k = n.div_ceil(2) as i64;
                Q::from_i64(if n % 2 == 1 { k } else { -k })
            }
        }
    }
}

fn half_line_step<Q: Scalar>(n: usize) -> Q {
    if n == 0 {
        return Q::one();
    }
    let e = n.div_ceil(2) as u32;
    let pow = Q::from_i64(1i64 << e.min(40));
    if n % 2 == 1 {
        pow
    } else {
        Q::one() / pow
    }
}

/// Points whose denominators carry `prime` to exactly `level`, placed near
/// the `variant`-th dyadic target.
#[derive(Clone, Copy, Debug)]
pub struct LevelPicker {
    pub prime: u64,
    pub level: u32,
    pub variant: usize,
}

impl<Q: Scalar> Picker<Q> for LevelPicker {
    fn pick(&self, lo: Option<&Q>, hi: Option<&Q>) -> Q {
        let target: Q = Dyadic(self.variant).pick(lo, hi);
        let lo2 = match lo {
            Some(l) => l.midpoint(&target),
            None => target.clone() - Q::one(),
        };
        let hi2 = match hi {
            Some(h) => h.midpoint(&target),
            None => target.clone() + Q::one(),
        };
        rational_with_level(Some(&lo2), Some(&hi2), self.prime, self.level)
    }
}

impl<Q: Scalar> Shape<Q> {
    /// Elements of the cell produced by `picker`, one per line the cell
    /// touches.
    pub fn sample(&self, picker: &dyn Picker<Q>) -> Vec<Point<Q>> {
        match self {
            Shape::Singleton(p) => vec![p.clone()],
            Shape::Interval { line, lo, hi } => {
                let q = picker.pick(lo.as_ref(), hi.as_ref());
                vec![match line {
                    Line::Rat => Point::Rat(q),
                    Line::Tier(t) => Point::Tier(*t, q),
                    Line::P2 => Point::Single(q),
                    Line::Fiber(n) => Point::Pair(n.clone(), q),
                }]
            }
            Shape::CrossTier { lo, hi } => vec![
                Point::Tier(Tier::Low, picker.pick(lo.as_ref(), None)),
                Point::Tier(Tier::High, picker.pick(None, hi.as_ref())),
            ],
            Shape::BaseBlock { lo, hi } => {
                vec![Point::Pair(picker.pick(lo.as_ref(), hi.as_ref()), picker.pick(None, None))]
            }
        }
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, Shape::Singleton(_))
    }
}

impl<Q: Scalar> Cell<Q> {
    pub fn representative(&self) -> Point<Q> {
        self.shape.sample(&Midpoint).swap_remove(0)
    }

    pub fn component(&self) -> Component<Q> {
        Component { lower: self.lower.clone(), upper: self.upper.clone(), sort: self.sort }
    }
}
