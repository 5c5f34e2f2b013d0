//! Complete 1-types over the empty set.

use serde::Serialize;

use super::definable::{Cut, Dyadic, Midpoint, Picker};
use super::point::Point;
use super::{StructureHandle, StructureId};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Binding, Formula};
use crate::scalar::Scalar;

/// How a type is presented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation<Q> {
    /// A single formula in `x` whose solution set is exactly the type's
    /// realizations.
    Formula(Formula<Q>),
    /// EHR: `{c_i < x : i in N}`, not implied by any single formula.
    AboveAllConstants,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct TypeDescriptor<Q> {
    pub name: String,
    #[serde(serialize_with = "serialize_presentation")]
    pub presentation: Presentation<Q>,
    pub isolated: bool,
    pub realization: Option<Point<Q>>,
}

fn serialize_presentation<Q: Scalar, S: serde::Serializer>(p: &Presentation<Q>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Presentation::Formula(phi) => s.serialize_str(&phi.to_string()),
        Presentation::AboveAllConstants => s.serialize_str("{c_i < x : i in N}"),
    }
}

impl<Q: Scalar> TypeDescriptor<Q> {
    pub fn formula(&self) -> Option<&Formula<Q>> {
        match &self.presentation {
            Presentation::Formula(phi) => Some(phi),
            Presentation::AboveAllConstants => None,
        }
    }
}

/// Isolated 1-types over the empty set. For EHR the family is infinite and
/// only the first `prefix` constants contribute; `complete` says whether the
/// list is the whole family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "Q: Scalar")]
pub struct TypeFamily<Q> {
    pub types: Vec<TypeDescriptor<Q>>,
    pub complete: bool,
    pub non_isolated: Vec<TypeDescriptor<Q>>,
}

impl StructureHandle {
    pub fn list_isolated_1types<Q: Scalar>(&self, prefix: usize) -> TypeFamily<Q> {
        let make = |name: &str, text: &str, real: Point<Q>| TypeDescriptor {
            name: name.to_string(),
            presentation: Presentation::Formula(parse_formula(text, &self.signature).expect("catalog formula parses")),
            isolated: true,
            realization: Some(real),
        };
        match self.id {
            StructureId::Dlo => TypeFamily {
                types: vec![make("p", "x = x", Point::Rat(Q::zero()))],
                complete: true,
                non_isolated: vec![],
            },
            StructureId::Ex1 => TypeFamily {
                types: vec![
                    make("p1", "P1(x)", Point::Pair(Q::zero(), Q::zero())),
                    make("p2", "P2(x)", Point::Single(Q::zero())),
                ],
                complete: true,
                non_isolated: vec![],
            },
            StructureId::Ehr => {
                let mut types = vec![make("below_c0", "x < c0", Point::low(-Q::one()))];
                for i in 0..prefix {
                    let q = Q::from_i64(i as i64);
                    types.push(make(&format!("at_c{i}"), &format!("x = c{i}"), Point::low(q.clone())));
                    types.push(make(
                        &format!("between_c{i}_c{}", i + 1),
                        &format!("c{i} < x and x < c{}", i + 1),
                        Point::low(q + Q::from_fraction(1, 2)),
                    ));
                }
                TypeFamily {
                    types,
                    complete: false,
                    non_isolated: vec![TypeDescriptor {
                        name: "above_all_constants".into(),
                        presentation: Presentation::AboveAllConstants,
                        isolated: false,
                        realization: Some(Point::high(Q::zero())),
                    }],
                }
            }
        }
    }

    /// An element satisfying every formula of the presentation.
    pub fn realize<Q: Scalar>(&self, t: &TypeDescriptor<Q>) -> Result<Point<Q>> {
        match &t.presentation {
            Presentation::AboveAllConstants => {
                if self.id != StructureId::Ehr {
                    return Err(Error::InconsistentType(format!("{} has no constants", self.id)));
                }
                Ok(Point::high(Q::zero()))
            }
            Presentation::Formula(phi) => self.realize_formula(phi),
        }
    }

    /// An element of the widest component of the formula's solution set,
    /// chosen by midpoint.
    pub fn realize_formula<Q: Scalar>(&self, phi: &Formula<Q>) -> Result<Point<Q>> {
        let set = self.definable_set(phi, &Binding::new())?;
        let widest = set
            .components
            .iter()
            .max_by(|a, b| self.width(a).cmp(&self.width(b)))
            .ok_or_else(|| Error::InconsistentType(phi.to_string()))?;
        let cells = self.component_cells(widest);
        let pick = cells.iter().find(|c| !c.shape.is_singleton()).or(cells.first()).expect("component has cells");
        Ok(pick.shape.sample(&Midpoint).swap_remove(0))
    }

    /// Saturation spot check for a finitely presented cut `lower < x <
    /// upper` over a finite set: is it realized, and by what?
    pub fn realize_cut<Q: Scalar>(&self, lower: &Cut<Q>, upper: &Cut<Q>) -> Option<Point<Q>> {
        let mut anchors = Vec::new();
        anchors.extend(lower.anchor());
        anchors.extend(upper.anchor());
        for cell in self.cells(anchors) {
            for n in 0..4 {
                for p in cell.shape.sample(&Dyadic(n) as &dyn Picker<Q>) {
                    if lower.locate(&p) == std::cmp::Ordering::Greater && upper.locate(&p) == std::cmp::Ordering::Less {
                        return Some(p);
                    }
                }
            }
        }
        None
    }
}
