//! Choosing a realization of a consistent formula whose closure, together
//! with the parameters and `Z`, stays clear of a forbidden set modulo `Z`.

use serde::{Deserialize, Serialize};

use super::closed_form::ClosedForm;
use crate::catalog::point::Point;
use crate::catalog::StructureHandle;
use crate::closure::{overlap, ClosureSet, ZSpec};
use crate::error::{Error, Result};
use crate::logic::{Binding, Formula};
use crate::scalar::Scalar;

/// Interior candidates tried per open cell.
const INTERIOR_TRIES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    /// A solution already in `Z`.
    InZ,
    /// An interior point of an infinite component.
    Interior,
    /// An isolated solution.
    Isolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "Q: Scalar")]
pub struct WitnessChoice<Q> {
    pub formula: String,
    pub params: Vec<Point<Q>>,
    pub chosen: Point<Q>,
    pub case: WitnessCase,
    pub avoided: Vec<Point<Q>>,
    #[serde(default)]
    pub avoided_all_constants: bool,
    pub z: String,
    /// Listed part of `acl(params, chosen, Z)`.
    pub closure: Vec<Point<Q>>,
    /// `(closure ∩ avoided) \ Z = ∅`.
    pub check: bool,
}

impl<Q: Scalar> WitnessChoice<Q> {
    /// Re-verifies the choice: the witness satisfies the formula and the
    /// closure check holds.
    pub fn reverify(&self, s: &StructureHandle, forbidden: &ClosureSet<Q>, z: &ZSpec<Q>) -> Result<bool> {
        let phi = crate::logic::parse_formula::<Q>(&self.formula, &s.signature)?;
        let var = phi.free_variables();
        let mut b = Binding::new();
        if let Some(v) = var.first() {
            b.insert(v.clone(), self.chosen.clone());
        }
        let sat = s.satisfies(&phi, &b)?;
        Ok(sat && clear(s, &self.params, &self.chosen, forbidden, z))
    }
}

fn closure_with<Q: Scalar>(s: &StructureHandle, params: &[Point<Q>], c: Option<&Point<Q>>, z: &ZSpec<Q>) -> ClosureSet<Q> {
    let mut base = params.to_vec();
    base.extend(c.cloned());
    s.acl_with(&base, z)
}

fn clear<Q: Scalar>(s: &StructureHandle, params: &[Point<Q>], c: &Point<Q>, forbidden: &ClosureSet<Q>, z: &ZSpec<Q>) -> bool {
    let zs = z.resolve(s);
    overlap(&closure_with(s, params, Some(c), z), forbidden, &zs).is_empty()
}

/// Picks `c` with `phi(c)` and `(acl(params c Z) ∩ forbidden) \ Z = ∅`.
///
/// `phi` has one free variable and mentions its parameters as literals;
/// `params` lists them (the literals of `phi` when empty). When `hint` is
/// given the witness is also required to lie in it. Preference: a solution
/// in `Z`, then an interior point of the widest infinite component, then an
/// isolated solution.
pub fn choose_witness<Q: Scalar>(
    s: &StructureHandle,
    phi: &Formula<Q>,
    params: &[Point<Q>],
    forbidden: &ClosureSet<Q>,
    z: &ZSpec<Q>,
    hint: Option<&ClosedForm<Q>>,
) -> Result<WitnessChoice<Q>> {
    let params: Vec<Point<Q>> = if params.is_empty() { phi.params() } else { params.to_vec() };
    let zs = z.resolve(s);
    let before = overlap(&closure_with(s, &params, None, z), forbidden, &zs);
    if !before.is_empty() {
        return Err(Error::Precondition(format!(
            "parameters already reach the forbidden set: {}",
            before.witnesses().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    let set = s.definable_set(phi, &Binding::new())?;
    if set.is_empty() {
        return Err(Error::Precondition(format!("{phi} is inconsistent")));
    }
    let allowed = |p: &Point<Q>| hint.is_none_or(|h| h.contains(p));
    let accept = |p: &Point<Q>, case: WitnessCase| -> Option<WitnessChoice<Q>> {
        if !set.contains(p) || !allowed(p) {
            return None;
        }
        let closure = closure_with(s, &params, Some(p), z);
        overlap(&closure, forbidden, &zs).is_empty().then(|| WitnessChoice {
            formula: phi.to_string(),
            params: params.clone(),
            chosen: p.clone(),
            case,
            avoided: forbidden.listed().cloned().collect(),
            avoided_all_constants: forbidden.intensional_constants,
            z: z.describe(),
            closure: closure.listed().cloned().collect(),
            check: true,
        })
    };

    // Solutions already in Z.
    for p in zs.listed() {
        if let Some(w) = accept(p, WitnessCase::InZ) {
            return Ok(w);
        }
    }
    if zs.intensional_constants {
        for comp in &set.components {
            if let Some(c) = s.first_constant_in(comp) {
                if let Some(w) = accept(&c, WitnessCase::InZ) {
                    return Ok(w);
                }
            }
        }
    }

    // Interior points, widest component first.
    let mut infinite: Vec<_> = set.components.iter().filter(|c| c.as_singleton().is_none()).collect();
    infinite.sort_by_key(|c| std::cmp::Reverse(s.width(c)));
    for comp in infinite {
        let cells = s.component_cells(comp);
        for n in 0..INTERIOR_TRIES {
            let picker: Box<dyn crate::catalog::definable::Picker<Q>> = match hint {
                Some(h) => h.picker(n),
                None => Box::new(crate::catalog::definable::Dyadic(n)),
            };
            for cell in cells.iter().filter(|c| !c.shape.is_singleton()) {
                for p in cell.shape.sample(picker.as_ref()) {
                    if let Some(w) = accept(&p, WitnessCase::Interior) {
                        return Ok(w);
                    }
                }
            }
        }
    }

    // Isolated solutions.
    for p in set.isolated_points() {
        if let Some(w) = accept(p, WitnessCase::Isolated) {
            return Ok(w);
        }
    }

    Err(Error::NoWitness(format!(
        "{phi}: solution set {:?}, params [{}], forbidden [{}], Z = {}",
        set.components,
        params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "),
        forbidden.listed().map(|p| p.to_string()).collect::<Vec<_>>().join(", "),
        z.describe()
    )))
}
