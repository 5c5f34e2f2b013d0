//! Separability predicates on explicit finite hypergraphs.

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph<T: Ord> {
    #[serde(rename = "X")]
    pub atoms: BTreeSet<T>,
    #[serde(rename = "Y")]
    pub edges: Vec<BTreeSet<T>>,
}

/// Why a query is outside the domain of the definition. These are never
/// reported as a `false` verdict.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("edge {0} is not a subset of X")]
    EdgeOutsideX(String),
    #[error("{0} is not an atom of X")]
    UnknownAtom(String),
    #[error("the two elements coincide")]
    SameElement,
    #[error("{0} lies in Z, so separating it says nothing")]
    InZ(String),
    #[error("the sets overlap outside Z: {0}")]
    Overlap(String),
    #[error("{0} is contained in Z, so separating it says nothing")]
    SubsetOfZ(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T0<T: Ord> {
    pub verdict: bool,
    pub witness: Option<BTreeSet<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T2<T: Ord> {
    pub verdict: bool,
    pub witnesses: Option<(BTreeSet<T>, BTreeSet<T>)>,
}

impl<T: Ord + Clone + Debug> Hypergraph<T> {
    pub fn new(atoms: impl IntoIterator<Item = T>, edges: Vec<BTreeSet<T>>) -> Result<Self, Precondition> {
        let h = Hypergraph { atoms: atoms.into_iter().collect(), edges };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<(), Precondition> {
        for y in &self.edges {
            if !y.is_subset(&self.atoms) {
                return Err(Precondition::EdgeOutsideX(format!("{y:?}")));
            }
        }
        Ok(())
    }

    fn check_atoms<'a>(&self, xs: impl IntoIterator<Item = &'a T>) -> Result<(), Precondition>
    where
        T: 'a,
    {
        for x in xs {
            if !self.atoms.contains(x) {
                return Err(Precondition::UnknownAtom(format!("{x:?}")));
            }
        }
        Ok(())
    }

    /// Some edge `y` with `x1 ∈ y ∪ Z` and `x2 ∉ y`.
    pub fn t0_separable(&self, x1: &T, x2: &T, z: &BTreeSet<T>) -> Result<T0<T>, Precondition> {
        self.check_atoms([x1, x2].into_iter().chain(z))?;
        if x1 == x2 {
            return Err(Precondition::SameElement);
        }
        if z.contains(x2) {
            return Err(Precondition::InZ(format!("{x2:?}")));
        }
        let witness = self.edges.iter().find(|y| (y.contains(x1) || z.contains(x1)) && !y.contains(x2)).cloned();
        Ok(T0 { verdict: witness.is_some(), witness })
    }

    /// Edges `y1 ∋ x1`, `y2 ∋ x2` with `(y1 ∩ y2) \ Z = ∅`.
    pub fn t2_separable(&self, x1: &T, x2: &T, z: &BTreeSet<T>) -> Result<T2<T>, Precondition> {
        self.check_atoms([x1, x2].into_iter().chain(z))?;
        if x1 == x2 {
            return Err(Precondition::SameElement);
        }
        for x in [x1, x2] {
            if z.contains(x) {
                return Err(Precondition::InZ(format!("{x:?}")));
            }
        }
        let x1s = BTreeSet::from([x1.clone()]);
        let x2s = BTreeSet::from([x2.clone()]);
        Ok(self.twin_search(&x1s, &x2s, z))
    }

    /// Some edge `y` with `X1 ⊆ y ∪ Z` and `(X2 ∩ y) \ Z = ∅`.
    pub fn set_t0_separable(&self, x1: &BTreeSet<T>, x2: &BTreeSet<T>, z: &BTreeSet<T>) -> Result<T0<T>, Precondition> {
        self.check_atoms(x1.iter().chain(x2).chain(z))?;
        check_disjoint(x1, x2, z)?;
        if x2.is_subset(z) {
            return Err(Precondition::SubsetOfZ(format!("{x2:?}")));
        }
        let witness = self
            .edges
            .iter()
            .find(|y| covers(y, x1, z) && x2.iter().all(|x| !y.contains(x) || z.contains(x)))
            .cloned();
        Ok(T0 { verdict: witness.is_some(), witness })
    }

    /// Edges `y1, y2` with `X1 ⊆ y1 ∪ Z`, `X2 ⊆ y2 ∪ Z`, `(y1 ∩ y2) \ Z = ∅`.
    pub fn set_t2_separable(&self, x1: &BTreeSet<T>, x2: &BTreeSet<T>, z: &BTreeSet<T>) -> Result<T2<T>, Precondition> {
        self.check_atoms(x1.iter().chain(x2).chain(z))?;
        check_disjoint(x1, x2, z)?;
        for x in [x1, x2] {
            if x.is_subset(z) {
                return Err(Precondition::SubsetOfZ(format!("{x:?}")));
            }
        }
        Ok(self.twin_search(x1, x2, z))
    }

    fn twin_search(&self, x1: &BTreeSet<T>, x2: &BTreeSet<T>, z: &BTreeSet<T>) -> T2<T> {
        for y1 in self.edges.iter().filter(|y| covers(y, x1, z)) {
            for y2 in self.edges.iter().filter(|y| covers(y, x2, z)) {
                if y1.intersection(y2).all(|x| z.contains(x)) {
                    return T2 { verdict: true, witnesses: Some((y1.clone(), y2.clone())) };
                }
            }
        }
        T2 { verdict: false, witnesses: None }
    }
}

fn covers<T: Ord>(y: &BTreeSet<T>, xs: &BTreeSet<T>, z: &BTreeSet<T>) -> bool {
    xs.iter().all(|x| y.contains(x) || z.contains(x))
}

fn check_disjoint<T: Ord + Debug>(x1: &BTreeSet<T>, x2: &BTreeSet<T>, z: &BTreeSet<T>) -> Result<(), Precondition> {
    let shared: Vec<&T> = x1.intersection(x2).filter(|x| !z.contains(x)).collect();
    if shared.is_empty() {
        Ok(())
    } else {
        Err(Precondition::Overlap(format!("{shared:?}")))
    }
}
