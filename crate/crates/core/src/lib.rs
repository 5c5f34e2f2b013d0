//! Separability of elements and sets in hypergraphs of elementary
//! submodels, decided by algebraic-closure criteria and witnessed by staged
//! submodel constructions over three computable ordered structures.
//!
//! Everything is generic over an exact ordered-field [`Scalar`]; the
//! aliases below fix it to arbitrary-precision rationals.

pub mod catalog;
pub mod closure;
pub mod error;
pub mod hypergraph;
pub mod logic;
pub mod modelbuilder;
pub mod scalar;
pub mod separability;

pub use catalog::definable::{Component, Cut, DefinableSet};
pub use catalog::point::{Sort, Tier};
pub use catalog::types::{Presentation, TypeFamily};
pub use catalog::{Flags, StructureHandle, StructureId};
pub use closure::{ClosureKind, ClosureSet, ZSpec};
pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use modelbuilder::{BuildOptions, ClosedForm, SubmodelDescription, TvReport, TvStatus};
pub use logic::{format_formula, parse_formula, ParseError, Signature};
pub use scalar::Scalar;
pub use separability::{HypergraphClass, Mode, SeparabilityQuery, Verdict};

/// The exact rationals every front end uses.
pub type Rational = num_rational::BigRational;
pub type Point = catalog::point::Point<Rational>;
pub type Formula = logic::Formula<Rational>;
pub type Term = logic::Term<Rational>;
pub type Binding = logic::Binding<Rational>;
pub type Set = DefinableSet<Rational>;
pub type TypeDescriptor = catalog::types::TypeDescriptor<Rational>;
pub type Automorphism = catalog::automorphism::Automorphism<Rational>;
