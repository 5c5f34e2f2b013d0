use thiserror::Error;

use crate::logic::parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("quantifier depth {depth} exceeds the budget of {budget}")]
    DepthBudget { depth: usize, budget: usize },
    #[error("expected at most {expected} free variable(s), found {found:?}")]
    FreeVariables { expected: usize, found: Vec<String> },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("point {point} is not in the universe of {structure}")]
    ForeignPoint { point: String, structure: String },
    #[error("unknown function symbol `{0}`")]
    UnknownFunction(String),
    #[error("type is inconsistent: {0}")]
    InconsistentType(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("theorem hypotheses unmet: {0}")]
    HypothesesUnmet(String),
    #[error("no admissible witness: {0}")]
    NoWitness(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
