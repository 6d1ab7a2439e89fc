//! Functor kinds, systems and the per-kind evaluation of successor structures.

mod coalgebra;
mod functor;
mod json;
mod key;
mod weight;

pub use coalgebra::{Coalgebra, Row, StateId};
pub use functor::{FunctorKind, DFA_FINAL, DFA_NONFINAL};
pub use json::{from_value, parse_coalgebra};
pub use key::{F1Key, F2Key, F3Key, Key};
pub use weight::{is_probability, json_rational, parse_rational, rat, rational_string, Monoid, Weight};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("{path}: unknown functor kind {kind:?}")]
    UnknownKind { path: String, kind: String },
    #[error("{path}: unknown state {name:?}")]
    Dangling { path: String, name: String },
    #[error("{path}: distribution sums to {sum}, expected 1")]
    NotNormalized { path: String, sum: String },
    #[error("{path}: arity mismatch, expected {expected} arguments, found {found}")]
    Arity { path: String, expected: usize, found: usize },
    #[error("{path}: missing transition for letter {letter:?}")]
    MissingLetter { path: String, letter: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("functor kind {0} is not cancellative")]
    NotCancellative(String),
}

impl ModelError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Invalid { path: path.into(), message: message.into() }
    }
}
