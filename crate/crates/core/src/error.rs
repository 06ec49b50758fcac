use thiserror::Error;

use crate::automaton::Flavor;
use crate::svfa::DecisionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed automaton: {0}")]
    Malformed(String),

    #[error("configuration ({state}, {head}) is not on a tape of length {len}")]
    InvalidConfiguration {
        state: usize,
        head: usize,
        len: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("declared type `{declared}` does not fit the transition table ({reason})")]
    FlavorMismatch { declared: Flavor, reason: String },

    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),

    #[error("operation does not apply: {0}")]
    NotApplicable(&'static str),

    #[error("automaton makes a nondeterministic choice on an input letter (state {state}, letter {letter:?})")]
    NotOuter { state: String, letter: char },

    #[error("automaton is not in normal form: {0}")]
    NotNormalForm(String),

    #[error(transparent)]
    Trace(#[from] TraceError),

    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded {
        budget: u64,
        partial: Box<DecisionReport>,
    },

    #[error("materialized machine would need up to {bound} states (ceiling {ceiling})")]
    TooLarge { bound: u128, ceiling: u128 },
}

/// Failures while replaying a [`ChoiceTrace`](crate::trace::ChoiceTrace).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace exhausted at choice point {position} ({arity} options)")]
    Underflow { position: usize, arity: usize },

    #[error("choice {choice} at point {position} is out of range ({arity} options)")]
    OutOfRange {
        position: usize,
        choice: usize,
        arity: usize,
    },
}
