//! Two-way finite automata whose nondeterministic or alternating choices are
//! confined to the tape endmarkers.
//!
//! The crate provides the automaton model with brute-force oracles, the
//! normal-form conversions, a deterministic backward-search controller for
//! detecting computation segments, a self-verifying inductive-counting
//! simulation, a divide-and-conquer deterministic simulation, and reductions
//! to (alternating) graph accessibility.
//!
//! ```
//! use endmark::{fixtures, oracle, divide};
//!
//! let e1 = fixtures::e1();
//! let w = e1.word("aa").unwrap();
//! assert!(oracle::accepts(&e1, &w).unwrap());
//! assert!(divide::decide_det(&e1, &w).unwrap());
//! ```

pub mod automaton;
pub mod divide;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod normal_form;
pub mod oracle;
pub mod random;
pub mod reach;
pub mod svfa;
pub mod trace;

pub use automaton::{
    AutomatonBuilder, Configuration, Direction, Flavor, FlavorReport, StateId, Symbol, Transition,
    TwoWayAutomaton, Word,
};
pub use error::{Error, Result, TraceError};
pub use normal_form::NormalFormReport;
pub use reach::ReachController;
pub use svfa::{DecisionReport, Verdict};
pub use trace::ChoiceTrace;
