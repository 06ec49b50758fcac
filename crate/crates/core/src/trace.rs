//! Replayable sequences of nondeterministic choices.

use std::fmt;

use crate::error::TraceError;

/// One entry per choice point, in the order the choice points are met.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChoiceTrace(Vec<usize>);

impl ChoiceTrace {
    pub fn new(choices: Vec<usize>) -> Self {
        ChoiceTrace(choices)
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, choice: usize) {
        self.0.push(choice);
    }

    pub fn cursor(&self) -> TraceCursor<'_> {
        TraceCursor {
            trace: &self.0,
            position: 0,
        }
    }
}

impl From<Vec<usize>> for ChoiceTrace {
    fn from(v: Vec<usize>) -> Self {
        ChoiceTrace(v)
    }
}

impl fmt::Display for ChoiceTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// Reads a trace front to back, validating each entry against its arity.
#[derive(Debug)]
pub struct TraceCursor<'a> {
    trace: &'a [usize],
    position: usize,
}

impl TraceCursor<'_> {
    /// Consumes the next entry, which must be below `arity`.
    pub fn choose(&mut self, arity: usize) -> Result<usize, TraceError> {
        let position = self.position;
        let &choice = self
            .trace
            .get(position)
            .ok_or(TraceError::Underflow { position, arity })?;
        if choice >= arity {
            return Err(TraceError::OutOfRange {
                position,
                choice,
                arity,
            });
        }
        self.position += 1;
        Ok(choice)
    }

    /// Number of entries consumed so far.
    pub fn consumed(&self) -> usize {
        self.position
    }

    pub fn is_exhausted(&self) -> bool {
        self.position == self.trace.len()
    }
}

/// Enumerates every complete trace of a procedure depth first, extending a
/// prefix whenever the procedure runs out of choices.
///
/// `visit` receives each complete trace with the procedure's outcome.
/// Returns `None` if more than `budget` runs would be needed.
pub fn enumerate<T, E>(
    budget: u64,
    mut run: impl FnMut(&ChoiceTrace) -> Result<T, E>,
    mut visit: impl FnMut(&ChoiceTrace, T),
) -> Result<Option<u64>, E>
where
    E: AsUnderflow,
{
    let mut stack = vec![ChoiceTrace::default()];
    let mut runs = 0u64;
    while let Some(trace) = stack.pop() {
        runs += 1;
        if runs > budget {
            return Ok(None);
        }
        match run(&trace) {
            Ok(outcome) => visit(&trace, outcome),
            Err(e) => match e.as_underflow() {
                Some(arity) => {
                    for c in (0..arity).rev() {
                        let mut next = trace.clone();
                        next.push(c);
                        stack.push(next);
                    }
                }
                None => return Err(e),
            },
        }
    }
    Ok(Some(runs))
}

/// Errors that may signal an exhausted trace.
pub trait AsUnderflow {
    /// The arity of the pending choice point, if the error is an underflow.
    fn as_underflow(&self) -> Option<usize>;
}

impl AsUnderflow for TraceError {
    fn as_underflow(&self) -> Option<usize> {
        match *self {
            TraceError::Underflow { arity, .. } => Some(arity),
            TraceError::OutOfRange { .. } => None,
        }
    }
}

impl AsUnderflow for crate::error::Error {
    fn as_underflow(&self) -> Option<usize> {
        match self {
            crate::error::Error::Trace(t) => t.as_underflow(),
            _ => None,
        }
    }
}
