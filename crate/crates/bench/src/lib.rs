//! Shared inputs for the benchmarks.

use endmark::random::normal_form_corpus;
use endmark::{TwoWayAutomaton, Word};

/// A fixed set of normal-form machines with `n ≤ 5` over two letters.
pub fn machines(count: usize) -> Vec<TwoWayAutomaton> {
    normal_form_corpus(0xBE7C4, count, 5, 2, false)
        .into_iter()
        .filter(|a| a.sole_accepting() != Some(a.initial()))
        .collect()
}

/// `len` copies of the first letter.
pub fn word_of_a(len: usize) -> Word {
    Word::new(vec![0; len])
}
