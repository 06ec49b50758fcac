//! Seeded generators for test corpora.
//!
//! Every generator draws from a ChaCha stream, so a seed fixes the corpus on
//! every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{
    AutomatonBuilder, Direction, Flavor, FlavorReport, StateId, Symbol, TwoWayAutomaton,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn alphabet(letters: usize) -> Vec<char> {
    ('a'..='z').take(letters).collect()
}

fn builder(n: usize, letters: usize) -> AutomatonBuilder {
    let mut b = AutomatonBuilder::new(alphabet(letters));
    for i in 0..n {
        b.add_state(format!("q{i}"));
    }
    b.initial(StateId(0));
    b
}

fn symbols(letters: usize) -> Vec<Symbol> {
    (0..letters + 2)
        .map(|i| Symbol::from_index(i, letters))
        .collect()
}

fn allowed(symbol: Symbol) -> &'static [Direction] {
    match symbol {
        Symbol::LeftEnd => &[Direction::Stay, Direction::Right],
        Symbol::RightEnd => &[Direction::Left, Direction::Stay],
        Symbol::Letter(_) => &[Direction::Left, Direction::Stay, Direction::Right],
    }
}

/// The most specific flavor that admits `report`.
pub fn tightest_flavor(report: &FlavorReport) -> Flavor {
    match (
        report.is_alternating,
        report.is_outer,
        report.is_deterministic,
    ) {
        (true, true, _) => Flavor::Oafa,
        (true, false, _) => Flavor::Afa,
        (false, _, true) => Flavor::Dfa,
        (false, true, false) => Flavor::Onfa,
        (false, false, false) => Flavor::Nfa,
    }
}

/// A raw outer machine: at most one move per state and letter, up to three
/// moves on each endmarker, random accepting states.
pub fn outer_machine(
    rng: &mut impl Rng,
    n: usize,
    letters: usize,
    universal: bool,
) -> TwoWayAutomaton {
    let mut b = builder(n, letters);
    for symbol in symbols(letters) {
        for q in (0..n).map(StateId) {
            let count = match symbol {
                Symbol::Letter(_) => usize::from(rng.gen_bool(0.85)),
                _ => rng.gen_range(0..=3),
            };
            for _ in 0..count {
                let to = StateId(rng.gen_range(0..n));
                b.transition(q, symbol, to, *allowed(symbol).choose(rng).unwrap());
            }
        }
    }
    for q in (0..n).map(StateId) {
        if rng.gen_bool(0.3) {
            b.accept(q);
        }
    }
    if universal {
        b.declare_universal();
        for q in (0..n).map(StateId) {
            if rng.gen_bool(0.5) {
                b.universal(q);
            }
        }
        b.flavor(Flavor::Oafa);
    } else {
        b.flavor(Flavor::Onfa);
    }
    b.build().expect("generated machine is well formed")
}

/// `count` raw outer nondeterministic machines with `1..=max_states` states.
pub fn onfa_corpus(
    seed: u64,
    count: usize,
    max_states: usize,
    letters: usize,
) -> Vec<TwoWayAutomaton> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_states);
            outer_machine(&mut r, n, letters, false)
        })
        .collect()
}

/// `count` raw outer alternating machines with `1..=max_states` states.
pub fn oafa_corpus(
    seed: u64,
    count: usize,
    max_states: usize,
    letters: usize,
) -> Vec<TwoWayAutomaton> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_states);
            outer_machine(&mut r, n, letters, true)
        })
        .collect()
}

/// A machine already in normal form with `qI = q0` and `qF = q(n−1)`.
///
/// Letters and `⊣` get at most one non-stationary move into a non-final
/// state; `⊢` gets up to three moves, each either rightward into a non-final
/// state or stationary into `qF`. With `universal` set the stationary moves
/// at `⊢` may also enter other states and some states become universal.
pub fn normal_form_machine(
    rng: &mut impl Rng,
    n: usize,
    letters: usize,
    universal: bool,
) -> TwoWayAutomaton {
    assert!(n >= 2);
    let mut b = builder(n, letters);
    let qf = StateId(n - 1);
    b.accept(qf);
    let non_final = |rng: &mut dyn rand::RngCore| StateId(rng.gen_range(0..n - 1));
    for q in (0..n - 1).map(StateId) {
        for symbol in symbols(letters) {
            match symbol {
                Symbol::LeftEnd => {
                    for _ in 0..rng.gen_range(0..=3) {
                        let (to, dir) = match rng.gen_range(0..4) {
                            0 => (qf, Direction::Stay),
                            1 if universal => (non_final(rng), Direction::Stay),
                            _ => (non_final(rng), Direction::Right),
                        };
                        b.transition(q, symbol, to, dir);
                    }
                }
                Symbol::RightEnd => {
                    if rng.gen_bool(0.9) {
                        b.transition(q, symbol, non_final(rng), Direction::Left);
                    }
                }
                Symbol::Letter(_) => {
                    if rng.gen_bool(0.9) {
                        let dir = if rng.gen_bool(0.5) {
                            Direction::Left
                        } else {
                            Direction::Right
                        };
                        b.transition(q, symbol, non_final(rng), dir);
                    }
                }
            }
        }
    }
    if universal {
        b.declare_universal();
        for q in (0..n - 1).map(StateId) {
            if rng.gen_bool(0.5) {
                b.universal(q);
            }
        }
        b.flavor(Flavor::Oafa);
    } else {
        b.flavor(Flavor::Onfa);
    }
    b.build().expect("generated machine is well formed")
}

/// `count` normal-form machines with `2..=max_states` states.
pub fn normal_form_corpus(
    seed: u64,
    count: usize,
    max_states: usize,
    letters: usize,
    universal: bool,
) -> Vec<TwoWayAutomaton> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(2..=max_states);
            normal_form_machine(&mut r, n, letters, universal)
        })
        .collect()
}

/// An unrestricted machine with random optional declarations, for format
/// round trips.
pub fn any_machine(rng: &mut impl Rng, max_states: usize, max_letters: usize) -> TwoWayAutomaton {
    let n = rng.gen_range(1..=max_states);
    let letters = rng.gen_range(0..=max_letters);
    let mut b = builder(n, letters);
    b.initial(StateId(rng.gen_range(0..n)));
    for symbol in symbols(letters) {
        for q in (0..n).map(StateId) {
            for _ in 0..rng.gen_range(0..=2) {
                let to = StateId(rng.gen_range(0..n));
                b.transition(q, symbol, to, *allowed(symbol).choose(rng).unwrap());
            }
        }
    }
    let mut roles: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    roles.shuffle(rng);
    if rng.gen_bool(0.3) {
        b.declare_rejecting();
    }
    for (i, role) in roles.iter().enumerate() {
        match role {
            1 => {
                b.accept(StateId(i));
            }
            2 if rng.gen_bool(0.5) => {
                b.reject(StateId(i));
            }
            _ => {}
        }
    }
    if rng.gen_bool(0.3) {
        b.declare_universal();
        for q in (0..n).map(StateId) {
            if rng.gen_bool(0.4) {
                b.universal(q);
            }
        }
    }
    let draft = b.clone().build().expect("generated machine is well formed");
    b.flavor(tightest_flavor(&draft.classify()));
    b.build().expect("generated machine is well formed")
}

/// Flips one transition of `a`, returning the mutated machine. The change
/// redirects the first transition of a random state and symbol, or adds one
/// where none exists.
pub fn mutate(rng: &mut impl Rng, a: &TwoWayAutomaton) -> TwoWayAutomaton {
    let mut b = AutomatonBuilder::new(a.alphabet().iter().copied());
    for name in a.names() {
        b.add_state(name.clone());
    }
    b.initial(a.initial());
    for &q in a.accepting() {
        b.accept(q);
    }
    if let Some(r) = a.rejecting() {
        b.declare_rejecting();
        for &q in r {
            b.reject(q);
        }
    }
    if let Some(u) = a.universal() {
        b.declare_universal();
        for &q in u {
            b.universal(q);
        }
    }
    let q = StateId(rng.gen_range(0..a.state_count()));
    let symbol = Symbol::from_index(rng.gen_range(0..a.letter_count() + 2), a.letter_count());
    let dirs = allowed(symbol);
    let replacement = (
        StateId(rng.gen_range(0..a.state_count())),
        *dirs.choose(rng).unwrap(),
    );
    let mut changed = false;
    for (p, s, t) in a.transitions() {
        if p == q && s == symbol && !changed {
            changed = true;
            if (t.target, t.direction) != replacement {
                b.transition(p, s, replacement.0, replacement.1);
            } else {
                let other = dirs.iter().copied().find(|&d| d != t.direction).unwrap();
                b.transition(p, s, t.target, other);
            }
        } else {
            b.transition(p, s, t.target, t.direction);
        }
    }
    if !changed {
        b.transition(q, symbol, replacement.0, replacement.1);
    }
    let draft = b
        .clone()
        .build()
        .expect("mutation keeps the machine well formed");
    let flavor = if a.flavor().admits(&draft.classify()) {
        a.flavor()
    } else {
        tightest_flavor(&draft.classify())
    };
    b.flavor(flavor);
    b.build().expect("mutation keeps the machine well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::check_normal_form;

    #[test]
    fn corpora_are_reproducible() {
        assert_eq!(onfa_corpus(7, 20, 5, 2), onfa_corpus(7, 20, 5, 2));
        assert_ne!(onfa_corpus(7, 20, 5, 2), onfa_corpus(8, 20, 5, 2));
    }

    #[test]
    fn outer_corpus_is_outer() {
        for a in onfa_corpus(1, 100, 5, 2) {
            let r = a.classify();
            assert!(r.is_outer && !r.is_alternating);
        }
        for a in oafa_corpus(1, 100, 4, 2) {
            assert!(a.classify().is_outer);
        }
    }

    #[test]
    fn normal_form_corpus_holds() {
        for a in normal_form_corpus(3, 100, 5, 2, false) {
            assert!(check_normal_form(&a, false).holds(), "{a:?}");
        }
        for a in normal_form_corpus(3, 100, 4, 2, true) {
            assert!(check_normal_form(&a, true).holds(), "{a:?}");
        }
    }

    #[test]
    fn mutation_changes_the_table() {
        let mut r = rng(11);
        for a in onfa_corpus(2, 50, 4, 2) {
            let m = mutate(&mut r, &a);
            assert_ne!(m, a);
        }
    }
}
