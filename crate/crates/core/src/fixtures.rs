//! Small machines used throughout the examples and tests.

use crate::automaton::{AutomatonBuilder, Direction, Flavor, StateId, Symbol, TwoWayAutomaton};

use Direction::{Left, Right, Stay};

/// Outer-nondeterministic machine for `a* ∪ b*` in normal form.
///
/// From `qI` it branches at `⊢` into `pa` and `pb`; each branch sweeps right
/// over its own letter, sweeps back in `ra` or `rb`, and accepts at `⊢`.
pub fn e1() -> TwoWayAutomaton {
    e1_builder().build().expect("E1 is well formed")
}

/// [`e1`] with `qI` universal, so both branches must succeed.
///
/// Accepts only the empty word.
pub fn e2() -> TwoWayAutomaton {
    let mut b = e1_builder();
    b.universal(StateId(0)).flavor(Flavor::Oafa);
    b.build().expect("E2 is well formed")
}

/// The single-branch restriction of [`e1`]: states `qI, pa, ra, qF`, accepting `a*`.
pub fn ea() -> TwoWayAutomaton {
    let mut b = AutomatonBuilder::new(['a', 'b']);
    let qi = b.add_state("qI");
    let pa = b.add_state("pa");
    let ra = b.add_state("ra");
    let qf = b.add_state("qF");
    b.initial(qi).accept(qf).flavor(Flavor::Onfa);
    b.transition(qi, Symbol::LeftEnd, pa, Right);
    b.transition(pa, Symbol::Letter(0), pa, Right);
    b.transition(pa, Symbol::RightEnd, ra, Left);
    b.transition(ra, Symbol::Letter(0), ra, Left);
    b.transition(ra, Symbol::LeftEnd, qf, Stay);
    b.build().expect("Ea is well formed")
}

/// Outer-nondeterministic machine with a choice at `⊣`, not in normal form.
///
/// Scans right in `s`; at `⊣` it guesses whether to check for `a*`
/// (state `ca`) or `b*` (state `cb`) while sweeping left, and enters the
/// final state `f` at `⊢` by a stationary move. Accepts `a* ∪ b*`.
pub fn right_choice() -> TwoWayAutomaton {
    let mut b = AutomatonBuilder::new(['a', 'b']);
    let s = b.add_state("s");
    let ca = b.add_state("ca");
    let cb = b.add_state("cb");
    let f = b.add_state("f");
    b.initial(s).accept(f).flavor(Flavor::Onfa);
    b.transition(s, Symbol::LeftEnd, s, Right);
    b.transition(s, Symbol::Letter(0), s, Right);
    b.transition(s, Symbol::Letter(1), s, Right);
    b.transition(s, Symbol::RightEnd, ca, Left);
    b.transition(s, Symbol::RightEnd, cb, Left);
    b.transition(ca, Symbol::Letter(0), ca, Left);
    b.transition(cb, Symbol::Letter(1), cb, Left);
    b.transition(ca, Symbol::LeftEnd, f, Stay);
    b.transition(cb, Symbol::LeftEnd, f, Stay);
    b.build().expect("right_choice is well formed")
}

/// The two-state machine with no transitions; it accepts nothing.
pub fn trivial() -> TwoWayAutomaton {
    let mut b = AutomatonBuilder::new(['a', 'b']);
    let qi = b.add_state("qI");
    let qf = b.add_state("qF");
    b.initial(qi).accept(qf).flavor(Flavor::Onfa);
    b.build().expect("trivial machine is well formed")
}

fn e1_builder() -> AutomatonBuilder {
    let mut b = AutomatonBuilder::new(['a', 'b']);
    let qi = b.add_state("qI");
    let pa = b.add_state("pa");
    let pb = b.add_state("pb");
    let ra = b.add_state("ra");
    let rb = b.add_state("rb");
    let qf = b.add_state("qF");
    b.initial(qi).accept(qf).flavor(Flavor::Onfa);
    b.transition(qi, Symbol::LeftEnd, pa, Right);
    b.transition(qi, Symbol::LeftEnd, pb, Right);
    for (p, r, letter) in [(pa, ra, 0), (pb, rb, 1)] {
        b.transition(p, Symbol::Letter(letter), p, Right);
        b.transition(p, Symbol::RightEnd, r, Left);
        b.transition(r, Symbol::Letter(letter), r, Left);
        b.transition(r, Symbol::LeftEnd, qf, Stay);
    }
    b
}
