//! Conversion to the endmarker normal form and its structural check.
//!
//! A machine in normal form
//!
//! 1. branches only while scanning `⊢`,
//! 2. has a unique accepting state `qF`, which is halting,
//! 3. enters `qF` only at `⊢`, by a stationary move,
//! 4. makes stationary moves only at `⊢` (and, without alternation, only into `qF`).
//!
//! The conversion uses at most `3n` states: the non-final originals, a
//! leftward copy `q.back` for each state whose `⊣` move has to be deferred
//! (or whose entry means acceptance), a rightward copy `p.fwd` for each
//! non-final target of a deferred `⊣` move, and `qF`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::automaton::{AutomatonBuilder, Direction, Flavor, StateId, Symbol, TwoWayAutomaton};
use crate::error::{Error, Result};

use Direction::{Left, Right, Stay};

/// Which of the four normal-form properties hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub property1: bool,
    pub property2: bool,
    pub property3: bool,
    pub property4: bool,
    pub state_count: usize,
    /// State count of the machine the checked one was converted from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_states: Option<usize>,
    /// `3 ×` the source state count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_3n: Option<usize>,
}

impl NormalFormReport {
    pub fn holds(&self) -> bool {
        self.property1 && self.property2 && self.property3 && self.property4
    }

    /// Records the machine this one was derived from.
    pub fn with_source(mut self, source_states: usize) -> Self {
        self.source_states = Some(source_states);
        self.bound_3n = Some(3 * source_states);
        self
    }

    /// Names of the properties that fail.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.property1, "choices outside the left endmarker"),
            (self.property2, "no unique halting accepting state"),
            (
                self.property3,
                "accepting state entered other than by a stationary move at the left endmarker",
            ),
            (
                self.property4,
                "stationary move outside the left endmarker or into a non-accepting state",
            ),
        ]
        .into_iter()
        .filter_map(|(ok, msg)| (!ok).then_some(msg))
        .collect()
    }
}

/// Structural scan of the four properties; `alternating` relaxes property 4
/// to "stationary moves only at `⊢`".
pub fn check_normal_form(a: &TwoWayAutomaton, alternating: bool) -> NormalFormReport {
    let mut property1 = true;
    let mut property3 = true;
    let mut property4 = true;
    for q in a.states() {
        for symbol in a.symbols() {
            let ts = a.delta(q, symbol);
            if symbol != Symbol::LeftEnd && ts.len() > 1 {
                property1 = false;
            }
            for t in ts {
                if a.is_accepting(t.target) && !(symbol == Symbol::LeftEnd && t.direction == Stay) {
                    property3 = false;
                }
                if t.direction == Stay
                    && (symbol != Symbol::LeftEnd || (!alternating && !a.is_accepting(t.target)))
                {
                    property4 = false;
                }
            }
        }
    }
    let property2 = a
        .sole_accepting()
        .is_some_and(|f| a.symbols().all(|s| a.delta(f, s).is_empty()));
    NormalFormReport {
        property1,
        property2,
        property3,
        property4,
        state_count: a.state_count(),
        source_states: None,
        bound_3n: None,
    }
}

/// Checks the preconditions shared by the controller-based procedures and
/// returns the accepting state.
pub(crate) fn require_normal_form(a: &TwoWayAutomaton, alternating: bool) -> Result<StateId> {
    let report = check_normal_form(a, alternating);
    if !report.holds() {
        return Err(Error::NotNormalForm(report.failures().join("; ")));
    }
    Ok(a.sole_accepting().expect("property 2 holds"))
}

/// Where an output state of a conversion came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StateOrigin {
    Original(StateId),
    LeftCopy(StateId),
    RightCopy(StateId),
    Final,
}

/// Converts an outer-nondeterministic machine to normal form.
pub fn normalize_onfa(a: &TwoWayAutomaton) -> Result<TwoWayAutomaton> {
    normalize_onfa_traced(a).map(|(m, _)| m)
}

/// Converts an outer-alternating machine to the alternating normal form.
pub fn normalize_oafa(a: &TwoWayAutomaton) -> Result<TwoWayAutomaton> {
    normalize_oafa_traced(a).map(|(m, _)| m)
}

/// [`normalize_onfa`], also returning the origin of every output state.
pub fn normalize_onfa_traced(a: &TwoWayAutomaton) -> Result<(TwoWayAutomaton, Vec<StateOrigin>)> {
    if a.is_alternating() {
        return Err(Error::NotApplicable(
            "automaton has universal states; use normalize_oafa",
        ));
    }
    require_outer(a)?;
    Plan::new(a, false).build(Flavor::Onfa)
}

/// [`normalize_oafa`], also returning the origin of every output state.
pub fn normalize_oafa_traced(a: &TwoWayAutomaton) -> Result<(TwoWayAutomaton, Vec<StateOrigin>)> {
    require_outer(a)?;
    Plan::new(a, true).build(Flavor::Oafa)
}

fn require_outer(a: &TwoWayAutomaton) -> Result<()> {
    for q in a.states() {
        for (letter, &c) in a.alphabet().iter().enumerate() {
            if a.delta(q, Symbol::Letter(letter)).len() > 1 {
                return Err(Error::NotOuter {
                    state: a.name(q).to_string(),
                    letter: c,
                });
            }
        }
    }
    Ok(())
}

/// Result of following stationary moves from a state on a fixed symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    /// Leaves the cell in `state`, moving in a non-zero direction.
    Move(StateId, Direction),
    /// Enters the final state without leaving the cell.
    Accept,
}

/// Follows stationary moves from `q` on `symbol` until the head moves.
/// Chains that revisit a state contribute nothing.
fn closure(a: &TwoWayAutomaton, q: StateId, symbol: Symbol) -> BTreeSet<Outcome> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::from([q]);
    let mut stack = vec![q];
    while let Some(s) = stack.pop() {
        for t in a.delta(s, symbol) {
            if t.direction != Stay {
                out.insert(Outcome::Move(t.target, t.direction));
            } else if a.is_accepting(t.target) {
                out.insert(Outcome::Accept);
            } else if seen.insert(t.target) {
                stack.push(t.target);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Orig(StateId),
    Back(StateId),
    Fwd(StateId),
    Final,
}

struct Plan<'a> {
    a: &'a TwoWayAutomaton,
    alternating: bool,
    edges: BTreeSet<(Key, Symbol, Key, Direction)>,
    /// Copies that have been requested; their own transitions are added once.
    backs: BTreeSet<StateId>,
    fwds: BTreeSet<StateId>,
    trivial: bool,
}

impl<'a> Plan<'a> {
    fn new(a: &'a TwoWayAutomaton, alternating: bool) -> Self {
        let mut plan = Plan {
            a,
            alternating,
            edges: BTreeSet::new(),
            backs: BTreeSet::new(),
            fwds: BTreeSet::new(),
            trivial: false,
        };
        if a.accepting().is_empty() {
            plan.trivial = true;
        } else if a.is_accepting(a.initial()) {
            plan.edge(Key::Orig(a.initial()), Symbol::LeftEnd, Key::Final, Stay);
        } else {
            plan.fill();
        }
        plan
    }

    fn edge(&mut self, from: Key, symbol: Symbol, to: Key, dir: Direction) {
        self.edges.insert((from, symbol, to, dir));
    }

    fn is_final(&self, q: StateId) -> bool {
        self.a.is_accepting(q)
    }

    /// Target of a move into `p` leaving a cell that holds an input letter
    /// or `⊣`: final states are funnelled left to `⊢`.
    fn interior_target(&mut self, p: StateId, d: Direction) -> (Key, Direction) {
        if self.is_final(p) {
            self.backs.insert(p);
            (Key::Back(p), d)
        } else {
            (Key::Orig(p), d)
        }
    }

    fn fill(&mut self) {
        let a = self.a;
        let k = a.letter_count();
        let originals: Vec<StateId> = a.states().filter(|&q| !self.is_final(q)).collect();

        for &q in &originals {
            // letters: one outcome at most
            for letter in 0..k {
                let symbol = Symbol::Letter(letter);
                for o in closure(a, q, symbol) {
                    let (to, d) = match o {
                        Outcome::Move(p, d) => self.interior_target(p, d),
                        Outcome::Accept => {
                            let p = self.accepting_witness();
                            self.backs.insert(p);
                            (Key::Back(p), Left)
                        }
                    };
                    self.edge(Key::Orig(q), symbol, to, d);
                }
            }
            // left endmarker
            if self.alternating {
                for t in a.delta(q, Symbol::LeftEnd).to_vec() {
                    if self.is_final(t.target) {
                        self.edge(Key::Orig(q), Symbol::LeftEnd, Key::Final, Stay);
                    } else {
                        self.edge(
                            Key::Orig(q),
                            Symbol::LeftEnd,
                            Key::Orig(t.target),
                            t.direction,
                        );
                    }
                }
            } else {
                for o in closure(a, q, Symbol::LeftEnd) {
                    match o {
                        Outcome::Move(p, d) if !self.is_final(p) => {
                            self.edge(Key::Orig(q), Symbol::LeftEnd, Key::Orig(p), d)
                        }
                        _ => self.edge(Key::Orig(q), Symbol::LeftEnd, Key::Final, Stay),
                    }
                }
            }
        }

        // right endmarker
        let deferred = self.deferred_right(&originals);
        for &q in &originals {
            if deferred.contains(&q) {
                self.edge(Key::Orig(q), Symbol::RightEnd, Key::Back(q), Left);
                self.backs.insert(q);
                self.defer(q);
            } else {
                let moves: Vec<(StateId, Direction)> = if self.alternating {
                    a.delta(q, Symbol::RightEnd)
                        .iter()
                        .map(|t| (t.target, t.direction))
                        .collect()
                } else {
                    closure(a, q, Symbol::RightEnd)
                        .into_iter()
                        .map(|o| match o {
                            Outcome::Move(p, d) => (p, d),
                            Outcome::Accept => (self.accepting_witness(), Left),
                        })
                        .collect()
                };
                for (p, d) in moves {
                    let (to, d) = self.interior_target(p, d);
                    self.edge(Key::Orig(q), Symbol::RightEnd, to, d);
                }
            }
        }

        // funnel copies for final states
        for p in self.backs.clone() {
            if self.is_final(p) {
                for letter in 0..k {
                    self.edge(Key::Back(p), Symbol::Letter(letter), Key::Back(p), Left);
                }
                self.edge(Key::Back(p), Symbol::RightEnd, Key::Back(p), Left);
                self.edge(Key::Back(p), Symbol::LeftEnd, Key::Final, Stay);
            }
        }
        for p in self.fwds.clone() {
            for letter in 0..k {
                self.edge(Key::Fwd(p), Symbol::Letter(letter), Key::Fwd(p), Right);
            }
            self.edge(Key::Fwd(p), Symbol::RightEnd, Key::Orig(p), Left);
        }
    }

    /// Some final state, used to name the funnel for acceptance reached by a
    /// chain of stationary moves.
    fn accepting_witness(&self) -> StateId {
        *self.a.accepting().iter().next().expect("F is nonempty")
    }

    /// Non-final states whose `⊣` behaviour is replayed from `⊢`.
    fn deferred_right(&self, originals: &[StateId]) -> BTreeSet<StateId> {
        let a = self.a;
        if !self.alternating {
            return originals
                .iter()
                .copied()
                .filter(|&q| closure(a, q, Symbol::RightEnd).len() > 1)
                .collect();
        }
        let mut set: BTreeSet<StateId> = originals
            .iter()
            .copied()
            .filter(|&q| {
                let ts = a.delta(q, Symbol::RightEnd);
                ts.len() > 1 || ts.iter().any(|t| t.direction == Stay)
            })
            .collect();
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for t in a.delta(q, Symbol::RightEnd) {
                if t.direction == Stay && !self.is_final(t.target) && set.insert(t.target) {
                    stack.push(t.target);
                }
            }
        }
        set
    }

    /// Transitions of the leftward copy of a deferred state `q`.
    fn defer(&mut self, q: StateId) {
        let a = self.a;
        for letter in 0..a.letter_count() {
            self.edge(Key::Back(q), Symbol::Letter(letter), Key::Back(q), Left);
        }
        let moves: Vec<(Option<StateId>, Direction)> = if self.alternating {
            a.delta(q, Symbol::RightEnd)
                .iter()
                .map(|t| ((!self.is_final(t.target)).then_some(t.target), t.direction))
                .collect()
        } else {
            closure(a, q, Symbol::RightEnd)
                .into_iter()
                .map(|o| match o {
                    Outcome::Move(p, d) => ((!self.is_final(p)).then_some(p), d),
                    Outcome::Accept => (None, Left),
                })
                .collect()
        };
        for (target, d) in moves {
            match (target, d) {
                (None, _) => self.edge(Key::Back(q), Symbol::LeftEnd, Key::Final, Stay),
                (Some(p), Stay) => {
                    self.edge(Key::Back(q), Symbol::LeftEnd, Key::Back(p), Stay);
                }
                (Some(p), _) => {
                    self.fwds.insert(p);
                    self.edge(Key::Back(q), Symbol::LeftEnd, Key::Fwd(p), Right);
                }
            }
        }
    }

    fn build(self, flavor: Flavor) -> Result<(TwoWayAutomaton, Vec<StateOrigin>)> {
        let a = self.a;
        let mut keys: Vec<Key> = Vec::new();
        if self.trivial || a.is_accepting(a.initial()) {
            keys.push(Key::Orig(a.initial()));
        } else {
            keys.extend(a.states().filter(|&q| !self.is_final(q)).map(Key::Orig));
            keys.extend(self.backs.iter().map(|&q| Key::Back(q)));
            keys.extend(self.fwds.iter().map(|&q| Key::Fwd(q)));
        }
        keys.push(Key::Final);

        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut names = Vec::with_capacity(keys.len());
        for key in &keys {
            let base = match *key {
                Key::Orig(q) => a.name(q).to_string(),
                Key::Back(q) => format!("{}.back", a.name(q)),
                Key::Fwd(q) => format!("{}.fwd", a.name(q)),
                Key::Final => match a.sole_accepting() {
                    Some(f) if !a.is_accepting(a.initial()) => a.name(f).to_string(),
                    _ => "acc".to_string(),
                },
            };
            let mut name = base.clone();
            let mut i = 1;
            while taken.contains(&name) {
                name = format!("{base}_{i}");
                i += 1;
            }
            taken.insert(name.clone());
            names.push(name);
        }

        let mut b = AutomatonBuilder::new(a.alphabet().iter().copied());
        let index: BTreeMap<Key, StateId> = keys
            .iter()
            .zip(names)
            .map(|(&k, name)| (k, b.add_state(name)))
            .collect();
        b.initial(index[&Key::Orig(a.initial())]);
        b.accept(index[&Key::Final]);
        b.flavor(flavor);
        if let Some(u) = a.universal() {
            b.declare_universal();
            for (&key, &id) in &index {
                match key {
                    Key::Orig(q) | Key::Back(q) if u.contains(&q) && !a.is_accepting(q) => {
                        b.universal(id);
                    }
                    _ => {}
                }
            }
        }
        for &(from, symbol, to, dir) in &self.edges {
            b.transition(index[&from], symbol, index[&to], dir);
        }
        let origins = keys
            .iter()
            .map(|k| match *k {
                Key::Orig(q) => StateOrigin::Original(q),
                Key::Back(q) => StateOrigin::LeftCopy(q),
                Key::Fwd(q) => StateOrigin::RightCopy(q),
                Key::Final => StateOrigin::Final,
            })
            .collect();
        Ok((b.build()?, origins))
    }
}
