//! Deterministic simulation by divide and conquer over segment counts.
//!
//! `reachable(q, p, t)` holds when at most `t` segments lead from `q` to
//! `p`. For `t > 1` it tries every midpoint `r` with `⌈t/2⌉` segments on
//! each side, so the recursion is `⌈log2 t⌉` deep. The recursion runs on an
//! explicit [`SearchStack`] whose frames hold only a midpoint and a phase
//! bit; that is what lets [`materialize_dfa`] fold the stack into the
//! finite control of a two-way deterministic automaton.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automaton::{
    AutomatonBuilder, Direction, Flavor, StateId, Symbol, TwoWayAutomaton, Word,
};
use crate::error::{Error, Result};
use crate::normal_form::require_normal_form;
use crate::reach::{ControllerState, Entry, ReachController};

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    u64::BITS - (x - 1).leading_zeros()
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Frame {
    from: StateId,
    to: StateId,
    half: usize,
    mid: usize,
    second: bool,
}

/// What the stack machine needs next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Evaluate `from = to or Reach(from, to)` and resume with the answer.
    Base {
        from: StateId,
        to: StateId,
    },
    Done(bool),
}

/// Explicit recursion stack of `reachable`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchStack {
    n: usize,
    frames: Vec<Frame>,
    max_depth: usize,
}

impl SearchStack {
    /// Starts `reachable(from, to, t)` over `n` states; `t ≥ 1`.
    pub fn new(n: usize, from: StateId, to: StateId, t: usize) -> (Self, Step) {
        assert!(t >= 1, "reachable needs t >= 1");
        let mut stack = SearchStack {
            n,
            frames: Vec::new(),
            max_depth: 0,
        };
        let step = stack.call(from, to, t);
        (stack, step)
    }

    fn call(&mut self, from: StateId, to: StateId, t: usize) -> Step {
        let mut t = t;
        let mut to = to;
        while t > 1 {
            let half = t.div_ceil(2);
            self.frames.push(Frame {
                from,
                to,
                half,
                mid: 0,
                second: false,
            });
            self.max_depth = self.max_depth.max(self.frames.len());
            to = StateId(0);
            t = half;
        }
        Step::Base { from, to }
    }

    /// Feeds the answer of the pending base case or sub-call.
    pub fn resume(&mut self, value: bool) -> Step {
        let mut value = value;
        loop {
            let Some(top) = self.frames.last_mut() else {
                return Step::Done(value);
            };
            match (top.second, value) {
                (false, true) => {
                    top.second = true;
                    let (from, to, half) = (StateId(top.mid), top.to, top.half);
                    return self.call(from, to, half);
                }
                (true, true) => {
                    self.frames.pop();
                    value = true;
                }
                (_, false) => {
                    top.second = false;
                    top.mid += 1;
                    if top.mid < self.n {
                        let (from, to, half) = (top.from, StateId(top.mid), top.half);
                        return self.call(from, to, half);
                    }
                    self.frames.pop();
                    value = false;
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    /// Largest number of frames held at once.
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `(midpoint, in second half)` per frame, bottom first. Together with
    /// the root call this determines the whole stack.
    pub fn key(&self) -> Vec<(usize, bool)> {
        self.frames.iter().map(|f| (f.mid, f.second)).collect()
    }
}

/// Result of one divide-and-conquer evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivideRun {
    pub value: bool,
    pub max_depth: usize,
    pub base_calls: u64,
}

/// `reachable(from, to, t)` with an existing controller.
pub fn reachable_with(
    c: &ReachController<'_>,
    word: &Word,
    from: StateId,
    to: StateId,
    t: usize,
) -> DivideRun {
    if t == 0 {
        return DivideRun {
            value: from == to,
            max_depth: 0,
            base_calls: 0,
        };
    }
    let n = c.automaton().state_count();
    let (mut stack, mut step) = SearchStack::new(n, from, to, t);
    let mut base_calls = 0;
    loop {
        match step {
            Step::Base { from, to } => {
                base_calls += 1;
                step = stack.resume(c.reach(word, from, to));
            }
            Step::Done(value) => {
                return DivideRun {
                    value,
                    max_depth: stack.max_depth(),
                    base_calls,
                }
            }
        }
    }
}

fn strict_controller(a: &TwoWayAutomaton) -> Result<ReachController<'_>> {
    require_normal_form(a, false)?;
    ReachController::new(a)
}

/// Whether at most `t` segments lead from `from` to `to` on `word`.
pub fn reachable(
    a: &TwoWayAutomaton,
    word: &Word,
    from: StateId,
    to: StateId,
    t: usize,
) -> Result<bool> {
    Ok(reachable_with(&strict_controller(a)?, word, from, to, t).value)
}

/// `reachable(qI, qF, n − 1)`, with the observed stack depth.
pub fn decide_det_traced(a: &TwoWayAutomaton, word: &Word) -> Result<DivideRun> {
    let c = strict_controller(a)?;
    let n = a.state_count();
    Ok(reachable_with(
        &c,
        word,
        a.initial(),
        c.final_state(),
        n - 1,
    ))
}

pub fn decide_det(a: &TwoWayAutomaton, word: &Word) -> Result<bool> {
    decide_det_traced(a, word).map(|r| r.value)
}

/// State bounds of the simulating two-way deterministic automaton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub normal_form_assumed: bool,
    /// `⌈log2(n − 1)⌉`.
    pub stack_height: u32,
    /// `4n (2n)^⌈log2(n−1)⌉`, for a machine already in normal form.
    pub stack_configurations_bound: u128,
    /// `4 (3n)^(⌈log2(3n−1)⌉ + 2)`, for a machine that must be converted first.
    pub rough_bound: u128,
    /// Exponent offset `c` in `n^(log2 n + c)` of the converted bound.
    pub c: f64,
    pub c_below_6: bool,
}

impl BoundReport {
    /// The bound that applies under the normal-form assumption.
    pub fn bound(&self) -> u128 {
        if self.normal_form_assumed {
            self.stack_configurations_bound
        } else {
            self.rough_bound
        }
    }
}

pub fn dfa_state_bound(n: u64, normal_form: bool) -> BoundReport {
    assert!(n >= 2, "the bounds need n >= 2");
    let nn = n as u128;
    let stack_height = ceil_log2(n - 1);
    let stack_configurations_bound = 4 * nn * (2 * nn).pow(stack_height);
    let rough_exp = ceil_log2(3 * n - 1) + 2;
    let rough_bound = 4 * (3 * nn).pow(rough_exp);
    // 4(3n)^(⌈log2(3n−1)⌉+2) ≤ 324 · n^(4 + ⌈log2(3n−1)⌉)
    let c = 4.0 + f64::from(ceil_log2(3 * n - 1)) - (n as f64).log2();
    BoundReport {
        n,
        normal_form_assumed: normal_form,
        stack_height,
        stack_configurations_bound,
        rough_bound,
        c,
        c_below_6: c < 6.0,
    }
}

/// Default ceiling on materialized states.
pub const DEFAULT_CEILING: u128 = 1_000_000;

enum Resolved {
    Accept,
    Reject,
    Run(SearchStack, StateId, StateId),
}

/// Builds a genuine two-way deterministic automaton equivalent to `a`.
///
/// Its states pair a stack key with a controller state; base cases that do
/// not need the tape are settled during construction, and the head is at
/// `⊢` whenever one controller run hands over to the next.
pub fn materialize_dfa(a: &TwoWayAutomaton, ceiling: u128) -> Result<TwoWayAutomaton> {
    let c = strict_controller(a)?;
    let n = a.state_count();
    if n < 2 {
        return Err(Error::NotApplicable("machine needs at least two states"));
    }
    let bound = dfa_state_bound(n as u64, true).stack_configurations_bound;
    if bound > ceiling {
        return Err(Error::TooLarge { bound, ceiling });
    }
    let qf = c.final_state();
    let stationary = |from: StateId, to: StateId| {
        a.delta(from, Symbol::LeftEnd)
            .iter()
            .any(|t| t.target == to && t.direction == Direction::Stay)
    };
    let resolve = |mut stack: SearchStack, mut step: Step| -> Resolved {
        loop {
            match step {
                Step::Done(true) => return Resolved::Accept,
                Step::Done(false) => return Resolved::Reject,
                Step::Base { from, to } => {
                    let known = if from == to {
                        Some(true)
                    } else if a.delta(from, Symbol::LeftEnd).is_empty() {
                        Some(false)
                    } else if stationary(from, to) {
                        Some(true)
                    } else if to == qf {
                        Some(false)
                    } else {
                        None
                    };
                    match known {
                        Some(v) => step = stack.resume(v),
                        None => return Resolved::Run(stack, from, to),
                    }
                }
            }
        }
    };

    let mut m = Materializer {
        c: &c,
        b: AutomatonBuilder::new(a.alphabet().iter().copied()),
        ids: BTreeMap::new(),
        queue: VecDeque::new(),
        accept_state: None,
        ceiling,
    };
    m.b.flavor(Flavor::Dfa);
    let (stack, step) = SearchStack::new(n, a.initial(), qf, n - 1);
    let initial = match m.target(resolve(stack, step))? {
        Some(id) => id,
        None => m.b.add_state("reject"),
    };
    m.b.initial(initial);

    while let Some((id, node)) = m.queue.pop_front() {
        for symbol in a.symbols() {
            let (target, dir) = match (c.entry(node.cs, symbol), node.cs, symbol) {
                (Entry::Go(next, d), _, _) => {
                    (Some(m.enter(node.stack.clone(), node.from, next)?), d)
                }
                (Entry::Parameter, ControllerState::Ql(q), _) => {
                    if c.starts_segment(node.from, q) {
                        let mut stack = node.stack.clone();
                        let step = stack.resume(true);
                        (m.target(resolve(stack, step))?, Direction::Stay)
                    } else {
                        let next = ControllerState::Qhl(q);
                        (
                            Some(m.enter(node.stack.clone(), node.from, next)?),
                            Direction::Right,
                        )
                    }
                }
                (Entry::Undefined, ControllerState::Qhr(_), Symbol::LeftEnd) => {
                    let mut stack = node.stack.clone();
                    let step = stack.resume(false);
                    (m.target(resolve(stack, step))?, Direction::Stay)
                }
                _ => (None, Direction::Stay),
            };
            if let Some(t) = target {
                m.b.transition(id, symbol, t, dir);
            }
        }
    }
    m.b.build()
}

type Key = (Vec<(usize, bool)>, ControllerState);

struct Node {
    stack: SearchStack,
    from: StateId,
    cs: ControllerState,
}

struct Materializer<'c, 'a> {
    c: &'c ReachController<'a>,
    b: AutomatonBuilder,
    ids: BTreeMap<Key, StateId>,
    queue: VecDeque<(StateId, Node)>,
    accept_state: Option<StateId>,
    ceiling: u128,
}

impl Materializer<'_, '_> {
    fn target(&mut self, resolved: Resolved) -> Result<Option<StateId>> {
        match resolved {
            Resolved::Reject => Ok(None),
            Resolved::Accept => {
                if self.accept_state.is_none() {
                    let id = self.add("acc".to_string())?;
                    self.b.accept(id);
                    self.accept_state = Some(id);
                }
                Ok(self.accept_state)
            }
            Resolved::Run(stack, from, to) => {
                self.enter(stack, from, ControllerState::Qhl(to)).map(Some)
            }
        }
    }

    fn enter(&mut self, stack: SearchStack, from: StateId, cs: ControllerState) -> Result<StateId> {
        let key = (stack.key(), cs);
        if let Some(&id) = self.ids.get(&key) {
            return Ok(id);
        }
        let path: Vec<String> = key
            .0
            .iter()
            .map(|&(m, second)| format!("{m}{}", if second { 'R' } else { 'L' }))
            .collect();
        let id = self.add(format!("{}|{}", path.join("."), self.c.state_name(cs)))?;
        self.ids.insert(key, id);
        self.queue.push_back((id, Node { stack, from, cs }));
        Ok(id)
    }

    fn add(&mut self, name: String) -> Result<StateId> {
        if self.b.state_count() as u128 >= self.ceiling {
            return Err(Error::TooLarge {
                bound: self.b.state_count() as u128 + 1,
                ceiling: self.ceiling,
            });
        }
        Ok(self.b.add_state(name))
    }
}
