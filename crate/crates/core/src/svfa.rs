//! Self-verifying simulation by inductive counting.
//!
//! For `t = 0, 1, …, n − 2` the simulation counts the states reachable from
//! `qI` by exactly `t + 1` segments, regenerating the previous level's states
//! in increasing order and certifying each with [`t_reach`]. A run that
//! guesses wrongly halts with [`Verdict::DontKnow`]; a run that survives
//! knows the whole reachable set and therefore answers correctly in both
//! directions.
//!
//! The procedure is exposed three ways: [`svfa_run`] replays one choice
//! trace, [`svfa_enumerate`] replays every trace, and [`svfa_decide`]
//! counts the traces ending in each verdict without replaying them.
//!
//! [`t_reach`]: crate::reach::ReachController::t_reach

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automaton::{StateId, TwoWayAutomaton, Word};
use crate::error::{Error, Result};
use crate::reach::ReachController;
use crate::trace::{self, ChoiceTrace};

/// Default limit on explored nodes.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Outcome of one computation path of a self-verifying machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Accept,
    Reject,
    DontKnow,
}

/// Aggregated outcomes over all choice traces on one word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub verdict_exists_yes: bool,
    pub verdict_exists_no: bool,
    /// Number of traces ending in each verdict (saturating).
    pub accept_count: u128,
    pub reject_count: u128,
    pub dont_know_count: u128,
    /// Total traces, `accept + reject + dont_know` (saturating).
    pub branches_explored: u128,
    /// Distinct search nodes visited to produce the counts.
    pub nodes: u64,
    /// Every trace ends in a verdict.
    pub all_halting: bool,
    /// `false` when the budget ran out first.
    pub complete: bool,
}

impl DecisionReport {
    /// Exactly one of the definite verdicts is reachable.
    pub fn self_verifying(&self) -> bool {
        self.verdict_exists_yes != self.verdict_exists_no
    }

    fn add(&mut self, verdict: Verdict, weight: u128) {
        let slot = match verdict {
            Verdict::Accept => &mut self.accept_count,
            Verdict::Reject => &mut self.reject_count,
            Verdict::DontKnow => &mut self.dont_know_count,
        };
        *slot = slot.saturating_add(weight);
        self.branches_explored = self.branches_explored.saturating_add(weight);
    }

    fn finish(mut self) -> Self {
        self.verdict_exists_yes = self.accept_count > 0;
        self.verdict_exists_no = self.reject_count > 0;
        self
    }
}

fn controller(a: &TwoWayAutomaton) -> Result<ReachController<'_>> {
    let c = ReachController::new(a)?;
    if a.initial() == c.final_state() {
        return Err(Error::NotNormalForm(
            "the initial state is the accepting state".into(),
        ));
    }
    Ok(c)
}

/// Replays one trace of the simulation.
pub fn svfa_run(a: &TwoWayAutomaton, word: &Word, trace: &ChoiceTrace) -> Result<Verdict> {
    svfa_run_with(&controller(a)?, word, trace)
}

fn svfa_run_with(c: &ReachController<'_>, word: &Word, trace: &ChoiceTrace) -> Result<Verdict> {
    let a = c.automaton();
    let n = a.state_count();
    let qf = c.final_state();
    let mut cursor = trace.cursor();
    let mut m_next = 1usize;
    for t in 0..n.saturating_sub(1) {
        let m = m_next;
        m_next = 0;
        for target in a.states() {
            let mut prev = StateId(0);
            for i in 1..=m {
                let q = StateId(cursor.choose(n)?);
                if i > 1 && q <= prev {
                    return Ok(Verdict::DontKnow);
                }
                prev = q;
                if !c.t_reach_with(word, q, t, &mut cursor)? {
                    return Ok(Verdict::DontKnow);
                }
                if c.segment(word, prev, target) {
                    if target == qf {
                        return Ok(Verdict::Accept);
                    }
                    m_next += 1;
                    break;
                }
            }
        }
    }
    Ok(Verdict::Reject)
}

/// Replays every trace, depth first with choices in increasing order.
pub fn svfa_enumerate(a: &TwoWayAutomaton, word: &Word, budget: u64) -> Result<DecisionReport> {
    let c = controller(a)?;
    let mut report = DecisionReport {
        all_halting: true,
        ..DecisionReport::default()
    };
    let runs = trace::enumerate(
        budget,
        |t| svfa_run_with(&c, word, t),
        |_, v| report.add(v, 1),
    )?;
    match runs {
        Some(runs) => {
            report.nodes = runs;
            report.complete = true;
            Ok(report.finish())
        }
        None => {
            report.nodes = budget;
            report.all_halting = false;
            Err(Error::BudgetExceeded {
                budget,
                partial: Box::new(report.finish()),
            })
        }
    }
}

/// A point of the simulation just before guessing the `i`-th state for `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Point {
    t: usize,
    target: usize,
    i: usize,
    m: usize,
    m_next: usize,
    prev: usize,
}

/// Counts the traces ending in each verdict.
///
/// The simulation's control points are processed in program order, each
/// carrying the number of traces that reach it; the subroutine calls are
/// replaced by their exact outcome counts. The counts equal those of
/// [`svfa_enumerate`], which is infeasible beyond tiny machines.
pub fn svfa_decide(a: &TwoWayAutomaton, word: &Word, budget: u64) -> Result<DecisionReport> {
    let c = controller(a)?;
    let n = a.state_count();
    let qf = c.final_state().0;
    let levels = n - 1;

    // t_reach(q, t): traces returning true, traces ending in don't-know
    let summaries = a
        .states()
        .map(|q| c.n_reach_outcomes(word, q))
        .collect::<Result<Vec<_>>>()?;
    let mut t_reach = vec![vec![(0u128, 0u128); n]; levels.max(1)];
    for (q, slot) in t_reach[0].iter_mut().enumerate() {
        *slot = if q == a.initial().0 { (1, 0) } else { (0, 1) };
    }
    for t in 1..levels {
        for q in 0..n {
            let s = &summaries[q];
            let mut yes = 0u128;
            let mut dk = s.dont_know;
            for (p, &w) in s.outputs.iter().enumerate() {
                if w > 0 {
                    let (py, pd) = t_reach[t - 1][p];
                    yes = yes.saturating_add(w.saturating_mul(py));
                    dk = dk.saturating_add(w.saturating_mul(pd));
                }
            }
            t_reach[t][q] = (yes, dk);
        }
    }
    let segment: Vec<Vec<bool>> = a
        .states()
        .map(|p| a.states().map(|q| c.segment(word, p, q)).collect())
        .collect();

    let mut report = DecisionReport {
        all_halting: true,
        ..DecisionReport::default()
    };
    let mut frontier: BTreeMap<Point, u128> = BTreeMap::new();
    let push = |frontier: &mut BTreeMap<Point, u128>, p: Point, w: u128| {
        let slot = frontier.entry(p).or_insert(0);
        *slot = slot.saturating_add(w);
    };
    // control reaches the end of the loop body for `target`
    let next_target = |t: usize, target: usize, m: usize, m_next: usize| -> Option<Point> {
        if target + 1 < n {
            Some(Point {
                t,
                target: target + 1,
                i: 1,
                m,
                m_next,
                prev: 0,
            })
        } else if t + 1 < levels {
            Some(Point {
                t: t + 1,
                target: 0,
                i: 1,
                m: m_next,
                m_next: 0,
                prev: 0,
            })
        } else {
            None
        }
    };

    if levels == 0 {
        report.add(Verdict::Reject, 1);
    } else {
        push(
            &mut frontier,
            Point {
                t: 0,
                target: 0,
                i: 1,
                m: 1,
                m_next: 0,
                prev: 0,
            },
            1,
        );
    }
    while let Some((p, w)) = frontier.pop_first() {
        report.nodes += 1;
        if report.nodes > budget {
            report.complete = false;
            return Err(Error::BudgetExceeded {
                budget,
                partial: Box::new(report.finish()),
            });
        }
        if p.i > p.m {
            match next_target(p.t, p.target, p.m, p.m_next) {
                Some(next) => push(&mut frontier, next, w),
                None => report.add(Verdict::Reject, w),
            }
            continue;
        }
        for q in 0..n {
            if p.i > 1 && q <= p.prev {
                report.add(Verdict::DontKnow, w);
                continue;
            }
            let (yes, dk) = t_reach[p.t][q];
            report.add(Verdict::DontKnow, w.saturating_mul(dk));
            if yes == 0 {
                continue;
            }
            let w2 = w.saturating_mul(yes);
            if segment[q][p.target] {
                if p.target == qf {
                    report.add(Verdict::Accept, w2);
                } else {
                    match next_target(p.t, p.target, p.m, p.m_next + 1) {
                        Some(next) => push(&mut frontier, next, w2),
                        None => report.add(Verdict::Reject, w2),
                    }
                }
            } else {
                push(
                    &mut frontier,
                    Point {
                        i: p.i + 1,
                        prev: q,
                        ..p
                    },
                    w2,
                );
            }
        }
    }
    report.complete = true;
    Ok(report.finish())
}

/// Whether the complement machine accepts: some trace ends in a rejection.
pub fn complement_decide(a: &TwoWayAutomaton, word: &Word) -> Result<bool> {
    Ok(svfa_decide(a, word, DEFAULT_BUDGET)?.verdict_exists_no)
}

/// State count of a finite control realizing the simulation for an
/// `n`-state machine in normal form.
///
/// Six loop variables range over `n + 1` values each; `t_reach` adds a
/// counter up to `n` and the search cursor of `n_reach`, which uses the
/// controller states other than the accepting one (`4n − 4`). The space of
/// the plain segment test is shared with that cursor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateAccounting {
    pub n: u64,
    pub variables: u128,
    pub t_reach_counter: u128,
    pub n_reach_cursor: u128,
    pub total: u128,
    /// `n = 1`: no controller states, the product collapses to zero.
    pub degenerate: bool,
    /// `total / n^8`.
    pub ratio_to_n8: f64,
}

pub fn svfa_state_accounting(n: u64) -> StateAccounting {
    let nn = n as u128;
    let variables = (nn + 1).pow(6);
    let t_reach_counter = nn;
    let n_reach_cursor = (4 * nn).saturating_sub(4);
    let total = variables * t_reach_counter * n_reach_cursor;
    StateAccounting {
        n,
        variables,
        t_reach_counter,
        n_reach_cursor,
        total,
        degenerate: n_reach_cursor == 0,
        ratio_to_n8: total as f64 / (n as f64).powi(8),
    }
}
