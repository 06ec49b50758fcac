//! Reductions to graph accessibility.
//!
//! For a fixed input the segment graph has the states as vertices and an
//! edge `(p, q)` whenever a segment leads from `p` to `q`. A nondeterministic
//! machine accepts iff the graph has a path from `qI` to `qF`; an alternating
//! one accepts iff `apath(qI, qF)` holds over its state partition.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::automaton::{Direction, StateId, Symbol, TwoWayAutomaton, Word};
use crate::error::Result;
use crate::normal_form::require_normal_form;
use crate::reach::ReachController;

/// Directed graph over the states of one machine, for one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentGraph {
    pub names: Vec<String>,
    pub edges: BTreeSet<(StateId, StateId)>,
    /// `Some(universal)` for alternating sources.
    pub universal: Option<BTreeSet<StateId>>,
    pub s: StateId,
    pub t: StateId,
}

impl SegmentGraph {
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn successors(&self, p: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.edges
            .range((p, StateId(0))..=(p, StateId(usize::MAX)))
            .map(|&(_, q)| q)
    }

    pub fn is_universal(&self, p: StateId) -> bool {
        self.universal.as_ref().is_some_and(|u| u.contains(&p))
    }

    /// Directed reachability from `s` to `t`.
    pub fn path(&self, s: StateId, t: StateId) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([s]);
        seen[s.0] = true;
        while let Some(p) = queue.pop_front() {
            if p == t {
                return true;
            }
            for q in self.successors(p) {
                if !seen[q.0] {
                    seen[q.0] = true;
                    queue.push_back(q);
                }
            }
        }
        false
    }

    /// `apath(x, y)` for every `x`, as the least fixpoint of: `x = y`; `x`
    /// existential with an edge to some `z` satisfying it; `x` universal with
    /// every edge leading to some `z` satisfying it.
    pub fn apath_to(&self, y: StateId) -> Vec<bool> {
        let n = self.vertex_count();
        let mut good = vec![false; n];
        good[y.0] = true;
        loop {
            let mut changed = false;
            for x in (0..n).map(StateId) {
                if good[x.0] {
                    continue;
                }
                let now = if self.is_universal(x) {
                    self.successors(x).all(|z| good[z.0])
                } else {
                    self.successors(x).any(|z| good[z.0])
                };
                if now {
                    good[x.0] = true;
                    changed = true;
                }
            }
            if !changed {
                return good;
            }
        }
    }

    pub fn apath(&self, x: StateId, y: StateId) -> bool {
        self.apath_to(y)[x.0]
    }

    /// Graphviz rendering: ellipses for existential vertices, boxes for
    /// universal ones, `s` and `t` drawn bold.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph segments {\n  rankdir=LR;\n");
        for (i, name) in self.names.iter().enumerate() {
            let v = StateId(i);
            let shape = if self.is_universal(v) {
                "box"
            } else {
                "ellipse"
            };
            let mut attrs = format!("label=\"{}\", shape={shape}", escape(name));
            if v == self.s || v == self.t {
                attrs.push_str(", style=bold");
            }
            if v == self.t {
                attrs.push_str(", peripheries=2");
            }
            writeln!(out, "  v{i} [{attrs}];").unwrap();
        }
        for &(p, q) in &self.edges {
            writeln!(out, "  v{} -> v{};", p.0, q.0).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds the segment graph of a machine in normal form.
///
/// Without a universal declaration the graph gets an edge `(p, q)`, `p ≠ q`,
/// whenever the wrapped segment test holds. With one it gets the strict
/// segments, and every universal vertex with a branch that never returns to
/// `⊢` gets a self-loop, which keeps `apath` from holding there vacuously.
pub fn build_segment_graph(a: &TwoWayAutomaton, word: &Word) -> Result<SegmentGraph> {
    let alternating = a.universal().is_some();
    let qf = require_normal_form(a, alternating)?;
    let c = ReachController::new(a)?;
    let mut edges = BTreeSet::new();
    for p in a.states() {
        for q in a.states() {
            let edge = if alternating {
                c.segment(word, p, q)
            } else {
                p != q && c.reach(word, p, q)
            };
            if edge {
                edges.insert((p, q));
            }
        }
        if alternating && a.is_universal(p) && p != qf && branch_fails(&c, word, p) {
            edges.insert((p, p));
        }
    }
    Ok(SegmentGraph {
        names: a.names().to_vec(),
        edges,
        universal: alternating.then(|| a.states().filter(|&q| a.is_universal(q)).collect()),
        s: a.initial(),
        t: qf,
    })
}

fn branch_fails(c: &ReachController<'_>, word: &Word, p: StateId) -> bool {
    let branches = c.automaton().delta(p, Symbol::LeftEnd);
    branches.is_empty()
        || branches
            .iter()
            .any(|t| t.direction == Direction::Right && c.branch_return(word, t.target).is_none())
}

/// Reachability from `s` to `t`.
pub fn gap_decide(g: &SegmentGraph) -> bool {
    g.path(g.s, g.t)
}

/// `apath(s, t)`.
pub fn agap_decide(g: &SegmentGraph) -> bool {
    g.apath(g.s, g.t)
}

/// Acceptance of an outer nondeterministic machine through reachability.
pub fn onfa_decide(a: &TwoWayAutomaton, word: &Word) -> Result<bool> {
    Ok(gap_decide(&build_segment_graph(a, word)?))
}

/// Acceptance of an outer alternating machine through `apath`.
pub fn oafa_decide(a: &TwoWayAutomaton, word: &Word) -> Result<bool> {
    Ok(agap_decide(&build_segment_graph(a, word)?))
}
