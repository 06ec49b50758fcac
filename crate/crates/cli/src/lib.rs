//! Method dispatch shared by the `endmark` binary and its tests.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use endmark::divide;
use endmark::graph::{agap_decide, build_segment_graph, gap_decide};
use endmark::normal_form::{check_normal_form, normalize_oafa, normalize_onfa};
use endmark::svfa;
use endmark::{oracle, Error, Result, TwoWayAutomaton, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Breadth-first search over configurations.
    Oracle,
    /// Self-verifying inductive counting.
    Svfa,
    /// Divide-and-conquer deterministic simulation.
    Divide,
    /// Reachability in the segment graph.
    Gap,
    /// Alternating reachability in the segment graph.
    Agap,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Svfa => "svfa",
            Method::Divide => "divide",
            Method::Gap => "gap",
            Method::Agap => "agap",
        }
    }
}

/// The machine itself if it already satisfies the normal form the methods
/// need, otherwise its conversion. The flag tells which.
pub fn prepared(a: &TwoWayAutomaton, alternating: bool) -> Result<(TwoWayAutomaton, bool)> {
    let ready = check_normal_form(a, alternating).holds()
        && a.sole_accepting() != Some(a.initial())
        && (alternating || a.universal().is_none());
    if ready {
        return Ok((a.clone(), false));
    }
    let converted = if alternating {
        normalize_oafa(a)?
    } else {
        normalize_onfa(a)?
    };
    Ok((converted, true))
}

fn require_nondeterministic(a: &TwoWayAutomaton) -> Result<()> {
    if a.is_alternating() {
        return Err(Error::NotApplicable(
            "method needs a machine without universal states",
        ));
    }
    Ok(())
}

/// Outcome of one `run`.
#[derive(Clone, Debug)]
pub struct Decision {
    pub accepted: bool,
    /// States of the machine the method actually ran on.
    pub states: usize,
    pub normalized: bool,
    /// Method-specific details.
    pub details: Map<String, Value>,
}

/// Decides `word` with `method`, converting to normal form when needed.
pub fn decide(a: &TwoWayAutomaton, word: &Word, method: Method, budget: u64) -> Result<Decision> {
    let mut details = Map::new();
    let (accepted, states, normalized) = match method {
        Method::Oracle => (oracle::decides(a, word), a.state_count(), false),
        Method::Svfa => {
            require_nondeterministic(a)?;
            let (b, normalized) = prepared(a, false)?;
            let report = svfa::svfa_decide(&b, word, budget)?;
            details.insert("report".into(), json!(report));
            (report.verdict_exists_yes, b.state_count(), normalized)
        }
        Method::Divide => {
            require_nondeterministic(a)?;
            let (b, normalized) = prepared(a, false)?;
            let run = divide::decide_det_traced(&b, word)?;
            details.insert("max_depth".into(), json!(run.max_depth));
            details.insert("base_calls".into(), json!(run.base_calls));
            (run.value, b.state_count(), normalized)
        }
        Method::Gap => {
            require_nondeterministic(a)?;
            let (b, normalized) = prepared(a, false)?;
            let g = build_segment_graph(&b, word)?;
            details.insert("edges".into(), json!(g.edges.len()));
            (gap_decide(&g), b.state_count(), normalized)
        }
        Method::Agap => {
            let (b, normalized) = prepared(a, true)?;
            let g = build_segment_graph(&b, word)?;
            details.insert("edges".into(), json!(g.edges.len()));
            let value = if g.universal.is_some() {
                agap_decide(&g)
            } else {
                gap_decide(&g)
            };
            (value, b.state_count(), normalized)
        }
    };
    Ok(Decision {
        accepted,
        states,
        normalized,
        details,
    })
}
