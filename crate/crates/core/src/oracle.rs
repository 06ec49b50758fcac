//! Brute-force oracles over the finite configuration graph.
//!
//! These are deliberately naive: breadth-first searches and fixpoint
//! iterations over the `n · (|w| + 2)` configurations of a machine on a
//! fixed word. Everything else in the crate is checked against them.

use std::collections::{BTreeSet, VecDeque};

use crate::automaton::{Configuration, StateId, TwoWayAutomaton, Word};
use crate::error::{Error, Result};

struct Space {
    width: usize,
}

impl Space {
    fn new(word: &Word) -> Self {
        Space {
            width: word.len() + 2,
        }
    }

    #[inline]
    fn index(&self, c: Configuration) -> usize {
        c.state.0 * self.width + c.head
    }

    fn size(&self, a: &TwoWayAutomaton) -> usize {
        a.state_count() * self.width
    }
}

/// Whether some accepting configuration is reachable from `(qI, 0)`.
pub fn accepts(a: &TwoWayAutomaton, word: &Word) -> Result<bool> {
    if a.is_alternating() {
        return Err(Error::NotApplicable(
            "automaton has universal states; use alternating_accepts",
        ));
    }
    let space = Space::new(word);
    let mut seen = vec![false; space.size(a)];
    let start = Configuration::new(a.initial(), 0);
    seen[space.index(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        if a.is_accepting(c.state) {
            return Ok(true);
        }
        for next in a.successors(c, word) {
            let i = space.index(next);
            if !seen[i] {
                seen[i] = true;
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Whether an accepting path exists that has at most `k` configurations
/// with the head on `⊢`, the initial configuration included.
pub fn accepts_bounded_visits(a: &TwoWayAutomaton, word: &Word, k: usize) -> Result<bool> {
    if a.is_alternating() {
        return Err(Error::NotApplicable("automaton has universal states"));
    }
    if k == 0 {
        return Ok(false);
    }
    let space = Space::new(word);
    let layers = k + 1;
    let mut seen = vec![false; space.size(a) * layers];
    let start = (Configuration::new(a.initial(), 0), 1usize);
    seen[space.index(start.0) * layers + 1] = true;
    let mut queue = VecDeque::from([start]);
    while let Some((c, visits)) = queue.pop_front() {
        if a.is_accepting(c.state) {
            return Ok(true);
        }
        for next in a.successors(c, word) {
            let v = visits + usize::from(next.head == 0);
            if v > k {
                continue;
            }
            let i = space.index(next) * layers + v;
            if !seen[i] {
                seen[i] = true;
                queue.push_back((next, v));
            }
        }
    }
    Ok(false)
}

/// States in which a computation started at `(from, 1)` first returns to `⊢`
/// without touching it in between.
pub fn branch_returns(a: &TwoWayAutomaton, word: &Word, from: StateId) -> BTreeSet<StateId> {
    returns_from(a, word, std::iter::once(Configuration::new(from, 1)))
}

fn returns_from(
    a: &TwoWayAutomaton,
    word: &Word,
    starts: impl IntoIterator<Item = Configuration>,
) -> BTreeSet<StateId> {
    let space = Space::new(word);
    let mut seen = vec![false; space.size(a)];
    let mut queue = VecDeque::new();
    for c in starts {
        debug_assert!(c.head >= 1);
        if !std::mem::replace(&mut seen[space.index(c)], true) {
            queue.push_back(c);
        }
    }
    let mut out = BTreeSet::new();
    while let Some(c) = queue.pop_front() {
        for next in a.successors(c, word) {
            if next.head == 0 {
                out.insert(next.state);
            } else if !std::mem::replace(&mut seen[space.index(next)], true) {
                queue.push_back(next);
            }
        }
    }
    out
}

/// All `q` such that a segment from `p` to `q` exists on `word`.
///
/// A segment starts at `(p, 0)` and ends at `(q, 0)` without visiting `⊢`
/// in between; it may visit `⊣`. A single stationary move at `⊢` is a
/// segment, a path of zero steps is not.
pub fn segment_targets(a: &TwoWayAutomaton, word: &Word, p: StateId) -> BTreeSet<StateId> {
    let first: Vec<_> = a.successors(Configuration::new(p, 0), word).collect();
    let mut out: BTreeSet<StateId> = first
        .iter()
        .filter(|c| c.head == 0)
        .map(|c| c.state)
        .collect();
    out.extend(returns_from(
        a,
        word,
        first.into_iter().filter(|c| c.head > 0),
    ));
    out
}

pub fn segment_exists(a: &TwoWayAutomaton, word: &Word, p: StateId, q: StateId) -> bool {
    segment_targets(a, word, p).contains(&q)
}

/// The segment relation on `word`, indexed by source state.
pub fn segment_relation(a: &TwoWayAutomaton, word: &Word) -> Vec<BTreeSet<StateId>> {
    a.states().map(|p| segment_targets(a, word, p)).collect()
}

/// States reachable from `from` by exactly `t` segments.
pub fn segments_exactly(
    relation: &[BTreeSet<StateId>],
    from: StateId,
    t: usize,
) -> BTreeSet<StateId> {
    let mut current = BTreeSet::from([from]);
    for _ in 0..t {
        current = current
            .iter()
            .flat_map(|q| relation[q.0].iter().copied())
            .collect();
    }
    current
}

/// States reachable from `from` by at most `t` segments.
pub fn segments_within(
    relation: &[BTreeSet<StateId>],
    from: StateId,
    t: usize,
) -> BTreeSet<StateId> {
    let mut all = BTreeSet::from([from]);
    let mut frontier = all.clone();
    for _ in 0..t {
        frontier = frontier
            .iter()
            .flat_map(|q| relation[q.0].iter().copied())
            .filter(|q| !all.contains(q))
            .collect();
        if frontier.is_empty() {
            break;
        }
        all.extend(frontier.iter().copied());
    }
    all
}

/// Acceptance by an accepting computation tree rooted at `(qI, 0)`.
///
/// Least fixpoint: accepting configurations are accepted; an existential
/// configuration needs one accepted successor; a universal one needs at
/// least one successor and all of them accepted.
pub fn alternating_accepts(a: &TwoWayAutomaton, word: &Word) -> bool {
    let space = Space::new(word);
    let configs: Vec<Configuration> = a
        .states()
        .flat_map(|q| (0..space.width).map(move |h| Configuration::new(q, h)))
        .collect();
    let succ: Vec<Vec<usize>> = configs
        .iter()
        .map(|&c| a.successors(c, word).map(|n| space.index(n)).collect())
        .collect();
    let mut good: Vec<bool> = configs.iter().map(|c| a.is_accepting(c.state)).collect();
    loop {
        let mut changed = false;
        for (i, c) in configs.iter().enumerate() {
            if good[i] {
                continue;
            }
            let s = &succ[i];
            let now = if a.is_universal(c.state) {
                !s.is_empty() && s.iter().all(|&j| good[j])
            } else {
                s.iter().any(|&j| good[j])
            };
            if now {
                good[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    good[space.index(Configuration::new(a.initial(), 0))]
}

/// Acceptance under whichever semantics the machine calls for.
pub fn decides(a: &TwoWayAutomaton, word: &Word) -> bool {
    if a.is_alternating() {
        alternating_accepts(a, word)
    } else {
        accepts(a, word).expect("machine has no universal states")
    }
}

/// The first word, in length-lexicographic order up to `max_len`, on which
/// the two machines disagree.
pub fn language_difference(
    a: &TwoWayAutomaton,
    b: &TwoWayAutomaton,
    max_len: usize,
) -> Result<Option<Word>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Malformed(format!(
            "alphabets differ: {:?} vs {:?}",
            a.alphabet(),
            b.alphabet()
        )));
    }
    Ok(Word::all_up_to(a.letter_count(), max_len).find(|w| decides(a, w) != decides(b, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Direction, Symbol};
    use crate::fixtures;

    fn w(a: &TwoWayAutomaton, s: &str) -> Word {
        a.word(s).unwrap()
    }

    #[test]
    fn e1_acceptance() {
        let e1 = fixtures::e1();
        assert!(accepts(&e1, &w(&e1, "aa")).unwrap());
        assert!(!accepts(&e1, &w(&e1, "ab")).unwrap());
        assert!(accepts(&e1, &w(&e1, "")).unwrap());
    }

    #[test]
    fn e1_bounded_visits() {
        let e1 = fixtures::e1();
        let aa = w(&e1, "aa");
        assert!(accepts_bounded_visits(&e1, &aa, 6).unwrap());
        assert!(!accepts_bounded_visits(&e1, &w(&e1, "ab"), 6).unwrap());
        assert!(!accepts_bounded_visits(&e1, &aa, 0).unwrap());
        // qI at 0 and ra, qF at 0
        assert!(!accepts_bounded_visits(&e1, &aa, 2).unwrap());
        assert!(accepts_bounded_visits(&e1, &aa, 3).unwrap());
    }

    #[test]
    fn e1_segments() {
        let e1 = fixtures::e1();
        let s = |n: &str| e1.state_by_name(n).unwrap();
        let aa = w(&e1, "aa");
        // the branch entered in pa sweeps right and returns in ra
        assert_eq!(branch_returns(&e1, &aa, s("pa")), BTreeSet::from([s("ra")]));
        assert!(branch_returns(&e1, &aa, s("pb")).is_empty());
        assert!(!segment_exists(&e1, &aa, s("pb"), s("rb")));
        assert!(segment_exists(&e1, &aa, s("qI"), s("ra")));
        assert!(!segment_exists(&e1, &aa, s("qI"), s("rb")));
        assert!(segment_exists(&e1, &aa, s("ra"), s("qF")));
        // zero-step paths are not segments
        assert!(!segment_exists(&e1, &aa, s("pa"), s("pa")));
        assert_eq!(
            segment_targets(&e1, &w(&e1, ""), s("qI")),
            BTreeSet::from([s("ra"), s("rb")])
        );
    }

    #[test]
    fn segment_sequences() {
        let e1 = fixtures::e1();
        let rel = segment_relation(&e1, &w(&e1, "aa"));
        let qi = e1.initial();
        let ra = e1.state_by_name("ra").unwrap();
        let qf = e1.state_by_name("qF").unwrap();
        assert_eq!(segments_exactly(&rel, qi, 0), BTreeSet::from([qi]));
        assert_eq!(segments_exactly(&rel, qi, 1), BTreeSet::from([ra]));
        assert_eq!(segments_exactly(&rel, qi, 2), BTreeSet::from([qf]));
        assert!(segments_exactly(&rel, qi, 3).is_empty());
        assert_eq!(segments_within(&rel, qi, 5), BTreeSet::from([qi, ra, qf]));
    }

    #[test]
    fn alternating_semantics() {
        let e1 = fixtures::e1();
        let mut b = e1.to_builder();
        b.declare_universal();
        let e1u = b.build().unwrap();
        for text in ["", "a", "aa", "ab", "bba"] {
            assert_eq!(
                alternating_accepts(&e1u, &w(&e1, text)),
                accepts(&e1, &w(&e1, text)).unwrap()
            );
        }
        let e2 = fixtures::e2();
        assert!(!alternating_accepts(&e2, &w(&e2, "aa")));
        assert!(alternating_accepts(&e2, &w(&e2, "")));
        assert!(accepts(&e2, &w(&e2, "")).is_err());
    }

    #[test]
    fn dead_universal_configuration_rejects() {
        let mut b = crate::AutomatonBuilder::new(['a']);
        let q = b.add_state("q");
        let f = b.add_state("f");
        b.initial(q).accept(f).universal(q);
        let m = b.build().unwrap();
        assert!(!alternating_accepts(&m, &Word::default()));

        let mut b = m.to_builder();
        b.transition(q, Symbol::LeftEnd, f, Direction::Stay);
        assert!(alternating_accepts(&b.build().unwrap(), &Word::default()));
    }

    #[test]
    fn language_difference_finds_first_counterexample() {
        let e1 = fixtures::e1();
        let ea = fixtures::ea();
        assert_eq!(language_difference(&e1, &e1, 4).unwrap(), None);
        // first word in a* ∪ b* but not a*
        assert_eq!(language_difference(&e1, &ea, 4).unwrap(), Some(w(&e1, "b")));
    }
}
