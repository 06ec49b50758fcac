//! The automaton data model and single-step execution on an endmarked tape.
//!
//! A [`TwoWayAutomaton`] reads `⊢ w ⊣`, with the left endmarker at head
//! position `0` and the right endmarker at `|w| + 1`. Transitions are stored
//! per `(state, symbol)` as sorted, duplicate-free lists, so the state index
//! order doubles as the fixed linear order used by the backward searches.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form;

/// A state, identified by its dense index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A tape cell: an alphabet letter (by index) or one of the two endmarkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    LeftEnd,
    Letter(usize),
    RightEnd,
}

impl Symbol {
    /// Dense index: `⊢` is 0, letters follow, `⊣` is last.
    #[inline]
    pub fn index(self, letters: usize) -> usize {
        match self {
            Symbol::LeftEnd => 0,
            Symbol::Letter(a) => a + 1,
            Symbol::RightEnd => letters + 1,
        }
    }

    #[inline]
    pub fn from_index(index: usize, letters: usize) -> Symbol {
        if index == 0 {
            Symbol::LeftEnd
        } else if index == letters + 1 {
            Symbol::RightEnd
        } else {
            Symbol::Letter(index - 1)
        }
    }

    #[inline]
    pub fn is_endmarker(self) -> bool {
        !matches!(self, Symbol::Letter(_))
    }
}

/// Head movement of one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Stay,
    Right,
}

impl Direction {
    #[inline]
    pub fn offset(self) -> isize {
        match self {
            Direction::Left => -1,
            Direction::Stay => 0,
            Direction::Right => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub target: StateId,
    pub direction: Direction,
}

impl Transition {
    pub fn new(target: StateId, direction: Direction) -> Self {
        Transition { target, direction }
    }
}

/// The machine class a document claims to describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Dfa,
    Nfa,
    Onfa,
    Svfa,
    Afa,
    Oafa,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Dfa => "dfa",
            Flavor::Nfa => "nfa",
            Flavor::Onfa => "onfa",
            Flavor::Svfa => "svfa",
            Flavor::Afa => "afa",
            Flavor::Oafa => "oafa",
        }
    }

    /// Whether a machine with the given structural report may carry this tag.
    pub fn admits(self, report: &FlavorReport) -> bool {
        match self {
            Flavor::Dfa => report.is_deterministic && !report.is_alternating,
            Flavor::Nfa | Flavor::Svfa => !report.is_alternating,
            Flavor::Onfa => report.is_outer && !report.is_alternating,
            Flavor::Afa => true,
            Flavor::Oafa => report.is_outer,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "dfa" => Flavor::Dfa,
            "nfa" => Flavor::Nfa,
            "onfa" => Flavor::Onfa,
            "svfa" => Flavor::Svfa,
            "afa" => Flavor::Afa,
            "oafa" => Flavor::Oafa,
            other => return Err(format!("unknown automaton type `{other}`")),
        })
    }
}

/// An input word as a sequence of letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of the right endmarker.
    #[inline]
    pub fn right_end(&self) -> usize {
        self.0.len() + 1
    }

    /// The tape symbol under head position `pos` of `⊢ w ⊣`.
    #[inline]
    pub fn symbol(&self, pos: usize) -> Symbol {
        if pos == 0 {
            Symbol::LeftEnd
        } else if pos > self.0.len() {
            Symbol::RightEnd
        } else {
            Symbol::Letter(self.0[pos - 1])
        }
    }

    /// All words over `letters` letters of length exactly `len`, in lexicographic order.
    pub fn all_of_length(letters: usize, len: usize) -> impl Iterator<Item = Word> {
        let total = if letters == 0 {
            usize::from(len == 0)
        } else {
            letters.pow(len as u32)
        };
        (0..total).map(move |mut code| {
            let mut out = vec![0; len];
            for slot in out.iter_mut().rev() {
                *slot = code % letters;
                code /= letters;
            }
            Word(out)
        })
    }

    /// All words of length at most `max_len`, shortest first.
    pub fn all_up_to(letters: usize, max_len: usize) -> impl Iterator<Item = Word> {
        (0..=max_len).flat_map(move |len| Word::all_of_length(letters, len))
    }
}

/// A `(state, head position)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub head: usize,
}

impl Configuration {
    pub fn new(state: StateId, head: usize) -> Self {
        Configuration { state, head }
    }
}

/// A two-way automaton over `⊢ Σ* ⊣`.
///
/// States not listed as universal are existential; a machine without
/// universal states is an ordinary nondeterministic one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayAutomaton {
    names: Vec<String>,
    alphabet: Vec<char>,
    delta: Vec<Vec<Vec<Transition>>>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    rejecting: Option<BTreeSet<StateId>>,
    universal: Option<BTreeSet<StateId>>,
    flavor: Flavor,
}

impl TwoWayAutomaton {
    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(StateId)
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(StateId)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    /// `⊢`, every letter, then `⊣`.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        let k = self.alphabet.len();
        (0..k + 2).map(move |i| Symbol::from_index(i, k))
    }

    #[inline]
    pub fn delta(&self, q: StateId, symbol: Symbol) -> &[Transition] {
        &self.delta[q.0][symbol.index(self.alphabet.len())]
    }

    /// Every transition as `(source, symbol, transition)`, in lexicographic order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Symbol, Transition)> + '_ {
        let k = self.alphabet.len();
        self.delta.iter().enumerate().flat_map(move |(q, row)| {
            row.iter().enumerate().flat_map(move |(s, ts)| {
                ts.iter()
                    .map(move |&t| (StateId(q), Symbol::from_index(s, k), t))
            })
        })
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    #[inline]
    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn rejecting(&self) -> Option<&BTreeSet<StateId>> {
        self.rejecting.as_ref()
    }

    pub fn universal(&self) -> Option<&BTreeSet<StateId>> {
        self.universal.as_ref()
    }

    #[inline]
    pub fn is_universal(&self, q: StateId) -> bool {
        self.universal.as_ref().is_some_and(|u| u.contains(&q))
    }

    pub fn is_alternating(&self) -> bool {
        self.universal.as_ref().is_some_and(|u| !u.is_empty())
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// The unique accepting state, if there is exactly one.
    pub fn sole_accepting(&self) -> Option<StateId> {
        let mut it = self.accepting.iter();
        match (it.next(), it.next()) {
            (Some(&q), None) => Some(q),
            _ => None,
        }
    }

    /// Parses a word over this automaton's alphabet.
    pub fn word(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|c| {
                self.alphabet
                    .iter()
                    .position(|&a| a == c)
                    .ok_or(Error::UnknownLetter(c))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn render_word(&self, word: &Word) -> String {
        word.letters().iter().map(|&a| self.alphabet[a]).collect()
    }

    /// Printable form of a symbol: the letter, `<` or `>`.
    pub fn symbol_token(&self, symbol: Symbol) -> String {
        match symbol {
            Symbol::LeftEnd => "<".to_string(),
            Symbol::RightEnd => ">".to_string(),
            Symbol::Letter(a) => self.alphabet[a].to_string(),
        }
    }

    /// All successor configurations of `c` on `word`.
    pub fn step(&self, c: Configuration, word: &Word) -> Result<Vec<Configuration>> {
        if c.state.0 >= self.state_count() || c.head > word.right_end() {
            return Err(Error::InvalidConfiguration {
                state: c.state.0,
                head: c.head,
                len: word.len(),
            });
        }
        self.delta(c.state, word.symbol(c.head))
            .iter()
            .map(|t| {
                let head = c.head as isize + t.direction.offset();
                if head < 0 || head as usize > word.right_end() {
                    Err(Error::Malformed(format!(
                        "state {} leaves the tape from position {}",
                        self.name(c.state),
                        c.head
                    )))
                } else {
                    Ok(Configuration::new(t.target, head as usize))
                }
            })
            .collect()
    }

    /// Successors without validation; the builder guarantees heads stay on the tape.
    #[inline]
    pub(crate) fn successors<'a>(
        &'a self,
        c: Configuration,
        word: &'a Word,
    ) -> impl Iterator<Item = Configuration> + 'a {
        self.delta(c.state, word.symbol(c.head))
            .iter()
            .map(move |t| {
                Configuration::new(t.target, (c.head as isize + t.direction.offset()) as usize)
            })
    }

    /// Structural classification of the transition table.
    pub fn classify(&self) -> FlavorReport {
        let k = self.letter_count();
        let mut is_deterministic = true;
        let mut is_outer = true;
        let mut is_outer_left = true;
        for q in self.states() {
            for s in 0..k + 2 {
                let width = self.delta[q.0][s].len();
                if width > 1 {
                    is_deterministic = false;
                    match Symbol::from_index(s, k) {
                        Symbol::Letter(_) => {
                            is_outer = false;
                            is_outer_left = false;
                        }
                        Symbol::RightEnd => is_outer_left = false,
                        Symbol::LeftEnd => {}
                    }
                }
            }
        }
        let is_alternating = self.is_alternating();
        let satisfies_normal_form = normal_form::check_normal_form(self, is_alternating).holds();
        FlavorReport {
            is_deterministic,
            is_outer,
            is_outer_left,
            is_alternating,
            satisfies_normal_form,
        }
    }

    /// A builder pre-loaded with this automaton.
    pub fn to_builder(&self) -> AutomatonBuilder {
        let mut b = AutomatonBuilder::new(self.alphabet.iter().copied());
        for name in &self.names {
            b.add_state(name.clone());
        }
        b.initial = Some(self.initial);
        b.accepting = self.accepting.clone();
        b.rejecting = self.rejecting.clone();
        b.universal = self.universal.clone();
        b.flavor = Some(self.flavor);
        for (q, s, t) in self.transitions() {
            b.transition(q, s, t.target, t.direction);
        }
        b
    }
}

/// Structural properties of a transition table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlavorReport {
    pub is_deterministic: bool,
    pub is_outer: bool,
    pub is_outer_left: bool,
    pub is_alternating: bool,
    pub satisfies_normal_form: bool,
}

/// Incremental construction of a validated [`TwoWayAutomaton`].
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    names: Vec<String>,
    alphabet: Vec<char>,
    delta: Vec<Vec<BTreeSet<Transition>>>,
    initial: Option<StateId>,
    accepting: BTreeSet<StateId>,
    rejecting: Option<BTreeSet<StateId>>,
    universal: Option<BTreeSet<StateId>>,
    flavor: Option<Flavor>,
    errors: Vec<String>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: impl IntoIterator<Item = char>) -> Self {
        AutomatonBuilder {
            names: Vec::new(),
            alphabet: alphabet.into_iter().collect(),
            delta: Vec::new(),
            initial: None,
            accepting: BTreeSet::new(),
            rejecting: None,
            universal: None,
            flavor: None,
            errors: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.delta
            .push(vec![BTreeSet::new(); self.alphabet.len() + 2]);
        StateId(self.names.len() - 1)
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&mut self, q: StateId) -> &mut Self {
        self.initial = Some(q);
        self
    }

    pub fn accept(&mut self, q: StateId) -> &mut Self {
        self.accepting.insert(q);
        self
    }

    pub fn reject(&mut self, q: StateId) -> &mut Self {
        self.rejecting.get_or_insert_with(BTreeSet::new).insert(q);
        self
    }

    /// Declares a (possibly empty) rejecting set.
    pub fn declare_rejecting(&mut self) -> &mut Self {
        self.rejecting.get_or_insert_with(BTreeSet::new);
        self
    }

    pub fn universal(&mut self, q: StateId) -> &mut Self {
        self.universal.get_or_insert_with(BTreeSet::new).insert(q);
        self
    }

    /// Declares a (possibly empty) universal set.
    pub fn declare_universal(&mut self) -> &mut Self {
        self.universal.get_or_insert_with(BTreeSet::new);
        self
    }

    /// Drops the universal declaration altogether.
    pub fn clear_universal(&mut self) -> &mut Self {
        self.universal = None;
        self
    }

    pub fn flavor(&mut self, flavor: Flavor) -> &mut Self {
        self.flavor = Some(flavor);
        self
    }

    /// Adds a transition; returns `false` if it was already present.
    pub fn transition(
        &mut self,
        from: StateId,
        symbol: Symbol,
        to: StateId,
        dir: Direction,
    ) -> bool {
        let k = self.alphabet.len();
        if from.0 >= self.names.len() {
            self.errors
                .push(format!("transition from undeclared state {from}"));
            return true;
        }
        if let Symbol::Letter(a) = symbol {
            if a >= k {
                self.errors
                    .push(format!("letter index {a} outside the alphabet"));
                return true;
            }
        }
        self.delta[from.0][symbol.index(k)].insert(Transition::new(to, dir))
    }

    pub fn build(self) -> Result<TwoWayAutomaton> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(Error::Malformed(e));
        }
        let n = self.names.len();
        let k = self.alphabet.len();
        if n == 0 {
            return Err(Error::Malformed("no states".into()));
        }
        let mut seen = BTreeSet::new();
        for name in &self.names {
            if !valid_token(name) {
                return Err(Error::Malformed(format!("invalid state name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Malformed(format!("duplicate state name `{name}`")));
            }
        }
        let mut letters = BTreeSet::new();
        for &a in &self.alphabet {
            if a.is_whitespace() || matches!(a, '<' | '>' | '#' | ':') {
                return Err(Error::Malformed(format!("reserved alphabet letter {a:?}")));
            }
            if !letters.insert(a) {
                return Err(Error::Malformed(format!("duplicate letter {a:?}")));
            }
        }
        let initial = self
            .initial
            .ok_or_else(|| Error::Malformed("no initial state".into()))?;
        let in_range = |q: &StateId| q.0 < n;
        if !in_range(&initial)
            || !self.accepting.iter().all(in_range)
            || !self.rejecting.iter().flatten().all(in_range)
            || !self.universal.iter().flatten().all(in_range)
        {
            return Err(Error::Malformed("state reference out of range".into()));
        }
        if let Some(rej) = &self.rejecting {
            if let Some(q) = rej.intersection(&self.accepting).next() {
                return Err(Error::Malformed(format!(
                    "state `{}` is both accepting and rejecting",
                    self.names[q.0]
                )));
            }
        }
        for (q, row) in self.delta.iter().enumerate() {
            for (s, ts) in row.iter().enumerate() {
                for t in ts {
                    if t.target.0 >= n {
                        return Err(Error::Malformed(format!(
                            "transition from `{}` to undeclared state {}",
                            self.names[q], t.target
                        )));
                    }
                    let off_tape = match Symbol::from_index(s, k) {
                        Symbol::LeftEnd => t.direction == Direction::Left,
                        Symbol::RightEnd => t.direction == Direction::Right,
                        Symbol::Letter(_) => false,
                    };
                    if off_tape {
                        return Err(Error::Malformed(format!(
                            "state `{}` moves off the tape at an endmarker",
                            self.names[q]
                        )));
                    }
                }
            }
        }
        let alternating = self.universal.as_ref().is_some_and(|u| !u.is_empty());
        let flavor = self.flavor.unwrap_or(if alternating {
            Flavor::Afa
        } else {
            Flavor::Nfa
        });
        Ok(TwoWayAutomaton {
            names: self.names,
            alphabet: self.alphabet,
            delta: self
                .delta
                .into_iter()
                .map(|row| row.into_iter().map(|ts| ts.into_iter().collect()).collect())
                .collect(),
            initial,
            accepting: self.accepting,
            rejecting: self.rejecting,
            universal: self.universal,
            flavor,
        })
    }
}

pub(crate) fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#')
}
