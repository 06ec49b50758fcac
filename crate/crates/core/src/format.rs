//! The line-oriented `.2wa` text format.
//!
//! ```text
//! # comments run to the end of the line
//! type: onfa
//! alphabet: a b
//! states: qI p qF
//! initial: qI
//! accepting: qF
//! trans: qI < p R
//! trans: p a p R
//! trans: p > qF S
//! ```
//!
//! `<` and `>` are the endmarkers; directions are `L`, `S` and `R`.
//! `rejecting:` and `universal:` are optional, and their presence, even
//! with an empty list, is preserved.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::automaton::{AutomatonBuilder, Direction, Flavor, StateId, Symbol, TwoWayAutomaton};
use crate::error::{Error, Result};

const KEYS: [&str; 8] = [
    "type",
    "alphabet",
    "states",
    "initial",
    "accepting",
    "rejecting",
    "universal",
    "trans",
];

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn direction_token(d: Direction) -> char {
    match d {
        Direction::Left => 'L',
        Direction::Stay => 'S',
        Direction::Right => 'R',
    }
}

/// Parses a document and checks its declared type against the table.
pub fn parse(text: &str) -> Result<TwoWayAutomaton> {
    let mut single: BTreeMap<&str, (usize, Vec<&str>)> = BTreeMap::new();
    let mut trans: Vec<(usize, Vec<&str>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(':').ok_or_else(|| {
            parse_error(line, format!("expected `key: value`, found `{content}`"))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(parse_error(line, format!("unknown key `{key}`")));
        }
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if key == "trans" {
            trans.push((line, fields));
        } else if single.insert(key, (line, fields)).is_some() {
            return Err(parse_error(line, format!("key `{key}` given twice")));
        }
    }
    let last = text.lines().count().max(1);
    let required = |key: &str| {
        single
            .get(key)
            .cloned()
            .ok_or_else(|| parse_error(last, format!("missing `{key}:`")))
    };

    let (line, ty) = required("type")?;
    let declared: Flavor = match ty.as_slice() {
        [t] => t.parse().map_err(|e: String| parse_error(line, e))?,
        _ => return Err(parse_error(line, "`type:` takes one value")),
    };

    let (line, letters) = required("alphabet")?;
    let mut alphabet = Vec::new();
    for l in letters {
        let mut chars = l.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if !matches!(c, '<' | '>' | ':') => alphabet.push(c),
            _ => return Err(parse_error(line, format!("invalid letter `{l}`"))),
        }
    }
    let letter_index = |c: &str| -> Option<Symbol> {
        match c {
            "<" => Some(Symbol::LeftEnd),
            ">" => Some(Symbol::RightEnd),
            _ => {
                let mut it = c.chars();
                let ch = it.next()?;
                if it.next().is_some() {
                    return None;
                }
                alphabet.iter().position(|&a| a == ch).map(Symbol::Letter)
            }
        }
    };

    let mut b = AutomatonBuilder::new(alphabet.iter().copied());
    let (line, names) = required("states")?;
    let mut ids: BTreeMap<&str, StateId> = BTreeMap::new();
    for name in names {
        if ids.insert(name, b.add_state(name)).is_some() {
            return Err(parse_error(line, format!("duplicate state `{name}`")));
        }
    }
    let lookup = |line: usize, name: &str| {
        ids.get(name)
            .copied()
            .ok_or_else(|| parse_error(line, format!("undeclared state `{name}`")))
    };

    let (line, init) = required("initial")?;
    match init.as_slice() {
        [q] => {
            b.initial(lookup(line, q)?);
        }
        _ => return Err(parse_error(line, "`initial:` takes one state")),
    }
    let (line, acc) = required("accepting")?;
    for q in acc {
        b.accept(lookup(line, q)?);
    }
    if let Some((line, rej)) = single.get("rejecting") {
        b.declare_rejecting();
        for q in rej {
            b.reject(lookup(*line, q)?);
        }
    }
    if let Some((line, uni)) = single.get("universal") {
        b.declare_universal();
        for q in uni {
            b.universal(lookup(*line, q)?);
        }
    }
    for (line, fields) in &trans {
        let [from, sym, to, dir] = fields.as_slice() else {
            return Err(parse_error(
                *line,
                "`trans:` takes `state symbol state direction`",
            ));
        };
        let symbol = letter_index(sym)
            .ok_or_else(|| parse_error(*line, format!("unknown symbol `{sym}`")))?;
        let direction = match *dir {
            "L" => Direction::Left,
            "S" => Direction::Stay,
            "R" => Direction::Right,
            _ => return Err(parse_error(*line, format!("unknown direction `{dir}`"))),
        };
        if !b.transition(lookup(*line, from)?, symbol, lookup(*line, to)?, direction) {
            log::warn!("line {line}: duplicate transition collapsed");
        }
    }
    b.flavor(declared);
    let a = b.build()?;
    check_flavor(&a)?;
    Ok(a)
}

/// Errors when the declared type does not fit the transition table.
pub fn check_flavor(a: &TwoWayAutomaton) -> Result<()> {
    let report = a.classify();
    if a.flavor().admits(&report) {
        return Ok(());
    }
    let reason = if report.is_alternating && !matches!(a.flavor(), Flavor::Afa | Flavor::Oafa) {
        "universal states declared"
    } else if !report.is_outer {
        "nondeterministic choice on an input letter"
    } else {
        "nondeterministic choice"
    };
    Err(Error::FlavorMismatch {
        declared: a.flavor(),
        reason: reason.into(),
    })
}

/// Canonical text of `a`: states by index, transitions in lexicographic order.
pub fn serialize(a: &TwoWayAutomaton) -> String {
    let mut out = String::new();
    let list = |set: &mut dyn Iterator<Item = StateId>| {
        set.map(|q| format!(" {}", a.name(q))).collect::<String>()
    };
    writeln!(out, "type: {}", a.flavor()).unwrap();
    let letters: String = a.alphabet().iter().map(|c| format!(" {c}")).collect();
    writeln!(out, "alphabet:{letters}").unwrap();
    writeln!(out, "states:{}", list(&mut a.states())).unwrap();
    writeln!(out, "initial: {}", a.name(a.initial())).unwrap();
    writeln!(
        out,
        "accepting:{}",
        list(&mut a.accepting().iter().copied())
    )
    .unwrap();
    if let Some(r) = a.rejecting() {
        writeln!(out, "rejecting:{}", list(&mut r.iter().copied())).unwrap();
    }
    if let Some(u) = a.universal() {
        writeln!(out, "universal:{}", list(&mut u.iter().copied())).unwrap();
    }
    for (q, s, t) in a.transitions() {
        writeln!(
            out,
            "trans: {} {} {} {}",
            a.name(q),
            a.symbol_token(s),
            a.name(t.target),
            direction_token(t.direction)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for a in [
            fixtures::e1(),
            fixtures::e2(),
            fixtures::ea(),
            fixtures::right_choice(),
            fixtures::trivial(),
        ] {
            let text = serialize(&a);
            assert_eq!(parse(&text).unwrap(), a, "{text}");
            assert_eq!(serialize(&parse(&text).unwrap()), text);
        }
    }

    #[test]
    fn missing_initial() {
        let text = "type: nfa\nalphabet: a\nstates: p\naccepting: p\n";
        assert!(matches!(parse(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_key() {
        let text = "type: nfa\nalphabet: a\nstates: p\ninitial: p\naccepting:\nfinal: p\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dfa_with_branching() {
        let text = "type: dfa\nalphabet: a\nstates: p q\ninitial: p\naccepting: q\n\
                    trans: p < p R\ntrans: p < q S\n";
        assert!(matches!(parse(text), Err(Error::FlavorMismatch { .. })));
    }

    #[test]
    fn comments_and_duplicates() {
        let text = "# header\ntype: dfa # trailing\nalphabet: a\nstates: p q\ninitial: p\n\
                    accepting: q\ntrans: p < q S\ntrans: p < q S\n";
        let a = parse(text).unwrap();
        assert_eq!(a.transition_count(), 1);
    }

    #[test]
    fn bad_direction_line() {
        let text = "type: nfa\nalphabet: a\nstates: p\ninitial: p\naccepting:\ntrans: p a p X\n";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_declarations_survive() {
        let text = "type: svfa\nalphabet: a\nstates: p\ninitial: p\naccepting:\nrejecting:\n";
        let a = parse(text).unwrap();
        assert_eq!(a.rejecting().map(|r| r.len()), Some(0));
        assert_eq!(serialize(&a), text);
    }
}
