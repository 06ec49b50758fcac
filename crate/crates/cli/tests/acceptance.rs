//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs with its own harness so the lines reach the terminal in order.
//! Exits nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use endmark::divide::{ceil_log2, decide_det_traced, dfa_state_bound, materialize_dfa};
use endmark::format::{parse, serialize};
use endmark::graph::{build_segment_graph, gap_decide, oafa_decide};
use endmark::normal_form::{check_normal_form, normalize_oafa, normalize_onfa};
use endmark::random::{any_machine, mutate, normal_form_corpus, oafa_corpus, onfa_corpus, rng};
use endmark::reach::ReachController;
use endmark::svfa::{complement_decide, svfa_decide, svfa_enumerate, DEFAULT_BUDGET};
use endmark::{fixtures, oracle, Flavor, Symbol, TwoWayAutomaton, Word};
use endmark_cli::{decide, Method};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

struct Corpora {
    /// Raw outer nondeterministic machines, `n ≤ 5`, two letters.
    raw: Vec<TwoWayAutomaton>,
    /// Their normal forms.
    normalized: Vec<TwoWayAutomaton>,
    /// Machines generated directly in normal form.
    generated: Vec<TwoWayAutomaton>,
}

impl Corpora {
    fn new() -> Self {
        let raw = onfa_corpus(0x5EED_0001, 200, 5, 2);
        let normalized = raw.iter().map(|a| normalize_onfa(a).unwrap()).collect();
        let generated = normal_form_corpus(0x5EED_0002, 100, 5, 2, false);
        Corpora {
            raw,
            normalized,
            generated,
        }
    }

    /// Every normal-form machine.
    fn normal_form(&self) -> impl Iterator<Item = &TwoWayAutomaton> {
        self.normalized.iter().chain(&self.generated)
    }

    /// The normal-form machines of positive size, excluding the degenerate
    /// ones that accept in zero steps.
    fn simulable(&self) -> impl Iterator<Item = &TwoWayAutomaton> {
        self.normal_form()
            .filter(|a| a.sole_accepting() != Some(a.initial()))
    }
}

fn words(max_len: usize) -> Vec<Word> {
    Word::all_up_to(2, max_len).collect()
}

fn normal_form_suite(c: &Corpora) -> Outcome {
    let ws = words(6);
    let mut accepted = 0;
    let mut largest = 0;
    for (a, b) in c.raw.iter().zip(&c.normalized) {
        largest = largest.max(b.state_count());
        let n = a.state_count();
        ensure(b.state_count() <= 3 * n, || {
            format!("{} states from {n}", b.state_count())
        })?;
        let report = check_normal_form(b, false);
        ensure(report.holds(), || {
            format!("properties fail: {:?}", report.failures())
        })?;
        for w in &ws {
            let (x, y) = (
                oracle::accepts(a, w).unwrap(),
                oracle::accepts(b, w).unwrap(),
            );
            ensure(x == y, || {
                format!("language differs on {}", a.render_word(w))
            })?;
            accepted += usize::from(x);
        }
    }
    Ok(format!(
        "{} machines, all within 3n states (largest {largest}), all four properties; \
         {accepted} of {} (machine, word) pairs accepted, words up to length 6",
        c.raw.len(),
        c.raw.len() * ws.len()
    ))
}

fn reach_suite(c: &Corpora) -> Outcome {
    let ws = words(5);
    let mut checks = 0u64;
    let mut machines = 0;
    for a in c.normal_form() {
        machines += 1;
        let ctl = ReachController::new(a).map_err(|e| e.to_string())?;
        ensure(ctl.state_count() == 4 * a.state_count() - 3, || {
            format!(
                "{} controller states for n = {}",
                ctl.state_count(),
                a.state_count()
            )
        })?;
        let qf = ctl.final_state();
        for w in &ws {
            let rel = oracle::segment_relation(a, w);
            for p in a.states() {
                for q in a.states() {
                    if p != q && q != qf && !a.delta(p, Symbol::LeftEnd).is_empty() {
                        let run = ctl.run(w, p, q);
                        ensure(run.steps <= ctl.step_bound(w), || {
                            format!("{} steps exceed the bound", run.steps)
                        })?;
                    }
                    let expected = p == q || rel[p.0].contains(&q);
                    ensure(ctl.reach(w, p, q) == expected, || {
                        format!("reach({p}, {q}) wrong on {}", a.render_word(w))
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!(
        "{machines} machines with 4n-3 controller states, {checks} (word, q', q'') triples agree within the step bound"
    ))
}

fn bounded_visits_suite(c: &Corpora) -> Outcome {
    let ws = words(6);
    let mut pairs = 0;
    for a in c.raw.iter().chain(c.normal_form()) {
        for w in &ws {
            let full = oracle::accepts(a, w).unwrap();
            let bounded = oracle::accepts_bounded_visits(a, w, a.state_count()).unwrap();
            ensure(full == bounded, || {
                format!("bounded acceptance differs on {}", a.render_word(w))
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} (machine, word) pairs, words up to length 6"
    ))
}

fn svfa_suite(c: &Corpora) -> Outcome {
    let ws = words(5);
    let mut pairs = 0;
    let mut listed = 0;
    for a in c.simulable() {
        for w in &ws {
            let accepted = oracle::accepts(a, w).unwrap();
            let r = svfa_decide(a, w, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let at = || a.render_word(w);
            ensure(r.complete && r.all_halting, || {
                format!("incomplete on {}", at())
            })?;
            ensure(r.verdict_exists_yes == accepted, || {
                format!("ACCEPT wrong on {}", at())
            })?;
            ensure(r.verdict_exists_no == !accepted, || {
                format!("REJECT wrong on {}", at())
            })?;
            ensure(r.self_verifying(), || format!("both verdicts on {}", at()))?;
            ensure(complement_decide(a, w).unwrap() == !accepted, || {
                format!("complement wrong on {}", at())
            })?;
            pairs += 1;
            // literal enumeration wherever it fits the budget
            if w.len() <= 1 {
                if let Ok(e) = svfa_enumerate(a, w, 200_000) {
                    ensure(
                        (e.accept_count, e.reject_count, e.dont_know_count)
                            == (r.accept_count, r.reject_count, r.dont_know_count),
                        || format!("enumeration and counting differ on {}", at()),
                    )?;
                    listed += 1;
                }
            }
        }
    }
    Ok(format!(
        "{pairs} pairs: ACCEPT iff accepted, REJECT iff rejected, never both, all halting; \
         complement exact; {listed} pairs also enumerated trace by trace"
    ))
}

fn divide_suite(c: &Corpora) -> Outcome {
    let ws = words(5);
    let mut pairs = 0;
    let mut deepest = 0;
    for a in c.normal_form() {
        let n = a.state_count() as u64;
        for w in &ws {
            let run = decide_det_traced(a, w).map_err(|e| e.to_string())?;
            ensure(run.value == oracle::accepts(a, w).unwrap(), || {
                format!("wrong answer on {}", a.render_word(w))
            })?;
            if n >= 2 {
                ensure(run.max_depth as u32 <= ceil_log2(n - 1), || {
                    format!("stack depth {} for n = {n}", run.max_depth)
                })?;
            }
            deepest = deepest.max(run.max_depth);
            pairs += 1;
        }
    }
    let b5 = dfa_state_bound(5, true).stack_configurations_bound;
    let b2 = dfa_state_bound(2, true).stack_configurations_bound;
    ensure(b5 == 2000 && b2 == 8, || format!("bounds {b5} and {b2}"))?;
    let ea = fixtures::ea();
    let d = materialize_dfa(&ea, 1 << 20).map_err(|e| e.to_string())?;
    ensure(d.state_count() <= 1024, || {
        format!("{} states", d.state_count())
    })?;
    ensure(
        d.classify().is_deterministic && d.flavor() == Flavor::Dfa,
        || "materialized machine is not deterministic".into(),
    )?;
    let diff = oracle::language_difference(&ea, &d, 6).unwrap();
    ensure(diff.is_none(), || format!("languages differ on {diff:?}"))?;
    Ok(format!(
        "{pairs} pairs agree, deepest stack {deepest}; bounds 2000 and 8; Ea gives a {}-state deterministic machine equal up to length 6",
        d.state_count()
    ))
}

fn graph_suite(c: &Corpora) -> Outcome {
    let ws = words(5);
    let mut pairs = 0;
    let mut dots = 0;
    for a in c.normal_form() {
        for w in &ws {
            let g = build_segment_graph(a, w).map_err(|e| e.to_string())?;
            let rel = oracle::segment_relation(a, w);
            for p in a.states() {
                for q in a.states() {
                    let expected = p != q && rel[p.0].contains(&q);
                    ensure(g.edges.contains(&(p, q)) == expected, || {
                        format!("edge ({p}, {q}) wrong on {}", a.render_word(w))
                    })?;
                }
            }
            ensure(gap_decide(&g) == oracle::accepts(a, w).unwrap(), || {
                format!("reachability wrong on {}", a.render_word(w))
            })?;
            if w.len() == 2 && dots < 200 {
                check_dot(&g.to_dot())?;
                dots += 1;
            }
            pairs += 1;
        }
    }
    let mut alternating = 0;
    let direct = normal_form_corpus(0x5EED_0003, 100, 4, 2, true);
    let raw = oafa_corpus(0x5EED_0004, 100, 4, 2);
    let converted: Vec<_> = raw.iter().map(|a| normalize_oafa(a).unwrap()).collect();
    let sources = direct.iter().zip(&direct).chain(raw.iter().zip(&converted));
    for (source, machine) in sources {
        for w in &words(4) {
            let got = oafa_decide(machine, w).map_err(|e| e.to_string())?;
            ensure(got == oracle::alternating_accepts(source, w), || {
                format!("apath wrong on {}", source.render_word(w))
            })?;
            alternating += 1;
        }
        if alternating % 31 == 0 {
            check_dot(
                &build_segment_graph(machine, &Word::new(vec![0, 1]))
                    .unwrap()
                    .to_dot(),
            )?;
            dots += 1;
        }
    }
    Ok(format!(
        "{pairs} edge sets and reachability answers exact; {alternating} alternating pairs exact; {dots} DOT documents well formed"
    ))
}

fn format_suite(bin: &Path) -> Outcome {
    let all = [
        fixtures::e1(),
        fixtures::e2(),
        fixtures::ea(),
        fixtures::right_choice(),
        fixtures::trivial(),
    ];
    let mut r = rng(0x5EED_0005);
    let random: Vec<_> = (0..100).map(|_| any_machine(&mut r, 6, 3)).collect();
    for a in all.iter().chain(&random) {
        let text = serialize(a);
        let back = parse(&text).map_err(|e| format!("{e} in\n{text}"))?;
        ensure(&back == a, || format!("round trip changed\n{text}"))?;
        ensure(serialize(&back) == text, || {
            "serialization is not stable".into()
        })?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let original = fixtures::e1();
    let mut mutant = None;
    for _ in 0..64 {
        let m = mutate(&mut r, &original);
        if let Some(w) = oracle::language_difference(&original, &m, 6).unwrap() {
            mutant = Some((m, w));
            break;
        }
    }
    let (m, expected) = mutant.ok_or("no language-changing mutation in 64 draws")?;
    let (pa, pb) = (dir.path().join("e1.2wa"), dir.path().join("mutant.2wa"));
    fs::write(&pa, serialize(&original)).unwrap();
    fs::write(&pb, serialize(&m)).unwrap();
    let out = endmark(bin, &["equiv", s(&pa), s(&pb), "--max-len", "6"]);
    ensure(out.status.code() == Some(5), || {
        format!("equiv exited with {:?}", out.status)
    })?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = format!("counterexample: \"{}\"", original.render_word(&expected));
    ensure(stdout.lines().any(|l| l == line), || {
        format!("unexpected output\n{stdout}")
    })?;

    let nf = dir.path().join("e1-normalized.2wa");
    let out = endmark(bin, &["normalize", s(&pa), "--out", s(&nf)]);
    ensure(out.status.success(), || "normalize failed".into())?;
    let out = endmark(bin, &["equiv", s(&pa), s(&nf), "--max-len", "6"]);
    ensure(out.status.code() == Some(0), || {
        "e1 and its normal form differ".into()
    })?;
    Ok(format!(
        "{} machines round-trip byte for byte; equiv reports the mutation with {line}",
        all.len() + random.len()
    ))
}

fn cross_method_suite(c: &Corpora, bin: &Path) -> Outcome {
    let methods = [Method::Oracle, Method::Svfa, Method::Divide, Method::Gap];
    let ws = words(5);
    let mut pairs = 0;
    let mut accepted = 0;
    for a in c.raw.iter().chain(&c.generated) {
        for w in &ws {
            let answers: Vec<bool> = methods
                .iter()
                .map(|&m| decide(a, w, m, DEFAULT_BUDGET).map(|d| d.accepted))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            ensure(answers.iter().all(|&x| x == answers[0]), || {
                format!("methods disagree on {}: {answers:?}", a.render_word(w))
            })?;
            accepted += usize::from(answers[0]);
            pairs += 1;
        }
    }

    // end to end through the binary on the fixtures
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (name, a) in [
        ("e1", fixtures::e1()),
        ("ea", fixtures::ea()),
        ("right-choice", fixtures::right_choice()),
    ] {
        let path = dir.path().join(format!("{name}.2wa"));
        fs::write(&path, serialize(&a)).unwrap();
        for w in Word::all_up_to(2, 3) {
            let text = a.render_word(&w);
            let mut seen = Vec::new();
            for m in methods {
                let out = endmark(
                    bin,
                    &["run", s(&path), "--word", &text, "--method", m.name()],
                );
                let stdout = String::from_utf8_lossy(&out.stdout);
                ensure(out.status.success(), || format!("run failed: {stdout}"))?;
                seen.push(stdout.lines().next().unwrap_or("").to_string());
                runs += 1;
            }
            ensure(seen.iter().all(|x| x == &seen[0]), || {
                format!("binary disagrees on {name} {text:?}: {seen:?}")
            })?;
        }
    }
    Ok(format!(
        "{pairs} (machine, word) pairs x 4 methods ({accepted} accepted), zero discrepancies; \
         {runs} binary runs agree"
    ))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn endmark(bin: &Path, args: &[&str]) -> Output {
    Command::new(bin).args(args).output().expect("binary runs")
}

/// Checks a document against the Graphviz grammar: an optional `strict`,
/// `graph` or `digraph`, an optional name, and a braced statement list of
/// node, edge, attribute and assignment statements.
fn check_dot(text: &str) -> Result<(), String> {
    let tokens = dot_tokens(text)?;
    let mut p = DotParser {
        tokens,
        at: 0,
        directed: false,
    };
    p.graph().map_err(|e| format!("DOT rejected: {e}\n{text}"))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Punct(&'static str),
}

fn dot_tokens(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        s.push('\\');
                        s.push(*chars.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if ch == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::Punct(if chars[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
        } else if let Some(p) = ["{", "}", "[", "]", "=", ";", ",", ":"]
            .into_iter()
            .find(|p| p.starts_with(ch))
        {
            out.push(Tok::Punct(p));
            i += 1;
        } else if ch.is_alphanumeric() || ch == '_' || ch == '.' || ch == '-' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
            {
                i += 1;
            }
            if i == start {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {ch:?}"));
        }
    }
    Ok(out)
}

struct DotParser {
    tokens: Vec<Tok>,
    at: usize,
    directed: bool,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at)
    }

    fn punct(&mut self, p: &str) -> bool {
        if self.peek() == Some(&Tok::Punct(leak(p))) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.punct(p) {
            Ok(())
        } else {
            Err(format!("expected `{p}` at token {}", self.at))
        }
    }

    fn id(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.at += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(k)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        self.keyword("strict");
        if self.keyword("digraph") {
            self.directed = true;
        } else if !self.keyword("graph") {
            return Err("missing `graph` or `digraph`".into());
        }
        if !matches!(self.peek(), Some(Tok::Punct("{"))) {
            self.id().ok_or("bad graph name")?;
        }
        self.expect("{")?;
        self.stmt_list()?;
        self.expect("}")?;
        if self.at != self.tokens.len() {
            return Err("trailing tokens".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct("}")) | None) {
            self.stmt()?;
            self.punct(";");
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        if self.punct("{") {
            self.stmt_list()?;
            return self.expect("}");
        }
        for kind in ["graph", "node", "edge"] {
            if self.keyword(kind) {
                return self.attr_list(true);
            }
        }
        self.node_id()?;
        if self.punct("=") {
            self.id().ok_or("assignment without a value")?;
            return Ok(());
        }
        let edge = if self.directed { "->" } else { "--" };
        while self.punct(edge) {
            self.node_id()?;
        }
        self.attr_list(false)
    }

    fn node_id(&mut self) -> Result<(), String> {
        self.id()
            .ok_or_else(|| format!("expected an identifier at token {}", self.at))?;
        if self.punct(":") {
            self.id().ok_or("bad port")?;
        }
        Ok(())
    }

    fn attr_list(&mut self, required: bool) -> Result<(), String> {
        if required && !matches!(self.peek(), Some(Tok::Punct("["))) {
            return Err("attribute statement without a list".into());
        }
        while self.punct("[") {
            while !self.punct("]") {
                self.id().ok_or("bad attribute name")?;
                self.expect("=")?;
                self.id().ok_or("bad attribute value")?;
                if !self.punct(",") {
                    self.punct(";");
                }
            }
        }
        Ok(())
    }
}

fn leak(p: &str) -> &'static str {
    ["{", "}", "[", "]", "=", ";", ",", ":", "->", "--"]
        .into_iter()
        .find(|x| *x == p)
        .expect("known punctuation")
}

fn main() -> ExitCode {
    let bin = Path::new(env!("CARGO_BIN_EXE_endmark"));
    let start = Instant::now();
    let corpora = Corpora::new();
    let criteria: Vec<Criterion<'_>> = vec![
        (
            "normal form",
            Duration::from_secs(120),
            Box::new(|| normal_form_suite(&corpora)),
        ),
        (
            "reach controller",
            Duration::from_secs(120),
            Box::new(|| reach_suite(&corpora)),
        ),
        (
            "bounded endmarker visits",
            Duration::MAX,
            Box::new(|| bounded_visits_suite(&corpora)),
        ),
        (
            "self-verifying simulation",
            Duration::from_secs(300),
            Box::new(|| svfa_suite(&corpora)),
        ),
        (
            "divide and conquer",
            Duration::MAX,
            Box::new(|| divide_suite(&corpora)),
        ),
        (
            "graph reduction",
            Duration::MAX,
            Box::new(|| graph_suite(&corpora)),
        ),
        ("format", Duration::MAX, Box::new(|| format_suite(bin))),
        (
            "cross-method agreement",
            Duration::MAX,
            Box::new(|| cross_method_suite(&corpora, bin)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut outcome = check();
        let elapsed = t.elapsed();
        if outcome.is_ok() && elapsed > *limit {
            outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => {
                failed += 1;
                ("FAIL", e.clone())
            }
        };
        println!(
            "[{tag}] criterion {} ({name}): {detail} [{elapsed:.2?}]",
            i + 1
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
