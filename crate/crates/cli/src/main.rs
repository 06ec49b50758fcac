//! `endmark`: command-line front end for the two-way automata toolkit.
//!
//! Reports are `key: value` lines by default and a JSON object with
//! `--json`. Exit codes: 0 success, 2 unreadable or invalid input,
//! 3 unmet precondition, 4 budget or size ceiling exceeded, 5 languages
//! differ.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use endmark::divide::{self, dfa_state_bound, materialize_dfa};
use endmark::graph::{agap_decide, build_segment_graph, gap_decide};
use endmark::normal_form::{check_normal_form, normalize_oafa, normalize_onfa};
use endmark::reach::ReachController;
use endmark::svfa::{self, svfa_state_accounting};
use endmark::{format, oracle, Error, TwoWayAutomaton, Word};
use endmark_cli::{decide, prepared, Method};

#[derive(Parser)]
#[command(
    name = "endmark",
    version,
    about = "Simulate and convert endmarker-restricted two-way automata"
)]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the structural flavor and normal-form properties.
    Classify { file: PathBuf },
    /// Decide acceptance of one word.
    Run {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value = "oracle")]
        method: Method,
        /// Search-node budget of the svfa method.
        #[arg(long, default_value_t = svfa::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Convert to normal form.
    Normalize {
        file: PathBuf,
        /// Use the alternating conversion.
        #[arg(long)]
        alternating: bool,
        /// Write the machine here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the segment-detecting controller.
    Reach {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Also print the controller's transition table.
        #[arg(long)]
        dump_controller: bool,
    },
    /// Build the segment graph of one word.
    SegmentGraph {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Write Graphviz output here (`-` for standard output).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide acceptance by the complement machine.
    Complement {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// State bounds of the simulating machines.
    Bounds { file: PathBuf },
    /// Build an equivalent two-way deterministic automaton.
    EmitDfa {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = divide::DEFAULT_CEILING)]
        max_states: u128,
    },
    /// Compare two languages on every word up to a length.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

/// Failure classes, one per exit code.
enum Failure {
    Input(String),
    Precondition(String),
    Budget(String, Option<Value>),
    Mismatch(Box<Report>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Budget(..) => 4,
            Failure::Mismatch(_) => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::FlavorMismatch { .. } => Failure::Input(e.to_string()),
            Error::BudgetExceeded { ref partial, .. } => {
                let partial = serde_json::to_value(partial).ok();
                Failure::Budget(e.to_string(), partial)
            }
            Error::TooLarge { .. } => Failure::Budget(e.to_string(), None),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

/// A command's output: an optional headline, fields, and trailing text.
#[derive(Default)]
struct Report {
    head: Option<String>,
    fields: Map<String, Value>,
    text: Option<String>,
    /// Print the text first and the fields as `#` comments after it, so
    /// the output stays a valid document.
    fields_as_comments: bool,
    /// Fields that only the JSON form carries.
    json_only: Map<String, Value>,
}

impl Report {
    fn with_head(head: impl ToString) -> Self {
        Report {
            head: Some(head.to_string()),
            ..Report::default()
        }
    }

    fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    fn merge(&mut self, value: Value) -> &mut Self {
        if let Value::Object(map) = value {
            self.fields.extend(map);
        }
        self
    }

    fn print(&self, as_json: bool) {
        let mut out = String::new();
        if as_json {
            let mut map = Map::new();
            if let Some(head) = &self.head {
                let v = serde_json::from_str(head).unwrap_or_else(|_| Value::String(head.clone()));
                map.insert("result".into(), v);
            }
            map.extend(self.fields.clone());
            map.extend(self.json_only.clone());
            if let Some(text) = &self.text {
                map.insert("text".into(), Value::String(text.clone()));
            }
            out = serde_json::to_string_pretty(&Value::Object(map)).unwrap();
            out.push('\n');
        } else {
            if let Some(head) = &self.head {
                out.push_str(head);
                out.push('\n');
            }
            let mut lines = Vec::new();
            flatten("", &Value::Object(self.fields.clone()), &mut lines);
            let prefix = if self.fields_as_comments { "# " } else { "" };
            let fields: String = lines.iter().map(|l| format!("{prefix}{l}\n")).collect();
            let text = self.text.clone().unwrap_or_default();
            if self.fields_as_comments {
                out.push_str(&text);
                out.push_str(&fields);
            } else {
                out.push_str(&fields);
                out.push_str(&text);
            }
        }
        // a closed pipe is not an error worth reporting
        let _ = io::stdout().lock().write_all(out.as_bytes());
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push(format!("{prefix}: {}", parts.join(" ")));
        }
        other => out.push(format!("{prefix}: {}", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn load(path: &Path) -> Result<TwoWayAutomaton, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))
    }
}

fn word(a: &TwoWayAutomaton, text: &str) -> Result<Word, Failure> {
    Ok(a.word(text)?)
}

fn require_nondeterministic(a: &TwoWayAutomaton, command: &str) -> Result<(), Failure> {
    if a.is_alternating() {
        return Err(Failure::Precondition(format!(
            "{command} needs a machine without universal states"
        )));
    }
    Ok(())
}

fn run(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Classify { file } => {
            let a = load(&file)?;
            let mut r = Report::default();
            r.set("type", a.flavor().as_str())
                .set("states", a.state_count())
                .set("letters", a.letter_count())
                .set("transitions", a.transition_count());
            r.merge(json!(a.classify()));
            r.set("normal_form", json!(check_normal_form(&a, false)));
            r.set(
                "alternating_normal_form",
                json!(check_normal_form(&a, true)),
            );
            Ok(r)
        }
        Command::Run {
            file,
            word: text,
            method,
            budget,
        } => {
            let a = load(&file)?;
            let w = word(&a, &text)?;
            let start = Instant::now();
            let d = decide(&a, &w, method, budget)?;
            let mut r = Report::with_head(d.accepted);
            r.set("method", method.name())
                .set("word", a.render_word(&w))
                .set("states", d.states)
                .set("normalized", d.normalized)
                .set("elapsed_us", start.elapsed().as_micros() as u64);
            r.fields.extend(d.details);
            Ok(r)
        }
        Command::Normalize {
            file,
            alternating,
            out,
        } => {
            let a = load(&file)?;
            let b = if alternating {
                normalize_oafa(&a)?
            } else {
                normalize_onfa(&a)?
            };
            let text = format::serialize(&b);
            let report = check_normal_form(&b, alternating).with_source(a.state_count());
            let mut r = Report::default();
            r.merge(json!(report));
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    r.set("written", path.display().to_string());
                }
                None => {
                    r.text = Some(text);
                    r.fields_as_comments = true;
                }
            }
            Ok(r)
        }
        Command::Reach {
            file,
            word: text,
            from,
            to,
            dump_controller,
        } => {
            let a = load(&file)?;
            let w = word(&a, &text)?;
            let state = |name: &str| {
                a.state_by_name(name)
                    .ok_or_else(|| Failure::Precondition(format!("no state named `{name}`")))
            };
            let (p, q) = (state(&from)?, state(&to)?);
            let c = ReachController::new(&a)?;
            let value = c.reach(&w, p, q);
            let mut r = Report::with_head(value);
            r.set("segment", c.segment(&w, p, q))
                .set("controller_states", c.state_count())
                .set("step_bound", c.step_bound(&w));
            if p != q && q != c.final_state() && !a.delta(p, endmark::Symbol::LeftEnd).is_empty() {
                r.set("steps", c.run(&w, p, q).steps);
            }
            if dump_controller {
                let dump = c.dump();
                if let Ok(v) = serde_json::to_value(&dump) {
                    r.json_only.insert("controller".into(), v);
                }
                r.text = Some(dump.to_string());
            }
            Ok(r)
        }
        Command::SegmentGraph {
            file,
            word: text,
            dot,
        } => {
            let a = load(&file)?;
            let (b, normalized) = prepared(&a, a.universal().is_some())?;
            let w = word(&b, &text)?;
            let g = build_segment_graph(&b, &w)?;
            let value = if g.universal.is_some() {
                agap_decide(&g)
            } else {
                gap_decide(&g)
            };
            let mut r = Report::with_head(value);
            let edges: Vec<String> = g
                .edges
                .iter()
                .map(|&(p, q)| format!("{}->{}", b.name(p), b.name(q)))
                .collect();
            r.set("normalized", normalized)
                .set("vertices", g.vertex_count())
                .set("s", b.name(g.s))
                .set("t", b.name(g.t))
                .set("edges", edges);
            if let Some(path) = dot {
                let rendered = g.to_dot();
                if path == Path::new("-") {
                    r.text = Some(rendered);
                } else {
                    write(&path, &rendered)?;
                    r.set("dot", path.display().to_string());
                }
            }
            Ok(r)
        }
        Command::Complement { file, word: text } => {
            let a = load(&file)?;
            require_nondeterministic(&a, "complement")?;
            let w = word(&a, &text)?;
            let (b, normalized) = prepared(&a, false)?;
            let report = svfa::svfa_decide(&b, &w, svfa::DEFAULT_BUDGET)?;
            let mut r = Report::with_head(report.verdict_exists_no);
            r.set("normalized", normalized).set("report", json!(report));
            Ok(r)
        }
        Command::Bounds { file } => {
            let a = load(&file)?;
            let n = a.state_count() as u64;
            if n < 2 {
                return Err(Failure::Precondition(
                    "bounds need at least two states".into(),
                ));
            }
            let nf = check_normal_form(&a, false).holds();
            let mut r = Report::default();
            r.set("states", n)
                .set("dfa", json!(dfa_state_bound(n, nf)))
                .set("svfa", json!(svfa_state_accounting(n)));
            Ok(r)
        }
        Command::EmitDfa {
            file,
            out,
            max_states,
        } => {
            let a = load(&file)?;
            require_nondeterministic(&a, "emit-dfa")?;
            let (b, normalized) = prepared(&a, false)?;
            let d = materialize_dfa(&b, max_states)?;
            write(&out, &format::serialize(&d))?;
            let mut r = Report::default();
            r.set("normalized", normalized)
                .set("source_states", b.state_count())
                .set("states", d.state_count())
                .set(
                    "bound",
                    json!(dfa_state_bound(b.state_count() as u64, true).bound()),
                )
                .set("written", out.display().to_string());
            Ok(r)
        }
        Command::Equiv {
            first,
            second,
            max_len,
        } => {
            let a = load(&first)?;
            let b = load(&second)?;
            match oracle::language_difference(&a, &b, max_len)? {
                None => {
                    let mut r = Report::with_head("equivalent");
                    r.set("max_len", max_len);
                    Ok(r)
                }
                Some(w) => {
                    let mut r = Report::with_head("different");
                    r.set("counterexample", format!("\"{}\"", a.render_word(&w)))
                        .set("first_accepts", oracle::decides(&a, &w))
                        .set("second_accepts", oracle::decides(&b, &w));
                    Err(Failure::Mismatch(Box::new(r)))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            report.print(cli.json);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let code = failure.code();
            match failure {
                Failure::Mismatch(report) => report.print(cli.json),
                Failure::Budget(message, partial) => {
                    eprintln!("error: {message}");
                    if let Some(p) = partial {
                        let mut r = Report::default();
                        r.set("partial", p);
                        r.print(cli.json);
                    }
                }
                Failure::Input(message) | Failure::Precondition(message) => {
                    eprintln!("error: {message}");
                }
            }
            ExitCode::from(code)
        }
    }
}
