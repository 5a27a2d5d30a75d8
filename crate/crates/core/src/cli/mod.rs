//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage or parse error, 2 engine error, 3 a
//! query is not entailed (`entails`) or the engines disagree (`compare`).

pub mod document;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::formula::{enumerate_models, formula_of_models, parse_formula, Alphabet, Formula, DEFAULT_ORACLE_CAP};
use crate::preorder::{base, normalize, run_sequence_oracle_trace, ChangeOp};
use crate::sat::{solve_cnf, Backend, Cnf, SatSolver, SOLVER_ENV};
use crate::symbolic::{base_after, trace_sequence};

pub use document::{load, parse_document, render_document, Query, SequenceDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ENGINE: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "belief-seq", version, about = "Iterated belief change: bases and entailments of operator sequences")]
struct Cli {
    /// Sequence file.
    #[arg(long, global = true, value_name = "PATH")]
    file: Option<PathBuf>,

    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,

    /// Largest alphabet the explicit oracle will enumerate.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,

    /// External SAT solver command; `{}` stands for the DIMACS file, which
    /// is appended when absent.
    #[arg(long, global = true, value_name = "CMD", env = SOLVER_ENV)]
    solver: Option<String>,

    /// Threads for evaluating query lines.
    #[arg(long, global = true, value_name = "N", default_value_t = 1,
          value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the base after the whole sequence.
    Base,
    /// Check the `?` query lines (and any --query) against the final base.
    Entails {
        #[arg(short, long = "query", value_name = "FORMULA")]
        queries: Vec<String>,
    },
    /// Print the base after every step, with underformulae.
    Trace,
    /// Print the equivalent sequence of lex, refi and sev operators.
    Expand,
    /// Print the explicit class lists after every step.
    Oracle,
    /// Check the symbolic engine against the explicit oracle.
    Compare,
    /// Print satisfiability-check counts.
    Stats,
    /// Decide a DIMACS file with the builtin solver.
    #[command(hide = true)]
    SolveDimacs { path: PathBuf },
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

enum Failure {
    Usage(String),
    Engine(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Document { .. } | Error::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::Engine(other.to_string()),
        }
    }
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            outcome.code
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Engine(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ENGINE
        }
    }
}

fn dispatch(cli: &Cli) -> std::result::Result<Outcome, Failure> {
    if let Command::SolveDimacs { path } = &cli.command {
        return solve_dimacs(path);
    }
    let Some(path) = &cli.file else {
        return Err(Failure::Usage("--file <PATH> is required".into()));
    };
    let doc = load(path)?;
    let backend = match &cli.solver {
        Some(cmd) if !cmd.trim().is_empty() => Backend::External(cmd.clone()),
        _ => Backend::Builtin,
    };
    let mut sat = SatSolver::new(backend);
    let ctx = Context {
        doc: &doc,
        json: cli.json,
        cap: cli.oracle_cap,
        jobs: cli.jobs as usize,
    };
    let result = match &cli.command {
        Command::Base => ctx.base(&mut sat),
        Command::Entails { queries } => {
            let mut all = doc.queries.clone();
            for text in queries {
                let formula = parse_formula(text, doc.alphabet())
                    .map_err(|e| Failure::Usage(format!("query `{text}`: {e}")))?;
                all.push(Query {
                    text: text.clone(),
                    formula,
                    line: 0,
                });
            }
            if all.is_empty() {
                return Err(Failure::Usage("no queries: add `? <formula>` lines or --query".into()));
            }
            ctx.entails(&sat, &all)
        }
        Command::Trace => ctx.trace(&mut sat),
        Command::Expand => ctx.expand(&mut sat),
        Command::Oracle => ctx.oracle(),
        Command::Compare => ctx.compare(&mut sat),
        Command::Stats => ctx.stats(&mut sat),
        Command::SolveDimacs { .. } => unreachable!(),
    };
    result.map_err(|e| ctx.locate(e))
}

fn solve_dimacs(path: &PathBuf) -> std::result::Result<Outcome, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cnf = Cnf::from_dimacs(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(if solve_cnf(&cnf) {
        Outcome {
            text: "s SATISFIABLE\n".into(),
            code: 10,
        }
    } else {
        Outcome {
            text: "s UNSATISFIABLE\n".into(),
            code: 20,
        }
    })
}

fn show(f: &Formula, a: &Alphabet) -> String {
    f.simplify().render(a)
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct TraceStep {
    step: usize,
    op: &'static str,
    formula: String,
    base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    underformula: Option<String>,
    sat_calls: u64,
}

struct Context<'a> {
    doc: &'a SequenceDocument,
    json: bool,
    cap: usize,
    jobs: usize,
}

impl Context<'_> {
    fn alphabet(&self) -> &Alphabet {
        self.doc.alphabet()
    }

    /// Adds the source line to errors that name a step.
    fn locate(&self, e: Error) -> Failure {
        if let Error::Step { step, .. } = &e {
            if let Some(line) = self.doc.op_lines.get(step - 1) {
                return Failure::Engine(format!("line {line}: {e}"));
            }
        }
        e.into()
    }

    fn op_label(&self, op: &ChangeOp) -> String {
        format!("{}({})", op.kind, show(&op.formula, self.alphabet()))
    }

    fn base(&self, sat: &mut SatSolver) -> Result<Outcome> {
        let b = base_after(sat, &self.doc.sequence)?;
        let text = show(&b, self.alphabet());
        Ok(Outcome::ok(if self.json {
            json_text(&json!({ "base": text, "sat_calls": sat.calls() }))
        } else {
            format!("{text}\n")
        }))
    }

    fn entails(&self, sat: &SatSolver, queries: &[Query]) -> Result<Outcome> {
        let mut main = sat.fork();
        let b = base_after(&mut main, &self.doc.sequence)?;
        let verdicts = check_queries(sat, &b, queries, self.jobs)?;
        let calls = main.calls() + verdicts.iter().map(|v| v.1).sum::<u64>();
        let all = verdicts.iter().all(|v| v.0);
        let text = if self.json {
            let items: Vec<_> = queries
                .iter()
                .zip(&verdicts)
                .map(|(q, v)| {
                    json!({
                        "query": q.text,
                        "line": (q.line > 0).then_some(q.line),
                        "entailed": v.0,
                    })
                })
                .collect();
            json_text(&json!({
                "base": show(&b, self.alphabet()),
                "queries": items,
                "sat_calls": calls,
            }))
        } else {
            queries
                .iter()
                .zip(&verdicts)
                .map(|(q, v)| format!("? {}: {}\n", q.text, v.0))
                .collect()
        };
        Ok(Outcome {
            text,
            code: if all { EXIT_OK } else { EXIT_ASSERTION },
        })
    }

    fn trace(&self, sat: &mut SatSolver) -> Result<Outcome> {
        let trace = trace_sequence(sat, &self.doc.sequence)?;
        let a = self.alphabet();
        let steps: Vec<TraceStep> = trace
            .steps
            .iter()
            .map(|s| TraceStep {
                step: s.step,
                op: s.op.kind.keyword(),
                formula: show(&s.op.formula, a),
                base: show(&s.base, a),
                underformula: s.underformula.as_ref().map(|u| show(u, a)),
                sat_calls: s.sat_calls,
            })
            .collect();
        if self.json {
            return Ok(Outcome::ok(json_text(&steps)));
        }
        let mut text = String::new();
        for (s, raw) in steps.iter().zip(&trace.steps) {
            text.push_str(&format!("step {}: {}({})\n", s.step, s.op, s.formula));
            if raw.expansion.len() != 1 || raw.expansion[0] != raw.op {
                let parts: Vec<String> = raw.expansion.iter().map(|op| self.op_label(op)).collect();
                text.push_str(&format!("  expansion: {}\n", parts.join(" ")));
            }
            if let Some(u) = &s.underformula {
                text.push_str(&format!("  underformula: {u}\n"));
            }
            text.push_str(&format!("  base: {}\n  sat calls: {}\n", s.base, s.sat_calls));
        }
        text.push_str(&format!("total sat calls: {}\n", trace.sat_calls));
        Ok(Outcome::ok(text))
    }

    fn expand(&self, sat: &mut SatSolver) -> Result<Outcome> {
        let trace = trace_sequence(sat, &self.doc.sequence)?;
        let a = self.alphabet();
        if self.json {
            let steps: Vec<_> = trace
                .steps
                .iter()
                .map(|s| {
                    let expansion: Vec<_> = s
                        .expansion
                        .iter()
                        .map(|op| json!({ "op": op.kind.keyword(), "formula": show(&op.formula, a) }))
                        .collect();
                    json!({
                        "step": s.step,
                        "op": s.op.kind.keyword(),
                        "formula": show(&s.op.formula, a),
                        "expansion": expansion,
                    })
                })
                .collect();
            return Ok(Outcome::ok(json_text(&steps)));
        }
        let mut text = format!("vars {}\n", a.names().join(" "));
        for s in &trace.steps {
            text.push_str(&format!("# {} {}: {}\n", s.step, s.op.kind, show(&s.op.formula, a)));
            for op in &s.expansion {
                text.push_str(&format!("{}: {}\n", op.kind, show(&op.formula, a)));
            }
        }
        Ok(Outcome::ok(text))
    }

    fn oracle(&self) -> Result<Outcome> {
        let a = self.alphabet();
        let preorders = run_sequence_oracle_trace(&self.doc.sequence, self.cap)
            .map_err(|e| self.step_error(e, &self.doc.sequence.ops))?;
        let tables: Vec<Vec<String>> = preorders
            .iter()
            .map(|c| {
                normalize(c)
                    .classes()
                    .iter()
                    .map(|class| formula_of_models(class, a).render(a))
                    .collect()
            })
            .collect();
        if self.json {
            let steps: Vec<_> = tables
                .iter()
                .enumerate()
                .map(|(k, classes)| match k {
                    0 => json!({ "step": 0, "classes": classes }),
                    _ => {
                        let op = &self.doc.sequence.ops[k - 1];
                        json!({
                            "step": k,
                            "op": op.kind.keyword(),
                            "formula": show(&op.formula, a),
                            "classes": classes,
                        })
                    }
                })
                .collect();
            return Ok(Outcome::ok(json_text(&steps)));
        }
        let mut text = String::new();
        for (k, classes) in tables.iter().enumerate() {
            match k {
                0 => text.push_str("step 0: empty\n"),
                _ => text.push_str(&format!("step {k}: {}\n", self.op_label(&self.doc.sequence.ops[k - 1]))),
            }
            for (i, class) in classes.iter().enumerate() {
                text.push_str(&format!("  C({i}): {class}\n"));
            }
        }
        Ok(Outcome::ok(text))
    }

    /// The oracle reports inconsistent formulas without a step; find it.
    fn step_error(&self, e: Error, ops: &[ChangeOp]) -> Error {
        if !matches!(e, Error::InconsistentFormula { .. }) {
            return e;
        }
        let a = self.alphabet();
        let bad = ops.iter().position(|op| {
            enumerate_models(&op.formula, a, self.cap).is_ok_and(|m| m.is_empty())
        });
        match bad {
            Some(k) => Error::at_step(k + 1, ops[k].render(a), e),
            None => e,
        }
    }

    fn compare(&self, sat: &mut SatSolver) -> Result<Outcome> {
        let a = self.alphabet();
        let seq = &self.doc.sequence;
        let preorders = run_sequence_oracle_trace(seq, self.cap).map_err(|e| self.step_error(e, &seq.ops))?;
        let trace = trace_sequence(sat, seq)?;

        let mut rows = Vec::new();
        let empty_base = enumerate_models(&trace.base(), a, self.cap)?;
        if seq.is_empty() {
            rows.push((0, empty_base == base(&preorders[0])));
        }
        for s in &trace.steps {
            let symbolic = enumerate_models(&s.base, a, self.cap)?;
            rows.push((s.step, symbolic == base(&preorders[s.step])));
        }
        let final_base = base(preorders.last().unwrap());
        let final_formula = trace.base();
        let mut query_rows = Vec::new();
        for q in &self.doc.queries {
            let oracle = final_base.is_subset(&enumerate_models(&q.formula, a, self.cap)?);
            let symbolic = sat.entails(&final_formula, &q.formula)?;
            query_rows.push((q, oracle, symbolic));
        }
        let agree = rows.iter().all(|r| r.1) && query_rows.iter().all(|r| r.1 == r.2);

        let text = if self.json {
            let steps: Vec<_> = rows.iter().map(|(k, ok)| json!({ "step": k, "agree": ok })).collect();
            let queries: Vec<_> = query_rows
                .iter()
                .map(|(q, o, s)| json!({ "query": q.text, "oracle": o, "symbolic": s, "agree": o == s }))
                .collect();
            json_text(&json!({ "steps": steps, "queries": queries, "agree": agree }))
        } else {
            let mut text = String::new();
            for (k, ok) in &rows {
                let label = match k {
                    0 => "empty".to_string(),
                    _ => self.op_label(&seq.ops[k - 1]),
                };
                text.push_str(&format!("step {k}: {label}: {}\n", if *ok { "ok" } else { "MISMATCH" }));
            }
            for (q, o, s) in &query_rows {
                let status = if o == s { "ok".to_string() } else { format!("MISMATCH (oracle {o}, symbolic {s})") };
                text.push_str(&format!("? {}: {}: {status}\n", q.text, o));
            }
            text.push_str(if agree { "engines agree\n" } else { "engines disagree\n" });
            text
        };
        Ok(Outcome {
            text,
            code: if agree { EXIT_OK } else { EXIT_ASSERTION },
        })
    }

    fn stats(&self, sat: &mut SatSolver) -> Result<Outcome> {
        let trace = trace_sequence(sat, &self.doc.sequence)?;
        let largest = trace.underformulae.iter().map(|(_, b)| b.dag_size()).max().unwrap_or(0);
        if self.json {
            let steps: Vec<_> = trace
                .steps
                .iter()
                .map(|s| json!({ "step": s.step, "op": s.op.kind.keyword(), "sat_calls": s.sat_calls }))
                .collect();
            return Ok(Outcome::ok(json_text(&json!({
                "operators": self.doc.sequence.len(),
                "core_operators": trace.core.len(),
                "underformulae": trace.underformulae.len(),
                "largest_underformula": largest,
                "steps": steps,
                "sat_calls": trace.sat_calls,
            }))));
        }
        let mut text = format!(
            "operators: {}\ncore operators: {}\nunderformulae: {}\nlargest underformula: {} nodes\n",
            self.doc.sequence.len(),
            trace.core.len(),
            trace.underformulae.len(),
            largest
        );
        for s in &trace.steps {
            text.push_str(&format!("step {} ({}): {} sat calls\n", s.step, s.op.kind, s.sat_calls));
        }
        text.push_str(&format!("total sat calls: {}\n", trace.sat_calls));
        Ok(Outcome::ok(text))
    }
}

/// Entailment of every query by `base`, spread over `jobs` threads with one
/// solver each. Returns the verdict and call count per query.
fn check_queries(sat: &SatSolver, base: &Formula, queries: &[Query], jobs: usize) -> Result<Vec<(bool, u64)>> {
    let jobs = jobs.clamp(1, queries.len().max(1));
    let mut results: Vec<Option<Result<(bool, u64)>>> = vec![None; queries.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let solver = sat.fork();
                scope.spawn(move || {
                    let mut solver = solver;
                    (j..queries.len())
                        .step_by(jobs)
                        .map(|i| {
                            let before = solver.calls();
                            let verdict = solver.entails(base, &queries[i].formula).map_err(Error::from);
                            (i, verdict.map(|v| (v, solver.calls() - before)))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("query thread panicked") {
                results[i] = Some(r);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every query evaluated")).collect()
}
