//! Consistency, entailment and equivalence checks.
//!
//! Every decision goes through [`SatSolver::is_consistent`], which counts its
//! invocations. The builtin backend runs DPLL on a Tseitin encoding; the
//! external backend hands the same DIMACS text to a solver process.

mod cnf;
mod dpll;

use std::io::Write as _;
use std::process::Command;

use thiserror::Error;

use crate::formula::{Alphabet, Formula};

pub use cnf::{export_dimacs, tseitin, Cnf, DimacsExport, Encoding};
pub use dpll::solve as solve_cnf;

/// Environment variable naming the default external solver command.
pub const SOLVER_ENV: &str = "BELIEF_SEQ_SOLVER";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("failed to run solver `{command}`: {message}")]
    Process { command: String, message: String },

    #[error("solver `{command}` produced no `s SATISFIABLE`/`s UNSATISFIABLE` line (exit status {status})")]
    MalformedOutput { command: String, status: String },

    #[error("malformed DIMACS: {0}")]
    Dimacs(String),
}

/// Which procedure decides satisfiability.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Builtin,
    /// Command line template. A `{}` word is replaced by the DIMACS file
    /// path; without one the path is appended as the last argument.
    External(String),
}

impl Backend {
    /// External solver from [`SOLVER_ENV`] if set, builtin otherwise.
    pub fn from_env() -> Self {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Backend::External(cmd),
            _ => Backend::Builtin,
        }
    }
}

/// A satisfiability checker with a per-instance call counter.
#[derive(Debug, Clone, Default)]
pub struct SatSolver {
    backend: Backend,
    calls: u64,
}

impl SatSolver {
    pub fn new(backend: Backend) -> Self {
        SatSolver { backend, calls: 0 }
    }

    pub fn builtin() -> Self {
        Self::new(Backend::Builtin)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// Number of `is_consistent` invocations so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// A fresh solver with the same backend and a zero counter.
    pub fn fork(&self) -> Self {
        Self::new(self.backend.clone())
    }

    pub fn is_consistent(&mut self, f: &Formula) -> Result<bool, SatError> {
        self.calls += 1;
        let encoding = tseitin(f);
        match &self.backend {
            Backend::Builtin => Ok(solve_cnf(&encoding.cnf)),
            Backend::External(command) => run_external(command, &encoding.cnf.to_dimacs()),
        }
    }

    /// One consistency check of `f & !g`.
    pub fn entails(&mut self, f: &Formula, g: &Formula) -> Result<bool, SatError> {
        let counter = Formula::and2(f.clone(), Formula::negate(g));
        Ok(!self.is_consistent(&counter)?)
    }

    pub fn equivalent(&mut self, f: &Formula, g: &Formula) -> Result<bool, SatError> {
        Ok(self.entails(f, g)? && self.entails(g, f)?)
    }
}

fn run_external(command: &str, dimacs: &str) -> Result<bool, SatError> {
    let process_error = |message: String| SatError::Process {
        command: command.to_string(),
        message,
    };
    let mut file = tempfile::Builder::new()
        .prefix("belief-seq-")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| process_error(e.to_string()))?;
    file.write_all(dimacs.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| process_error(e.to_string()))?;
    let path = file.path().to_string_lossy().into_owned();

    let mut words: Vec<String> = command.split_whitespace().map(str::to_string).collect();
    if words.is_empty() {
        return Err(process_error("empty command".into()));
    }
    if let Some(slot) = words.iter_mut().find(|w| w.as_str() == "{}") {
        *slot = path;
    } else {
        words.push(path);
    }
    let output = Command::new(&words[0])
        .args(&words[1..])
        .output()
        .map_err(|e| process_error(e.to_string()))?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    for line in stdout.lines() {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("s") {
            continue;
        }
        match tokens.next() {
            Some("SATISFIABLE") => return Ok(true),
            Some("UNSATISFIABLE") => return Ok(false),
            _ => break,
        }
    }
    Err(SatError::MalformedOutput {
        command: command.to_string(),
        status: output.status.to_string(),
    })
}

/// DIMACS export of a formula over `alphabet`.
pub fn dimacs_for(f: &Formula, alphabet: &Alphabet) -> DimacsExport {
    export_dimacs(f, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{enumerate_models, parse_formula};
    use proptest::prelude::*;

    fn xyz() -> Alphabet {
        Alphabet::new(["x", "y", "z"]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &xyz()).unwrap()
    }

    #[test]
    fn consistency_examples() {
        let mut sat = SatSolver::builtin();
        assert!(!sat.is_consistent(&f("x & !x")).unwrap());
        assert!(sat.is_consistent(&f("T")).unwrap());
        assert!(sat.is_consistent(&f("!z & (z | (!x & y))")).unwrap());
        assert_eq!(sat.calls(), 3);
    }

    #[test]
    fn entailment_examples() {
        let mut sat = SatSolver::builtin();
        assert!(sat.entails(&f("x & y"), &f("y")).unwrap());
        assert!(sat.entails(&f("F"), &f("x | !z")).unwrap());
        assert!(sat.entails(&f("!x & y & !z"), &f("!z")).unwrap());
        assert!(!sat.entails(&f("x | y"), &f("y")).unwrap());
        assert_eq!(sat.calls(), 4);
    }

    #[test]
    fn equivalence_examples() {
        let mut sat = SatSolver::builtin();
        assert!(sat.equivalent(&f("(x & z) | (z | (!x & y))"), &f("z | (!x & y)")).unwrap());
        assert!(sat.equivalent(&f("y | (z | (!x & y))"), &f("y | z")).unwrap());
        let g = f("x -> y <-> z");
        assert!(sat.equivalent(&g, &g).unwrap());
        assert!(!sat.equivalent(&f("x"), &f("y")).unwrap());
    }

    #[test]
    fn missing_external_solver_is_a_process_error() {
        let mut sat = SatSolver::new(Backend::External("/nonexistent/solver-binary".into()));
        assert!(matches!(sat.is_consistent(&f("x")), Err(SatError::Process { .. })));
        assert_eq!(sat.calls(), 1);
    }

    #[test]
    fn unparseable_solver_output_is_not_unsat() {
        let mut sat = SatSolver::new(Backend::External("echo UNKNOWN".into()));
        assert!(matches!(sat.is_consistent(&f("x")), Err(SatError::MalformedOutput { .. })));
    }

    #[test]
    fn external_protocol_reads_status_line() {
        let mut sat = SatSolver::new(Backend::External("echo s UNSATISFIABLE {}".into()));
        assert!(!sat.is_consistent(&f("x")).unwrap());
        let mut sat = SatSolver::new(Backend::External("echo s SATISFIABLE".into()));
        assert!(sat.is_consistent(&f("x & !x")).unwrap());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (0usize..3).prop_map(Formula::var),
            Just(Formula::top()),
            Just(Formula::bottom()),
        ];
        leaf.prop_recursive(6, 40, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::and),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]
        #[test]
        fn builtin_agrees_with_model_enumeration(g in arb_formula()) {
            let a = xyz();
            let mut sat = SatSolver::builtin();
            let expected = !enumerate_models(&g, &a, 20).unwrap().is_empty();
            prop_assert_eq!(sat.is_consistent(&g).unwrap(), expected);
        }

        #[test]
        fn dimacs_text_is_equisatisfiable(g in arb_formula()) {
            let a = xyz();
            let export = export_dimacs(&g, &a);
            let cnf = Cnf::from_dimacs(&export.text).unwrap();
            let expected = !enumerate_models(&g, &a, 20).unwrap().is_empty();
            prop_assert_eq!(solve_cnf(&cnf), expected);
        }
    }
}
