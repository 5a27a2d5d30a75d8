//! Tseitin encoding of formulas into CNF, and DIMACS text in both directions.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::formula::{Alphabet, Formula, Node, VarId};

use super::SatError;

/// Clauses over variables `1..=num_vars`, literals in DIMACS sign convention.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads a DIMACS CNF document. Comment lines (`c ...`) are skipped and
    /// clauses may span lines.
    pub fn from_dimacs(text: &str) -> Result<Cnf, SatError> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let parsed = match parts.as_slice() {
                    ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                    _ => None,
                };
                let Some(h) = parsed else {
                    return Err(SatError::Dimacs(format!("line {}: bad header `{line}`", lineno + 1)));
                };
                header = Some(h);
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(SatError::Dimacs(format!("line {}: clause before header", lineno + 1)));
            };
            for word in line.split_whitespace() {
                let lit: i32 = word
                    .parse()
                    .map_err(|_| SatError::Dimacs(format!("line {}: bad literal `{word}`", lineno + 1)))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() > num_vars {
                    return Err(SatError::Dimacs(format!(
                        "line {}: literal {lit} exceeds declared {num_vars} variables",
                        lineno + 1
                    )));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((num_vars, num_clauses)) = header else {
            return Err(SatError::Dimacs("missing `p cnf` header".into()));
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != num_clauses {
            return Err(SatError::Dimacs(format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        Ok(Cnf { num_vars, clauses })
    }
}

/// An equisatisfiable CNF for a formula together with the DIMACS index of
/// every alphabet variable the formula mentions.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub cnf: Cnf,
    /// `(alphabet variable, DIMACS index)`, ascending. Indices are `1..=k`.
    pub var_map: Vec<(VarId, u32)>,
}

impl Encoding {
    /// Number of leading DIMACS variables that stand for alphabet variables.
    pub fn num_primary(&self) -> u32 {
        self.var_map.len() as u32
    }
}

/// A DIMACS document plus the mapping from alphabet names to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsExport {
    pub text: String,
    pub var_map: Vec<(String, u32)>,
}

pub fn export_dimacs(f: &Formula, alphabet: &Alphabet) -> DimacsExport {
    let enc = tseitin(f);
    DimacsExport {
        text: enc.cnf.to_dimacs(),
        var_map: enc
            .var_map
            .iter()
            .map(|(v, i)| (alphabet.names().get(*v).cloned().unwrap_or_default(), *i))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy)]
enum Enc {
    Const(bool),
    Lit(i32),
}

struct Encoder {
    cnf: Cnf,
    primary: HashMap<VarId, i32>,
    memo: HashMap<*const Node, Enc>,
    asserted: HashSet<*const Node>,
}

/// Tseitin transformation. Alphabet variables occurring in `f` get the
/// first DIMACS indices in ascending alphabet order; gates get the rest.
/// Constants are folded away, and top-level conjunctions and disjunctions are
/// asserted directly instead of through a gate.
pub fn tseitin(f: &Formula) -> Encoding {
    let vars = f.variables();
    let primary: HashMap<VarId, i32> = vars.iter().enumerate().map(|(i, v)| (*v, i as i32 + 1)).collect();
    let mut enc = Encoder {
        cnf: Cnf {
            num_vars: vars.len() as u32,
            clauses: Vec::new(),
        },
        primary,
        memo: HashMap::new(),
        asserted: HashSet::new(),
    };
    enc.assert(f);
    Encoding {
        cnf: enc.cnf,
        var_map: vars.iter().enumerate().map(|(i, v)| (*v, i as u32 + 1)).collect(),
    }
}

impl Encoder {
    fn fresh(&mut self) -> i32 {
        self.cnf.num_vars += 1;
        self.cnf.num_vars as i32
    }

    fn clause(&mut self, lits: Vec<i32>) {
        self.cnf.clauses.push(lits);
    }

    fn assert_false(&mut self) {
        let v = self.fresh();
        self.clause(vec![v]);
        self.clause(vec![-v]);
    }

    fn assert(&mut self, f: &Formula) {
        if !self.asserted.insert(f.addr()) {
            return;
        }
        match f.node() {
            Node::And(items) => {
                for item in items {
                    self.assert(item);
                }
            }
            Node::Or(items) => {
                let mut lits = Vec::with_capacity(items.len());
                for item in items {
                    match self.encode(item) {
                        Enc::Const(true) => return,
                        Enc::Const(false) => {}
                        Enc::Lit(l) => lits.push(l),
                    }
                }
                if lits.is_empty() {
                    self.assert_false();
                } else {
                    self.clause(lits);
                }
            }
            _ => match self.encode(f) {
                Enc::Const(true) => {}
                Enc::Const(false) => self.assert_false(),
                Enc::Lit(l) => self.clause(vec![l]),
            },
        }
    }

    fn encode(&mut self, f: &Formula) -> Enc {
        if let Some(e) = self.memo.get(&f.addr()) {
            return *e;
        }
        let e = match f.node() {
            Node::True => Enc::Const(true),
            Node::False => Enc::Const(false),
            Node::Var(v) => Enc::Lit(self.primary[v]),
            Node::Not(g) => match self.encode(g) {
                Enc::Const(b) => Enc::Const(!b),
                Enc::Lit(l) => Enc::Lit(-l),
            },
            Node::And(items) => {
                let lits = self.encode_all(items, true);
                match lits {
                    None => Enc::Const(false),
                    Some(lits) => self.gate_and(lits),
                }
            }
            Node::Or(items) => {
                let lits = self.encode_all(items, false);
                match lits {
                    None => Enc::Const(true),
                    Some(lits) => match self.gate_and(lits.iter().map(|l| -l).collect()) {
                        Enc::Const(b) => Enc::Const(!b),
                        Enc::Lit(l) => Enc::Lit(-l),
                    },
                }
            }
            Node::Implies([a, b]) => {
                let na = match self.encode(a) {
                    Enc::Const(x) => Enc::Const(!x),
                    Enc::Lit(l) => Enc::Lit(-l),
                };
                let b = self.encode(b);
                match (na, b) {
                    (Enc::Const(true), _) | (_, Enc::Const(true)) => Enc::Const(true),
                    (Enc::Const(false), x) | (x, Enc::Const(false)) => x,
                    (Enc::Lit(x), Enc::Lit(y)) => match self.gate_and(vec![-x, -y]) {
                        Enc::Lit(l) => Enc::Lit(-l),
                        Enc::Const(c) => Enc::Const(!c),
                    },
                }
            }
            Node::Iff([a, b]) => {
                let a = self.encode(a);
                let b = self.encode(b);
                match (a, b) {
                    (Enc::Const(x), Enc::Const(y)) => Enc::Const(x == y),
                    (Enc::Const(true), x) | (x, Enc::Const(true)) => x,
                    (Enc::Const(false), Enc::Lit(l)) | (Enc::Lit(l), Enc::Const(false)) => Enc::Lit(-l),
                    (Enc::Lit(x), Enc::Lit(y)) => {
                        let g = self.fresh();
                        self.clause(vec![-g, -x, y]);
                        self.clause(vec![-g, x, -y]);
                        self.clause(vec![g, x, y]);
                        self.clause(vec![g, -x, -y]);
                        Enc::Lit(g)
                    }
                }
            }
        };
        self.memo.insert(f.addr(), e);
        e
    }

    /// Encodes the operands of an n-ary node whose absorbing constant is
    /// `!unit`. Returns `None` when an operand is that absorbing constant.
    fn encode_all(&mut self, items: &[Formula], unit: bool) -> Option<Vec<i32>> {
        let mut lits = Vec::with_capacity(items.len());
        for item in items {
            match self.encode(item) {
                Enc::Const(b) if b == unit => {}
                Enc::Const(_) => return None,
                Enc::Lit(l) => lits.push(l),
            }
        }
        Some(lits)
    }

    fn gate_and(&mut self, mut lits: Vec<i32>) -> Enc {
        lits.sort_unstable();
        lits.dedup();
        match lits.len() {
            0 => return Enc::Const(true),
            1 => return Enc::Lit(lits[0]),
            _ => {}
        }
        if lits.iter().any(|l| lits.binary_search(&-l).is_ok()) {
            return Enc::Const(false);
        }
        let g = self.fresh();
        let mut long = Vec::with_capacity(lits.len() + 1);
        long.push(g);
        for &l in &lits {
            self.clause(vec![-g, l]);
            long.push(-l);
        }
        self.clause(long);
        Enc::Lit(g)
    }
}
