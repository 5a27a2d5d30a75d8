//! Propositional formulas over an explicitly declared alphabet.
//!
//! Formulas are immutable DAGs: subterms are reference counted and shared,
//! so a formula that mentions another one many times costs one node per
//! occurrence site, not one copy per occurrence. Everything that walks a
//! formula (model enumeration, CNF encoding, size accounting) memoizes on
//! node identity.

mod models;
mod parse;
mod simplify;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use models::{enumerate_models, formula_of_models, Interpretation, ModelSet};
pub use parse::parse_formula;

/// Index of a variable in its [`Alphabet`].
pub type VarId = usize;

/// Variables above this many are never enumerated, whatever the configured cap.
pub const MAX_ORACLE_VARS: usize = 30;

pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Clone)]
pub struct Alphabet {
    names: Arc<Vec<String>>,
    index: Arc<HashMap<String, VarId>>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Alphabet(format!("`{name}` is not a valid variable name")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Alphabet(format!("variable `{name}` declared twice")));
            }
        }
        Ok(Alphabet {
            names: Arc::new(names),
            index: Arc::new(index),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.names[var]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    /// Fails when the alphabet is too large to enumerate all of its models.
    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let cap = cap.min(MAX_ORACLE_VARS);
        if self.len() > cap {
            return Err(Error::CapExceeded {
                vars: self.len(),
                cap,
            });
        }
        Ok(())
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// `T` and `F` are reserved for the constants.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && name != "T"
        && name != "F"
}

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    Var(VarId),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies([Formula; 2]),
    Iff([Formula; 2]),
}

#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl Formula {
    fn from_node(node: Node) -> Self {
        Formula(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn top() -> Self {
        Self::from_node(Node::True)
    }

    pub fn bottom() -> Self {
        Self::from_node(Node::False)
    }

    pub fn var(var: VarId) -> Self {
        Self::from_node(Node::Var(var))
    }

    /// Plain negation node, no simplification.
    pub fn not(f: Formula) -> Self {
        Self::from_node(Node::Not(f))
    }

    /// Negation that folds constants and cancels a double negation.
    pub fn negate(f: &Formula) -> Self {
        match f.node() {
            Node::True => Self::bottom(),
            Node::False => Self::top(),
            Node::Not(inner) => inner.clone(),
            _ => Self::not(f.clone()),
        }
    }

    /// Conjunction of the given formulas; the empty conjunction is `T` and a
    /// single conjunct is returned as is.
    pub fn and<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.len() {
            0 => Self::top(),
            1 => items.pop().unwrap(),
            _ => Self::from_node(Node::And(items)),
        }
    }

    pub fn or<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.len() {
            0 => Self::bottom(),
            1 => items.pop().unwrap(),
            _ => Self::from_node(Node::Or(items)),
        }
    }

    pub fn and2(a: Formula, b: Formula) -> Self {
        Self::and([a, b])
    }

    pub fn or2(a: Formula, b: Formula) -> Self {
        Self::or([a, b])
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::from_node(Node::Implies([a, b]))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::from_node(Node::Iff([a, b]))
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn children(&self) -> &[Formula] {
        match self.node() {
            Node::True | Node::False | Node::Var(_) => &[],
            Node::Not(f) => std::slice::from_ref(f),
            Node::And(fs) | Node::Or(fs) => fs,
            Node::Implies(pair) | Node::Iff(pair) => pair,
        }
    }

    /// Number of distinct nodes, counting shared subterms once.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f.addr()) {
                stack.extend(f.children());
            }
        }
        seen.len()
    }

    /// Highest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<VarId> {
        self.variables().into_iter().max()
    }

    pub fn variables(&self) -> Vec<VarId> {
        let mut seen = HashSet::new();
        let mut vars = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.addr()) {
                continue;
            }
            if let Node::Var(v) = f.node() {
                vars.push(*v);
            }
            stack.extend(f.children());
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn eval(&self, interp: Interpretation) -> bool {
        match self.node() {
            Node::True => true,
            Node::False => false,
            Node::Var(v) => interp.get(*v),
            Node::Not(f) => !f.eval(interp),
            Node::And(fs) => fs.iter().all(|f| f.eval(interp)),
            Node::Or(fs) => fs.iter().any(|f| f.eval(interp)),
            Node::Implies([a, b]) => !a.eval(interp) || b.eval(interp),
            Node::Iff([a, b]) => a.eval(interp) == b.eval(interp),
        }
    }

    /// Checks that every variable belongs to `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        match self.max_var() {
            Some(v) if v >= alphabet.len() => Err(Error::Precondition(format!(
                "formula mentions variable #{v}, outside an alphabet of {} variables",
                alphabet.len()
            ))),
            _ => Ok(()),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayFormula<'a> {
        DisplayFormula {
            formula: self,
            alphabet: Some(alphabet),
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        self.display(alphabet).to_string()
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.0 == other.0
    }
}

impl Eq for Formula {}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, None, Prec::Iff)
    }
}

pub struct DisplayFormula<'a> {
    formula: &'a Formula,
    alphabet: Option<&'a Alphabet>,
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, self.alphabet, Prec::Iff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Iff,
    Imp,
    Or,
    And,
    Not,
    Atom,
}

fn prec_of(f: &Formula) -> Prec {
    match f.node() {
        Node::True | Node::False | Node::Var(_) => Prec::Atom,
        Node::Not(_) => Prec::Not,
        Node::And(_) => Prec::And,
        Node::Or(_) => Prec::Or,
        Node::Implies(..) => Prec::Imp,
        Node::Iff(..) => Prec::Iff,
    }
}

/// Writes `f`, parenthesized unless it binds at least as tightly as `min`.
fn write_formula(
    out: &mut fmt::Formatter<'_>,
    f: &Formula,
    alphabet: Option<&Alphabet>,
    min: Prec,
) -> fmt::Result {
    let parens = prec_of(f) < min;
    if parens {
        out.write_str("(")?;
    }
    match f.node() {
        Node::True => out.write_str("T")?,
        Node::False => out.write_str("F")?,
        Node::Var(v) => match alphabet {
            Some(a) if *v < a.len() => out.write_str(a.name(*v))?,
            _ => write!(out, "v{v}")?,
        },
        Node::Not(g) => {
            out.write_str("!")?;
            write_formula(out, g, alphabet, Prec::Not)?;
        }
        Node::And(gs) | Node::Or(gs) => {
            let (sep, child) = match f.node() {
                Node::And(_) => (" & ", Prec::Not),
                _ => (" | ", Prec::And),
            };
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.write_str(sep)?;
                }
                write_formula(out, g, alphabet, child)?;
            }
        }
        Node::Implies([a, b]) => {
            write_formula(out, a, alphabet, Prec::Or)?;
            out.write_str(" -> ")?;
            write_formula(out, b, alphabet, Prec::Imp)?;
        }
        Node::Iff([a, b]) => {
            write_formula(out, a, alphabet, Prec::Iff)?;
            out.write_str(" <-> ")?;
            write_formula(out, b, alphabet, Prec::Imp)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}
