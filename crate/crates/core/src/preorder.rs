//! Explicit total preorders and definitional implementations of every
//! change operator. Exponential in the alphabet size; this is the ground
//! truth the symbolic engine is tested against.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{enumerate_models, formula_of_models, Alphabet, Formula, ModelSet, MAX_ORACLE_VARS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Lex,
    Refi,
    Sev,
    Nat,
    Res,
    Rad,
    Sevr,
    Msev,
    Psev,
    Full,
}

impl OpKind {
    pub const ALL: [OpKind; 10] = [
        OpKind::Lex,
        OpKind::Refi,
        OpKind::Sev,
        OpKind::Nat,
        OpKind::Res,
        OpKind::Rad,
        OpKind::Sevr,
        OpKind::Msev,
        OpKind::Psev,
        OpKind::Full,
    ];

    /// Kinds satisfying `min(C op(P), T) = min(C, P)`.
    pub const REVISIONS: [OpKind; 8] = [
        OpKind::Lex,
        OpKind::Nat,
        OpKind::Res,
        OpKind::Rad,
        OpKind::Sevr,
        OpKind::Msev,
        OpKind::Psev,
        OpKind::Full,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            OpKind::Lex => "lex",
            OpKind::Refi => "refi",
            OpKind::Sev => "sev",
            OpKind::Nat => "nat",
            OpKind::Res => "res",
            OpKind::Rad => "rad",
            OpKind::Sevr => "sevr",
            OpKind::Msev => "msev",
            OpKind::Psev => "psev",
            OpKind::Full => "full",
        }
    }

    pub fn from_keyword(word: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Lexicographic revision, refinement and severe antiwithdrawal.
    pub fn is_core(self) -> bool {
        matches!(self, OpKind::Lex | OpKind::Refi | OpKind::Sev)
    }

    pub fn is_revision(self) -> bool {
        OpKind::REVISIONS.contains(&self)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeOp {
    pub kind: OpKind,
    pub formula: Formula,
}

impl ChangeOp {
    pub fn new(kind: OpKind, formula: Formula) -> Self {
        ChangeOp { kind, formula }
    }

    pub fn lex(formula: Formula) -> Self {
        Self::new(OpKind::Lex, formula)
    }

    pub fn refi(formula: Formula) -> Self {
        Self::new(OpKind::Refi, formula)
    }

    pub fn sev(formula: Formula) -> Self {
        Self::new(OpKind::Sev, formula)
    }

    /// `kind(formula)`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        format!("{}({})", self.kind, self.formula.render(alphabet))
    }
}

/// Operators applied left to right, starting from the empty preorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeSequence {
    pub alphabet: Alphabet,
    pub ops: Vec<ChangeOp>,
}

impl ChangeSequence {
    pub fn new(alphabet: Alphabet, ops: Vec<ChangeOp>) -> Result<Self> {
        for op in &ops {
            op.formula.check_alphabet(&alphabet)?;
        }
        Ok(ChangeSequence { alphabet, ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A partition of all interpretations into classes `C(0), ..., C(m)`, most
/// plausible first. Classes may be empty.
#[derive(Clone, PartialEq, Eq)]
pub struct TotalPreorder {
    alphabet: Alphabet,
    classes: Vec<ModelSet>,
}

impl TotalPreorder {
    /// Checks that `classes` partition the interpretations of `alphabet`.
    pub fn new(alphabet: Alphabet, classes: Vec<ModelSet>) -> Result<Self> {
        alphabet.check_cap(MAX_ORACLE_VARS)?;
        let n = alphabet.len();
        let mut seen = ModelSet::empty(n);
        for class in &classes {
            if class.num_vars() != n {
                return Err(Error::AlphabetMismatch);
            }
            if !class.is_disjoint(&seen) {
                return Err(Error::Precondition("classes overlap".into()));
            }
            seen = seen.union(class);
        }
        if seen != ModelSet::full(n) {
            return Err(Error::Precondition("classes do not cover every interpretation".into()));
        }
        Ok(TotalPreorder { alphabet, classes })
    }

    /// Builds a preorder from class formulas, which must partition the models.
    pub fn from_formulas(alphabet: Alphabet, classes: &[Formula], cap: usize) -> Result<Self> {
        let sets = classes
            .iter()
            .map(|f| enumerate_models(f, &alphabet, cap))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, sets)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn classes(&self) -> &[ModelSet] {
        &self.classes
    }

    pub fn class(&self, k: usize) -> Option<&ModelSet> {
        self.classes.get(k)
    }

    /// `Form(C(k))` for every class.
    pub fn class_formulas(&self) -> Vec<Formula> {
        self.classes
            .iter()
            .map(|c| formula_of_models(c, &self.alphabet))
            .collect()
    }

    fn models(&self, f: &Formula) -> Result<ModelSet> {
        enumerate_models(f, &self.alphabet, MAX_ORACLE_VARS)
    }

    fn num_vars(&self) -> usize {
        self.alphabet.len()
    }
}

impl fmt::Debug for TotalPreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.classes).finish()
    }
}

/// `[Mod(T)]`.
pub fn empty_preorder(alphabet: &Alphabet, cap: usize) -> Result<TotalPreorder> {
    alphabet.check_cap(cap)?;
    Ok(TotalPreorder {
        classes: vec![ModelSet::full(alphabet.len())],
        alphabet: alphabet.clone(),
    })
}

fn min_index(c: &TotalPreorder, p: &ModelSet) -> Option<usize> {
    c.classes.iter().position(|class| !class.is_disjoint(p))
}

/// `min(C, P)`: the models of `P` in the first class containing any. Empty
/// when `P` is inconsistent.
pub fn min_models(c: &TotalPreorder, p: &Formula) -> Result<ModelSet> {
    let mp = c.models(p)?;
    Ok(match min_index(c, &mp) {
        Some(i) => c.classes[i].intersection(&mp),
        None => ModelSet::empty(c.num_vars()),
    })
}

/// The first non-empty class.
pub fn base(c: &TotalPreorder) -> ModelSet {
    c.classes
        .iter()
        .find(|class| !class.is_empty())
        .cloned()
        .unwrap_or_else(|| ModelSet::empty(c.num_vars()))
}

pub fn normalize(c: &TotalPreorder) -> TotalPreorder {
    TotalPreorder {
        alphabet: c.alphabet.clone(),
        classes: c.classes.iter().filter(|k| !k.is_empty()).cloned().collect(),
    }
}

/// Equal class lists once empty classes are dropped. This coincides with
/// agreement of `min` on every formula, since `min(C, Form({I, J}))`
/// exposes the relative order of any two models.
pub fn equivalent_preorders(c1: &TotalPreorder, c2: &TotalPreorder) -> Result<bool> {
    if c1.alphabet != c2.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    Ok(normalize(c1).classes == normalize(c2).classes)
}

fn union_upto(classes: &[ModelSet], last: usize, n: usize) -> ModelSet {
    classes
        .iter()
        .take(last + 1)
        .fold(ModelSet::empty(n), |acc, c| acc.union(c))
}

/// Applies one operator by its definition. Empty classes produced by the
/// definition are kept.
pub fn apply(c: &TotalPreorder, op: &ChangeOp) -> Result<TotalPreorder> {
    op.formula.check_alphabet(&c.alphabet)?;
    let n = c.num_vars();
    let p = c.models(&op.formula)?;
    let Some(i) = min_index(c, &p) else {
        return Err(Error::InconsistentFormula {
            formula: op.formula.render(&c.alphabet),
        });
    };
    let cls = &c.classes;
    let inside = |k: usize| cls[k].intersection(&p);
    let outside = |k: usize| cls[k].difference(&p);
    let m = cls.len();
    let all = ModelSet::full(n);

    let classes: Vec<ModelSet> = match op.kind {
        OpKind::Lex => (0..m).map(inside).chain((0..m).map(outside)).collect(),
        OpKind::Refi => (0..m).flat_map(|k| [inside(k), outside(k)]).collect(),
        OpKind::Sev => std::iter::once(union_upto(cls, i, n))
            .chain(cls[i + 1..].iter().cloned())
            .collect(),
        OpKind::Nat => std::iter::once(inside(i))
            .chain(cls[..i].iter().cloned())
            .chain(std::iter::once(outside(i)))
            .chain(cls[i + 1..].iter().cloned())
            .collect(),
        OpKind::Res => {
            let mut out = vec![inside(i)];
            for k in 0..i {
                out.push(inside(k));
                out.push(outside(k));
            }
            out.push(outside(i));
            for k in i + 1..m {
                out.push(inside(k));
                out.push(outside(k));
            }
            out
        }
        OpKind::Rad => (0..m)
            .map(inside)
            .chain(std::iter::once(all.difference(&p)))
            .collect(),
        OpKind::Sevr => [inside(i), union_upto(cls, i, n).difference(&p)]
            .into_iter()
            .chain(cls[i + 1..].iter().cloned())
            .collect(),
        OpKind::Msev => (0..m)
            .map(inside)
            .chain(std::iter::once(union_upto(cls, i, n).difference(&p)))
            .chain((i + 1..m).map(outside))
            .collect(),
        OpKind::Psev => {
            let j = (i + 1..m).find(|&k| !cls[k].is_empty()).unwrap_or(i + 1);
            let top = inside(i);
            let second = union_upto(cls, j, n).difference(&top);
            [top, second]
                .into_iter()
                .chain(cls.iter().skip(j + 1).cloned())
                .collect()
        }
        OpKind::Full => {
            let top = inside(i);
            let rest = all.difference(&top);
            vec![top, rest]
        }
    };
    Ok(TotalPreorder {
        alphabet: c.alphabet.clone(),
        classes,
    })
}

/// `∅ op_1 ... op_n`.
pub fn run_sequence_oracle(seq: &ChangeSequence, cap: usize) -> Result<TotalPreorder> {
    let mut c = empty_preorder(&seq.alphabet, cap)?;
    for op in &seq.ops {
        c = apply(&c, op)?;
    }
    Ok(c)
}

/// Every intermediate preorder, starting with `∅`; `len() == seq.len() + 1`.
pub fn run_sequence_oracle_trace(seq: &ChangeSequence, cap: usize) -> Result<Vec<TotalPreorder>> {
    let mut trace = vec![empty_preorder(&seq.alphabet, cap)?];
    for op in &seq.ops {
        let next = apply(trace.last().unwrap(), op)?;
        trace.push(next);
    }
    Ok(trace)
}

/// Whether `C op(P)` starts with `C(0) ∩ Mod(P)` followed by `C(0) \ Mod(P)`
/// (the latter only required when non-empty). Classes are compared after
/// dropping empty ones on both sides.
pub fn is_bottom_refining_instance(c: &TotalPreorder, p: &Formula, kind: OpKind) -> Result<bool> {
    let c = normalize(c);
    let mp = c.models(p)?;
    let Some(c0) = c.classes.first() else {
        return Err(Error::Precondition("preorder has no non-empty class".into()));
    };
    let inside = c0.intersection(&mp);
    if inside.is_empty() {
        return Err(Error::Precondition(
            "the first class contains no model of the formula".into(),
        ));
    }
    let outside = c0.difference(&mp);
    let result = normalize(&apply(&c, &ChangeOp::new(kind, p.clone()))?);
    let first_ok = result.classes.first() == Some(&inside);
    let second_ok = outside.is_empty() || result.classes.get(1) == Some(&outside);
    Ok(first_ok && second_ok)
}
