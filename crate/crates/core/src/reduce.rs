//! Rewriting every operator into lexicographic revisions, refinements and
//! severe antiwithdrawals.
//!
//! Auxiliary formulas such as `K = Form(min(C, P))` are obtained from the
//! symbolic engine over the already rewritten prefix, so no preorder is ever
//! built explicitly.

use crate::error::{Error, Result};
use crate::formula::{Alphabet, Formula};
use crate::preorder::{ChangeOp, ChangeSequence, OpKind};
use crate::sat::SatSolver;
use crate::symbolic::{back_bounce_forth, UnderformulaCache};

/// A sequence made only of `lex`, `refi` and `sev`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSequence {
    alphabet: Alphabet,
    ops: Vec<ChangeOp>,
}

impl CoreSequence {
    pub fn new(alphabet: Alphabet, ops: Vec<ChangeOp>) -> Result<Self> {
        let mut core = Self::empty(alphabet);
        for op in ops {
            core.push(op)?;
        }
        Ok(core)
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        CoreSequence {
            alphabet,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: ChangeOp) -> Result<()> {
        if !op.kind.is_core() {
            return Err(Error::Precondition(format!(
                "`{}` is not one of lex, refi, sev",
                op.kind
            )));
        }
        op.formula.check_alphabet(&self.alphabet)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn ops(&self) -> &[ChangeOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The first `len` operators.
    pub fn prefix(&self, len: usize) -> CoreSequence {
        CoreSequence {
            alphabet: self.alphabet.clone(),
            ops: self.ops[..len].to_vec(),
        }
    }

    fn with(&self, op: ChangeOp) -> CoreSequence {
        let mut next = self.clone();
        next.ops.push(op);
        next
    }

    pub fn into_change_sequence(self) -> ChangeSequence {
        ChangeSequence {
            alphabet: self.alphabet,
            ops: self.ops,
        }
    }
}

fn require_consistent(sat: &mut SatSolver, f: &Formula, alphabet: &Alphabet) -> Result<()> {
    if sat.is_consistent(f)? {
        Ok(())
    } else {
        Err(Error::InconsistentFormula {
            formula: f.render(alphabet),
        })
    }
}

/// `min(prefix, P)` as a formula, extending a scratch copy of the cache.
fn min_formula(
    sat: &mut SatSolver,
    core: &CoreSequence,
    cache: &UnderformulaCache,
    p: &Formula,
) -> Result<Formula> {
    let mut cache = cache.clone();
    cache.extend(sat, core)?;
    back_bounce_forth(sat, core, p, &cache)
}

/// Replacement for `op` after `prefix`, given the underformulae of `prefix`.
pub fn expand_op_cached(
    sat: &mut SatSolver,
    prefix: &CoreSequence,
    cache: &UnderformulaCache,
    op: &ChangeOp,
) -> Result<Vec<ChangeOp>> {
    let alphabet = prefix.alphabet();
    op.formula.check_alphabet(alphabet)?;
    let p = &op.formula;
    require_consistent(sat, p, alphabet)?;
    let not_p = Formula::negate(p);

    Ok(match op.kind {
        OpKind::Lex | OpKind::Refi | OpKind::Sev => vec![op.clone()],
        OpKind::Nat => {
            let k = min_formula(sat, prefix, cache, p)?;
            vec![ChangeOp::lex(k)]
        }
        OpKind::Res => {
            let refi = ChangeOp::refi(p.clone());
            let k = min_formula(sat, &prefix.with(refi.clone()), cache, p)?;
            vec![refi, ChangeOp::lex(k)]
        }
        OpKind::Rad => {
            let mut out = Vec::with_capacity(3);
            if sat.is_consistent(&not_p)? {
                out.push(ChangeOp::lex(not_p));
            }
            out.push(ChangeOp::sev(p.clone()));
            out.push(ChangeOp::lex(p.clone()));
            out
        }
        OpKind::Sevr => {
            let sev = ChangeOp::sev(p.clone());
            let k = min_formula(sat, &prefix.with(sev.clone()), cache, p)?;
            vec![sev, ChangeOp::lex(k)]
        }
        OpKind::Msev => vec![ChangeOp::sev(p.clone()), ChangeOp::lex(p.clone())],
        OpKind::Psev => {
            let k = min_formula(sat, prefix, cache, p)?;
            let hypothetical = prefix.with(ChangeOp::sev(p.clone()));
            let k2 = min_formula(sat, &hypothetical, cache, &Formula::top())?;
            let not_k2 = Formula::negate(&k2);
            if sat.is_consistent(&not_k2)? {
                vec![ChangeOp::sev(not_k2), ChangeOp::lex(k)]
            } else {
                // C sev(P) has a single class, where plain severe and full
                // meet revision coincide.
                full_meet(sat, k)?
            }
        }
        OpKind::Full => {
            let k = min_formula(sat, prefix, cache, p)?;
            full_meet(sat, k)?
        }
    })
}

fn full_meet(sat: &mut SatSolver, k: Formula) -> Result<Vec<ChangeOp>> {
    let not_k = Formula::negate(&k);
    let mut out = Vec::with_capacity(3);
    if sat.is_consistent(&not_k)? {
        out.push(ChangeOp::lex(not_k));
    }
    out.push(ChangeOp::sev(k.clone()));
    out.push(ChangeOp::lex(k));
    Ok(out)
}

/// Replacement for `op` after `prefix`.
pub fn expand_op(sat: &mut SatSolver, prefix: &CoreSequence, op: &ChangeOp) -> Result<Vec<ChangeOp>> {
    let mut cache = UnderformulaCache::default();
    cache.extend(sat, prefix)?;
    expand_op_cached(sat, prefix, &cache, op)
}

/// Incremental left fold of [`expand_op_cached`] that keeps the underformula
/// cache of the expanded prefix up to date.
#[derive(Debug, Clone)]
pub struct Expander {
    core: CoreSequence,
    cache: UnderformulaCache,
}

impl Expander {
    pub fn new(alphabet: Alphabet) -> Self {
        Expander {
            core: CoreSequence::empty(alphabet),
            cache: UnderformulaCache::default(),
        }
    }

    /// Expands and appends one operator; returns its replacement.
    pub fn push(&mut self, sat: &mut SatSolver, op: &ChangeOp) -> Result<Vec<ChangeOp>> {
        let ops = expand_op_cached(sat, &self.core, &self.cache, op)?;
        for core_op in &ops {
            self.core.push(core_op.clone())?;
        }
        self.cache.extend(sat, &self.core)?;
        Ok(ops)
    }

    pub fn core(&self) -> &CoreSequence {
        &self.core
    }

    pub fn cache(&self) -> &UnderformulaCache {
        &self.cache
    }

    pub fn into_parts(self) -> (CoreSequence, UnderformulaCache) {
        (self.core, self.cache)
    }
}

/// Expands a whole sequence; errors name the 1-based step that failed.
pub fn expand_sequence_cached(
    sat: &mut SatSolver,
    seq: &ChangeSequence,
) -> Result<(CoreSequence, UnderformulaCache)> {
    let mut expander = Expander::new(seq.alphabet.clone());
    for (k, op) in seq.ops.iter().enumerate() {
        expander
            .push(sat, op)
            .map_err(|e| Error::at_step(k + 1, op.render(&seq.alphabet), e))?;
    }
    Ok(expander.into_parts())
}

pub fn expand_sequence(sat: &mut SatSolver, seq: &ChangeSequence) -> Result<CoreSequence> {
    Ok(expand_sequence_cached(sat, seq)?.0)
}
