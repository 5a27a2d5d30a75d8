//! Query answering on core sequences with a polynomial number of
//! satisfiability checks.
//!
//! A lexicographic-only sequence is handled by [`maxset`]: walking from the
//! newest formula to the oldest, each one is conjoined when consistent.
//! Refinements commute to the front of such a sequence, so they are
//! processed last, oldest first. A severe antiwithdrawal `sev(S)` is
//! equivalent to lexicographic revisions by its underformula `B`, disjoined
//! to everything before it; once `M & B` is consistent the rest of the
//! prefix is subsumed and the walk turns around to pick up refinements.
//!
//! Formula lists passed to [`maxset`] and [`under`] are newest first.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Alphabet, Formula};
use crate::preorder::{ChangeOp, ChangeSequence, OpKind};
use crate::reduce::{expand_sequence_cached, CoreSequence, Expander};
use crate::sat::SatSolver;

fn require_consistent(sat: &mut SatSolver, f: &Formula, what: &str) -> Result<()> {
    if sat.is_consistent(f)? {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} is inconsistent")))
    }
}

/// `maxset(P, L_n, ..., L_1)`.
pub fn maxset(sat: &mut SatSolver, p: &Formula, newest_first: &[Formula]) -> Result<Formula> {
    require_consistent(sat, p, "the minimized formula")?;
    let mut acc = p.clone();
    for l in newest_first {
        let candidate = Formula::and2(acc.clone(), l.clone());
        if sat.is_consistent(&candidate)? {
            acc = candidate;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
enum Item {
    Conj(Formula),
    Disj(Formula),
}

fn fold_items(items: &[Item]) -> Formula {
    items.iter().rev().fold(Formula::top(), |acc, item| match item {
        Item::Conj(l) => Formula::and2(l.clone(), acc),
        Item::Disj(l) => Formula::or2(l.clone(), acc),
    })
}

/// `under(S; L_n, ..., L_1)`.
pub fn under(sat: &mut SatSolver, s: &Formula, newest_first: &[Formula]) -> Result<Formula> {
    require_consistent(sat, s, "the underformula argument")?;
    let mut acc = s.clone();
    let mut items = Vec::with_capacity(newest_first.len());
    for l in newest_first {
        let candidate = Formula::and2(acc.clone(), l.clone());
        if sat.is_consistent(&candidate)? {
            acc = candidate;
            items.push(Item::Conj(l.clone()));
        } else {
            items.push(Item::Disj(l.clone()));
        }
    }
    Ok(fold_items(&items))
}

/// `longest(L_1, ..., L_n)`: the conjunction of the longest consistent prefix.
pub fn longest(sat: &mut SatSolver, ls: &[Formula]) -> Result<Formula> {
    let Some((first, rest)) = ls.split_first() else {
        return Err(Error::Precondition("longest of an empty list".into()));
    };
    require_consistent(sat, first, "the first formula")?;
    let mut acc = first.clone();
    for l in rest {
        let candidate = Formula::and2(acc.clone(), l.clone());
        if !sat.is_consistent(&candidate)? {
            break;
        }
        acc = candidate;
    }
    Ok(acc)
}

/// Underformulae of the severe antiwithdrawals of a core sequence, keyed by
/// position. Entries are computed left to right; each one depends only on
/// the operators before it.
#[derive(Debug, Clone, Default)]
pub struct UnderformulaCache {
    entries: BTreeMap<usize, Formula>,
    covered: usize,
}

impl UnderformulaCache {
    pub fn get(&self, position: usize) -> Option<&Formula> {
        self.entries.get(&position)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.entries.iter().map(|(p, f)| (*p, f))
    }

    /// Number of leading operators already processed.
    pub fn covered(&self) -> usize {
        self.covered
    }

    /// Computes the entries for operators at positions `covered()..`. The
    /// first `covered()` operators of `core` must be those the cache was
    /// built from.
    pub fn extend(&mut self, sat: &mut SatSolver, core: &CoreSequence) -> Result<()> {
        let ops = core.ops();
        if ops.len() < self.covered {
            return Err(Error::Precondition(
                "core sequence is shorter than the cached prefix".into(),
            ));
        }
        for p in self.covered..ops.len() {
            if ops[p].kind == OpKind::Sev {
                let s = &ops[p].formula;
                if !sat.is_consistent(s)? {
                    return Err(Error::InconsistentFormula {
                        formula: s.render(core.alphabet()),
                    });
                }
                let walked = walk(sat, ops, p, s.clone(), self, true, None)?;
                self.entries.insert(p, fold_items(&walked.items));
            }
            self.covered = p + 1;
        }
        Ok(())
    }
}

pub fn compute_underformulae(sat: &mut SatSolver, core: &CoreSequence) -> Result<UnderformulaCache> {
    let mut cache = UnderformulaCache::default();
    cache.extend(sat, core)?;
    Ok(cache)
}

/// One decision taken by a traversal, by core position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "event", content = "position", rename_all = "lowercase")]
pub enum Event {
    /// The formula (or underformula) at this position was conjoined.
    Conjoined(usize),
    /// Conjoining would have been inconsistent.
    Skipped(usize),
    /// The underformula of the severe antiwithdrawal at this position was
    /// conjoined and the walk turned forward; `None` is the start.
    Bounced(Option<usize>),
}

struct Walked {
    acc: Formula,
    items: Vec<Item>,
}

/// The back, bounce and forth traversal of `ops[..end]` starting from
/// `start`. With `collect`, the sequence of conjoined or skipped formulas
/// is kept for building an underformula.
fn walk(
    sat: &mut SatSolver,
    ops: &[ChangeOp],
    end: usize,
    start: Formula,
    cache: &UnderformulaCache,
    collect: bool,
    mut events: Option<&mut Vec<Event>>,
) -> Result<Walked> {
    let mut acc = start;
    let mut items = Vec::new();
    let mut record = |e: Event| {
        if let Some(events) = events.as_deref_mut() {
            events.push(e);
        }
    };
    let step = |sat: &mut SatSolver, acc: &mut Formula, items: &mut Vec<Item>, l: &Formula| -> Result<bool> {
        let candidate = Formula::and2(acc.clone(), l.clone());
        let ok = sat.is_consistent(&candidate)?;
        if ok {
            *acc = candidate;
        }
        if collect {
            items.push(if ok { Item::Conj(l.clone()) } else { Item::Disj(l.clone()) });
        }
        Ok(ok)
    };

    let mut bounce_at = None;
    for pos in (0..end).rev() {
        let op = &ops[pos];
        match op.kind {
            OpKind::Lex => {
                let ok = step(sat, &mut acc, &mut items, &op.formula)?;
                record(if ok { Event::Conjoined(pos) } else { Event::Skipped(pos) });
            }
            OpKind::Refi => {}
            OpKind::Sev => {
                let b = cache.get(pos).ok_or(Error::MissingUnderformula(pos))?;
                if step(sat, &mut acc, &mut items, b)? {
                    record(Event::Bounced(Some(pos)));
                    bounce_at = Some(pos);
                    break;
                }
                record(Event::Skipped(pos));
            }
            kind => {
                return Err(Error::Precondition(format!(
                    "`{kind}` in a sequence expected to contain only lex, refi, sev"
                )))
            }
        }
    }
    if bounce_at.is_none() {
        record(Event::Bounced(None));
    }
    for pos in bounce_at.map_or(0, |p| p + 1)..end {
        let op = &ops[pos];
        if op.kind == OpKind::Refi {
            let ok = step(sat, &mut acc, &mut items, &op.formula)?;
            record(if ok { Event::Conjoined(pos) } else { Event::Skipped(pos) });
        }
    }
    Ok(Walked { acc, items })
}

/// `min(∅ core, P)` for a sequence of lexicographic revisions and refinements.
pub fn back_and_forth(sat: &mut SatSolver, core: &CoreSequence, p: &Formula) -> Result<Formula> {
    if core.ops().iter().any(|op| op.kind == OpKind::Sev) {
        return Err(Error::Precondition(
            "back and forth applies to sequences without severe antiwithdrawals".into(),
        ));
    }
    require_consistent(sat, p, "the minimized formula")?;
    let cache = UnderformulaCache::default();
    Ok(walk(sat, core.ops(), core.len(), p.clone(), &cache, false, None)?.acc)
}

/// `min(∅ core, P)`. `cache` must cover every severe antiwithdrawal.
pub fn back_bounce_forth(
    sat: &mut SatSolver,
    core: &CoreSequence,
    p: &Formula,
    cache: &UnderformulaCache,
) -> Result<Formula> {
    back_bounce_forth_traced(sat, core, p, cache, &mut Vec::new())
}

/// As [`back_bounce_forth`], appending the traversal decisions to `events`.
pub fn back_bounce_forth_traced(
    sat: &mut SatSolver,
    core: &CoreSequence,
    p: &Formula,
    cache: &UnderformulaCache,
    events: &mut Vec<Event>,
) -> Result<Formula> {
    require_consistent(sat, p, "the minimized formula")?;
    Ok(walk(sat, core.ops(), core.len(), p.clone(), cache, false, Some(events))?.acc)
}

/// Record of one operator of the original sequence.
#[derive(Debug, Clone)]
pub struct StepTrace {
    /// 1-based position in the original sequence.
    pub step: usize,
    pub op: ChangeOp,
    pub expansion: Vec<ChangeOp>,
    /// Base after this step.
    pub base: Formula,
    /// Underformula of the severe antiwithdrawal this step introduced, if any.
    pub underformula: Option<Formula>,
    /// Satisfiability checks spent on this step, including its base.
    pub sat_calls: u64,
}

#[derive(Debug, Clone)]
pub struct QueryTrace {
    pub alphabet: Alphabet,
    pub steps: Vec<StepTrace>,
    pub core: CoreSequence,
    pub underformulae: UnderformulaCache,
    /// Traversal decisions of the final base computation.
    pub events: Vec<Event>,
    pub sat_calls: u64,
}

impl QueryTrace {
    /// Base of the final preorder (`T` for the empty sequence).
    pub fn base(&self) -> Formula {
        self.steps.last().map_or_else(Formula::top, |s| s.base.clone())
    }
}

/// Expands `seq` and computes the base after every step.
pub fn trace_sequence(sat: &mut SatSolver, seq: &ChangeSequence) -> Result<QueryTrace> {
    let start_calls = sat.calls();
    let mut expander = Expander::new(seq.alphabet.clone());
    let mut steps = Vec::with_capacity(seq.len());
    let mut events = Vec::new();
    for (k, op) in seq.ops.iter().enumerate() {
        let before = sat.calls();
        let step_err = |e| Error::at_step(k + 1, op.render(&seq.alphabet), e);
        let first = expander.core().len();
        let expansion = expander.push(sat, op).map_err(step_err)?;
        let underformula = (first..expander.core().len()).find_map(|p| expander.cache().get(p).cloned());
        events.clear();
        let base = back_bounce_forth_traced(sat, expander.core(), &Formula::top(), expander.cache(), &mut events)
            .map_err(step_err)?;
        steps.push(StepTrace {
            step: k + 1,
            op: op.clone(),
            expansion,
            base,
            underformula,
            sat_calls: sat.calls() - before,
        });
    }
    if seq.is_empty() {
        events.push(Event::Bounced(None));
    }
    let (core, underformulae) = expander.into_parts();
    Ok(QueryTrace {
        alphabet: seq.alphabet.clone(),
        steps,
        core,
        underformulae,
        events,
        sat_calls: sat.calls() - start_calls,
    })
}

/// Base of `∅ seq`, computed on the expanded core sequence.
pub fn base_after(sat: &mut SatSolver, seq: &ChangeSequence) -> Result<Formula> {
    let (core, cache) = expand_sequence_cached(sat, seq)?;
    back_bounce_forth(sat, &core, &Formula::top(), &cache)
}

/// Whether the base of `∅ seq` entails `q`.
pub fn entails_after(sat: &mut SatSolver, seq: &ChangeSequence, q: &Formula) -> Result<bool> {
    q.check_alphabet(&seq.alphabet)?;
    let base = base_after(sat, seq)?;
    Ok(sat.entails(&base, q)?)
}
