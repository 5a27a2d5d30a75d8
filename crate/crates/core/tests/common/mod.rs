//! Seeded random generators and brute-force helpers shared by the
//! integration tests.
#![allow(dead_code)]

pub mod laws;

use belief_seq::formula::{enumerate_models, formula_of_models, Alphabet, Formula, ModelSet};
use belief_seq::preorder::{empty_preorder, ChangeOp, ChangeSequence, OpKind, TotalPreorder};
use belief_seq::reduce::CoreSequence;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const CAP: usize = 20;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Alphabet {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    if n <= NAMES.len() {
        Alphabet::new(NAMES[..n].iter().copied()).unwrap()
    } else {
        Alphabet::new((0..n).map(|i| format!("v{i}"))).unwrap()
    }
}

pub fn models(f: &Formula, a: &Alphabet) -> ModelSet {
    enumerate_models(f, a, CAP).unwrap()
}

fn literal(rng: &mut StdRng, n: usize) -> Formula {
    let v = Formula::var(rng.gen_range(0..n));
    if rng.gen_bool(0.5) {
        Formula::not(v)
    } else {
        v
    }
}

/// A random syntax tree of depth at most `depth`.
pub fn random_ast(rng: &mut StdRng, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0 => Formula::top(),
            1 => Formula::bottom(),
            _ => literal(rng, n),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_ast(rng, n, depth - 1)),
        1 => Formula::and((0..rng.gen_range(2..4)).map(|_| random_ast(rng, n, depth - 1))),
        2 => Formula::or((0..rng.gen_range(2..4)).map(|_| random_ast(rng, n, depth - 1))),
        3 => Formula::implies(random_ast(rng, n, depth - 1), random_ast(rng, n, depth - 1)),
        _ => Formula::iff(random_ast(rng, n, depth - 1), random_ast(rng, n, depth - 1)),
    }
}

/// Either a small random tree or the minterm form of a random non-empty
/// model set; always consistent.
pub fn consistent_formula(rng: &mut StdRng, a: &Alphabet) -> Formula {
    let n = a.len();
    loop {
        let f = if rng.gen_bool(0.5) {
            random_ast(rng, n, 3)
        } else {
            let universe = 1u64 << n;
            let set = ModelSet::from_models(
                n,
                (0..universe)
                    .filter(|_| rng.gen_bool(0.4))
                    .map(belief_seq::Interpretation::from_bits),
            );
            formula_of_models(&set, a)
        };
        if !models(&f, a).is_empty() {
            return f;
        }
    }
}

/// Short conjunctions and disjunctions of literals; cheap for larger alphabets.
pub fn consistent_clause_formula(rng: &mut StdRng, n: usize) -> Formula {
    let width = rng.gen_range(1..=3);
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let lits: Vec<Formula> = vars[..width.min(n)]
        .iter()
        .map(|&v| {
            let v = Formula::var(v);
            if rng.gen_bool(0.5) {
                Formula::not(v)
            } else {
                v
            }
        })
        .collect();
    if rng.gen_bool(0.5) {
        Formula::and(lits)
    } else {
        Formula::or(lits)
    }
}

pub fn random_op(rng: &mut StdRng, a: &Alphabet, kinds: &[OpKind]) -> ChangeOp {
    let kind = *kinds.choose(rng).unwrap();
    ChangeOp::new(kind, consistent_formula(rng, a))
}

pub fn random_sequence(rng: &mut StdRng, a: &Alphabet, max_len: usize, kinds: &[OpKind]) -> ChangeSequence {
    let len = rng.gen_range(0..=max_len);
    let ops = (0..len).map(|_| random_op(rng, a, kinds)).collect();
    ChangeSequence::new(a.clone(), ops).unwrap()
}

pub fn random_core(rng: &mut StdRng, a: &Alphabet, max_len: usize) -> CoreSequence {
    let seq = random_sequence(rng, a, max_len, &[OpKind::Lex, OpKind::Refi, OpKind::Sev]);
    CoreSequence::new(a.clone(), seq.ops).unwrap()
}

pub fn random_lex_formulas(rng: &mut StdRng, a: &Alphabet, max_len: usize) -> Vec<Formula> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| consistent_formula(rng, a)).collect()
}

/// Every model placed in a random class among `k`, some of which may be empty.
pub fn random_preorder(rng: &mut StdRng, a: &Alphabet) -> TotalPreorder {
    let n = a.len();
    let k = rng.gen_range(1..=5);
    let mut classes = vec![ModelSet::empty(n); k];
    for bits in 0..1u64 << n {
        classes[rng.gen_range(0..k)].insert(belief_seq::Interpretation::from_bits(bits));
    }
    TotalPreorder::new(a.clone(), classes).unwrap()
}

pub fn lex_sequence(a: &Alphabet, formulas: &[Formula]) -> ChangeSequence {
    ChangeSequence::new(a.clone(), formulas.iter().cloned().map(ChangeOp::lex).collect()).unwrap()
}

pub fn empty(a: &Alphabet) -> TotalPreorder {
    empty_preorder(a, CAP).unwrap()
}
