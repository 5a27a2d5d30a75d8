//! Randomized checks of the engine's theorems against the explicit oracle.
//! Each check runs `cases` instances from `seed` and reports the first
//! counterexample.

use belief_seq::formula::{formula_of_models, Formula, ModelSet};
use belief_seq::preorder::{
    apply, base, equivalent_preorders, is_bottom_refining_instance, min_models, normalize,
    run_sequence_oracle, ChangeOp, ChangeSequence, OpKind, TotalPreorder,
};
use belief_seq::reduce::CoreSequence;
use belief_seq::sat::SatSolver;
use belief_seq::symbolic::{
    back_bounce_forth, base_after, compute_underformulae, entails_after, longest, maxset, under,
};
use rand::Rng;

use super::*;

pub type Check = fn(u64, usize) -> Result<(), String>;

const N: usize = 3;

fn oracle(seq: &ChangeSequence) -> TotalPreorder {
    run_sequence_oracle(seq, CAP).unwrap()
}

fn equiv(c1: &TotalPreorder, c2: &TotalPreorder) -> bool {
    equivalent_preorders(c1, c2).unwrap()
}

fn fail<T: std::fmt::Debug>(case: usize, what: &str, detail: T) -> Result<(), String> {
    Err(format!("case {case}: {what}: {detail:?}"))
}

fn newest_first(ls: &[Formula]) -> Vec<Formula> {
    ls.iter().rev().cloned().collect()
}

fn apply_all(c: &TotalPreorder, ops: &[ChangeOp]) -> TotalPreorder {
    ops.iter().fold(c.clone(), |c, op| apply(&c, op).unwrap())
}

/// Union of the classes up to the first one meeting `s`.
fn classes_upto_min(c: &TotalPreorder, s: &ModelSet) -> ModelSet {
    let mut acc = ModelSet::empty(s.num_vars());
    for class in c.classes() {
        acc = acc.union(class);
        if !class.is_disjoint(s) {
            break;
        }
    }
    acc
}

pub fn maxset_theorem(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let ls = random_lex_formulas(&mut rng, &a, 6);
        let p = consistent_formula(&mut rng, &a);
        let mut sat = SatSolver::builtin();
        let m = maxset(&mut sat, &p, &newest_first(&ls)).unwrap();
        let want = min_models(&oracle(&lex_sequence(&a, &ls)), &p).unwrap();
        if models(&m, &a) != want {
            return fail(case, "maxset differs from min", (ls, p));
        }
    }
    Ok(())
}

pub fn lex_refi_commutation(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let c = random_preorder(&mut rng, &a);
        let l = ChangeOp::lex(consistent_formula(&mut rng, &a));
        let r = ChangeOp::refi(consistent_formula(&mut rng, &a));
        let one = apply_all(&c, &[l.clone(), r.clone()]);
        let two = apply_all(&c, &[r, l]);
        if one.classes() != two.classes() {
            return fail(case, "class lists differ", (one, two));
        }
    }
    Ok(())
}

pub fn refinement_fronting(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let ls = random_lex_formulas(&mut rng, &a, 6);
        let r = consistent_formula(&mut rng, &a);
        let mut left = lex_sequence(&a, &ls);
        left.ops.push(ChangeOp::refi(r.clone()));
        let mut right_ls = vec![r];
        right_ls.extend(ls.iter().cloned());
        if !equiv(&oracle(&left), &oracle(&lex_sequence(&a, &right_ls))) {
            return fail(case, "fronting changed the preorder", ls);
        }
    }
    Ok(())
}

pub fn underformula_lemma(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let ls = random_lex_formulas(&mut rng, &a, 6);
        let s = consistent_formula(&mut rng, &a);
        let mut sat = SatSolver::builtin();
        let b = under(&mut sat, &s, &newest_first(&ls)).unwrap();
        let want = classes_upto_min(&oracle(&lex_sequence(&a, &ls)), &models(&s, &a));
        if models(&b, &a) != want {
            return fail(case, "underformula models differ", (ls, s));
        }
    }
    Ok(())
}

pub fn sev_rewrite(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let ls = random_lex_formulas(&mut rng, &a, 6);
        let s = consistent_formula(&mut rng, &a);
        let mut sat = SatSolver::builtin();
        let b = under(&mut sat, &s, &newest_first(&ls)).unwrap();
        let mut left = lex_sequence(&a, &ls);
        left.ops.push(ChangeOp::sev(s));
        let mut rewritten: Vec<Formula> = ls.iter().map(|l| Formula::or2(l.clone(), b.clone())).collect();
        rewritten.push(b);
        if !equiv(&oracle(&left), &oracle(&lex_sequence(&a, &rewritten))) {
            return fail(case, "sev rewrite changed the preorder", ls);
        }
    }
    Ok(())
}

/// The right-hand side of each reduction, with `K` and `K'` read off the
/// explicit preorder.
fn reduction_rhs(c: &TotalPreorder, kind: OpKind, p: &Formula) -> Vec<ChangeOp> {
    let a = c.alphabet();
    let form = |s: &ModelSet| formula_of_models(s, a);
    let k = form(&min_models(c, p).unwrap());
    let consistent = |f: &Formula| !models(f, a).is_empty();
    let full_meet = |k: Formula| {
        let mut ops = Vec::new();
        if consistent(&Formula::negate(&k)) {
            ops.push(ChangeOp::lex(Formula::negate(&k)));
        }
        ops.push(ChangeOp::sev(k.clone()));
        ops.push(ChangeOp::lex(k));
        ops
    };
    match kind {
        OpKind::Nat => vec![ChangeOp::lex(k)],
        OpKind::Res => {
            let refined = apply(c, &ChangeOp::refi(p.clone())).unwrap();
            let k = form(&min_models(&refined, p).unwrap());
            vec![ChangeOp::refi(p.clone()), ChangeOp::lex(k)]
        }
        OpKind::Rad => {
            let mut ops = Vec::new();
            if consistent(&Formula::negate(p)) {
                ops.push(ChangeOp::lex(Formula::negate(p)));
            }
            ops.push(ChangeOp::sev(p.clone()));
            ops.push(ChangeOp::lex(p.clone()));
            ops
        }
        OpKind::Sevr => {
            let withdrawn = apply(c, &ChangeOp::sev(p.clone())).unwrap();
            let k = form(&min_models(&withdrawn, p).unwrap());
            vec![ChangeOp::sev(p.clone()), ChangeOp::lex(k)]
        }
        OpKind::Msev => vec![ChangeOp::sev(p.clone()), ChangeOp::lex(p.clone())],
        OpKind::Psev => {
            let withdrawn = apply(c, &ChangeOp::sev(p.clone())).unwrap();
            let k2 = form(&base(&withdrawn));
            if consistent(&Formula::negate(&k2)) {
                vec![ChangeOp::sev(Formula::negate(&k2)), ChangeOp::lex(k)]
            } else {
                full_meet(k)
            }
        }
        OpKind::Full => full_meet(k),
        OpKind::Lex | OpKind::Refi | OpKind::Sev => vec![ChangeOp::new(kind, p.clone())],
    }
}

pub const REDUCED: [OpKind; 7] = [
    OpKind::Nat,
    OpKind::Res,
    OpKind::Rad,
    OpKind::Sevr,
    OpKind::Msev,
    OpKind::Psev,
    OpKind::Full,
];

/// Each reduction on random preorders, then the symbolic expansion of each
/// operator after random core prefixes.
pub fn reductions(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        for kind in REDUCED {
            let c = random_preorder(&mut rng, &a);
            let p = consistent_formula(&mut rng, &a);
            let left = apply(&c, &ChangeOp::new(kind, p.clone())).unwrap();
            let right = apply_all(&c, &reduction_rhs(&c, kind, &p));
            if !equiv(&left, &right) {
                return fail(case, kind.keyword(), (c, left, right));
            }

            let prefix = random_core(&mut rng, &a, 5);
            let op = ChangeOp::new(kind, p);
            let mut sat = SatSolver::builtin();
            let expansion = belief_seq::reduce::expand_op(&mut sat, &prefix, &op).unwrap();
            let c = oracle(&prefix.clone().into_change_sequence());
            if !equiv(&apply(&c, &op).unwrap(), &apply_all(&c, &expansion)) {
                return fail(case, &format!("symbolic {}", kind.keyword()), prefix);
            }
        }
    }
    Ok(())
}

pub fn two_class_plain_severe(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    let mut done = 0;
    while done < cases {
        let c = random_preorder(&mut rng, &a);
        if normalize(&c).classes().len() > 2 {
            continue;
        }
        let p = consistent_formula(&mut rng, &a);
        let top = min_models(&c, &p).unwrap();
        let want = TotalPreorder::new(a.clone(), vec![top.clone(), top.complement()]).unwrap();
        let got = apply(&c, &ChangeOp::new(OpKind::Psev, p)).unwrap();
        if !equiv(&got, &want) {
            return fail(done, "plain severe differs from two-class form", c);
        }
        done += 1;
    }
    Ok(())
}

pub fn full_meet_is_plain_severe_from_empty(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let ps = random_lex_formulas(&mut rng, &a, 6);
        let seq = |kind| ChangeSequence::new(a.clone(), ps.iter().map(|p| ChangeOp::new(kind, p.clone())).collect()).unwrap();
        if !equiv(&oracle(&seq(OpKind::Psev)), &oracle(&seq(OpKind::Full))) {
            return fail(case, "full meet and plain severe diverge", ps);
        }
    }
    Ok(())
}

pub fn lexicographic_finding_msev(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    let mut done = 0;
    while done < cases {
        let ss = random_lex_formulas(&mut rng, &a, 5);
        if models(&Formula::and(ss.iter().cloned()), &a).is_empty() {
            continue;
        }
        let msev = ChangeSequence::new(a.clone(), ss.iter().map(|s| ChangeOp::new(OpKind::Msev, s.clone())).collect())
            .unwrap();
        if !equiv(&oracle(&msev), &oracle(&lex_sequence(&a, &ss))) {
            return fail(done, "msev sequence differs from lex sequence", ss);
        }
        done += 1;
    }
    Ok(())
}

pub fn bottom_refining(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    let mut done = 0;
    while done < cases {
        let c = random_preorder(&mut rng, &a);
        let p = consistent_formula(&mut rng, &a);
        if base(&c).is_disjoint(&models(&p, &a)) {
            continue;
        }
        for kind in [OpKind::Nat, OpKind::Res, OpKind::Sevr] {
            if !is_bottom_refining_instance(&c, &p, kind).unwrap() {
                return fail(done, kind.keyword(), (c, p));
            }
        }
        done += 1;
    }
    Ok(())
}

pub fn very_radical(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let n = rng.gen_range(1..=6);
        let rs: Vec<Formula> = (0..n).map(|_| consistent_formula(&mut rng, &a)).collect();
        let seq = ChangeSequence::new(a.clone(), rs.iter().map(|r| ChangeOp::new(OpKind::Rad, r.clone())).collect())
            .unwrap();
        let got = oracle(&seq);

        let mut classes = vec![Formula::and(rs.iter().cloned())];
        for k in 0..n {
            classes.push(Formula::and(
                std::iter::once(Formula::not(rs[k].clone())).chain(rs[k + 1..].iter().cloned()),
            ));
        }
        let want = TotalPreorder::from_formulas(a.clone(), &classes, CAP).unwrap();
        if !equiv(&got, &want) {
            return fail(case, "class structure", rs);
        }

        let mut sat = SatSolver::builtin();
        let l = longest(&mut sat, &newest_first(&rs)).unwrap();
        if models(&l, &a) != base(&got) {
            return fail(case, "base differs from longest", rs);
        }
    }
    Ok(())
}

pub fn revision_base_law(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let c = random_preorder(&mut rng, &a);
        let p = consistent_formula(&mut rng, &a);
        let want = min_models(&c, &p).unwrap();
        for kind in OpKind::REVISIONS {
            let revised = apply(&c, &ChangeOp::new(kind, p.clone())).unwrap();
            if base(&revised) != want {
                return fail(case, kind.keyword(), (c, p));
            }
        }
    }
    Ok(())
}

/// Symbolic base, underformulae and entailment against the oracle on random
/// mixed sequences of all ten kinds.
pub fn differential(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let seq = random_sequence(&mut rng, &a, 6, &OpKind::ALL);
        let mut sat = SatSolver::builtin();
        let got = base_after(&mut sat, &seq).map_err(|e| format!("case {case}: {e}"))?;
        let want = base(&oracle(&seq));
        if models(&got, &a) != want {
            return fail(case, "base differs", seq);
        }
        let q = consistent_formula(&mut rng, &a);
        let entailed = entails_after(&mut sat, &seq, &q).unwrap();
        if entailed != want.is_subset(&models(&q, &a)) {
            return fail(case, "entailment differs", (seq, q));
        }
    }
    Ok(())
}

/// `min` on random core sequences for random formulas, plus every cached
/// underformula against the classes of the oracle prefix.
pub fn core_min_and_underformulae(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    let a = alphabet(N);
    for case in 0..cases {
        let core = random_core(&mut rng, &a, 6);
        let mut sat = SatSolver::builtin();
        let cache = compute_underformulae(&mut sat, &core).unwrap();
        for (pos, b) in cache.iter() {
            let prefix = oracle(&core.prefix(pos).into_change_sequence());
            let s = models(&core.ops()[pos].formula, &a);
            if models(b, &a) != classes_upto_min(&prefix, &s) {
                return fail(case, &format!("underformula at {pos}"), &core);
            }
        }
        let p = consistent_formula(&mut rng, &a);
        let m = back_bounce_forth(&mut sat, &core, &p, &cache).unwrap();
        let want = min_models(&oracle(&core.clone().into_change_sequence()), &p).unwrap();
        if models(&m, &a) != want {
            return fail(case, "min differs", (&core, p));
        }
    }
    Ok(())
}

pub fn core_of(a: &Alphabet, ops: Vec<ChangeOp>) -> CoreSequence {
    CoreSequence::new(a.clone(), ops).unwrap()
}
