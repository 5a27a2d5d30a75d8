use std::collections::HashMap;

use super::{Formula, Node};

impl Formula {
    /// An equivalent formula with constants folded, double negations
    /// removed, nested conjunctions and disjunctions flattened and repeated
    /// operands dropped. Shared subterms stay shared.
    pub fn simplify(&self) -> Formula {
        simplify(self, &mut HashMap::new())
    }
}

fn simplify(f: &Formula, memo: &mut HashMap<*const Node, Formula>) -> Formula {
    if let Some(s) = memo.get(&f.addr()) {
        return s.clone();
    }
    let s = match f.node() {
        Node::True | Node::False | Node::Var(_) => f.clone(),
        Node::Not(g) => Formula::negate(&simplify(g, memo)),
        Node::And(gs) => flatten(gs, true, memo),
        Node::Or(gs) => flatten(gs, false, memo),
        Node::Implies([a, b]) => {
            let (a, b) = (simplify(a, memo), simplify(b, memo));
            match (a.node(), b.node()) {
                (Node::True, _) => b,
                (Node::False, _) | (_, Node::True) => Formula::top(),
                (_, Node::False) => Formula::negate(&a),
                _ => Formula::implies(a, b),
            }
        }
        Node::Iff([a, b]) => {
            let (a, b) = (simplify(a, memo), simplify(b, memo));
            match (a.node(), b.node()) {
                (Node::True, _) => b,
                (_, Node::True) => a,
                (Node::False, _) => Formula::negate(&b),
                (_, Node::False) => Formula::negate(&a),
                _ => Formula::iff(a, b),
            }
        }
    };
    memo.insert(f.addr(), s.clone());
    s
}

/// `conj` selects conjunction; its unit is `T` and its absorbing element `F`.
fn flatten(gs: &[Formula], conj: bool, memo: &mut HashMap<*const Node, Formula>) -> Formula {
    let mut items: Vec<Formula> = Vec::with_capacity(gs.len());
    let push = |items: &mut Vec<Formula>, g: Formula| {
        if !items.contains(&g) {
            items.push(g);
        }
    };
    for g in gs {
        let s = simplify(g, memo);
        match (s.node(), conj) {
            (Node::True, true) | (Node::False, false) => {}
            (Node::False, true) => return Formula::bottom(),
            (Node::True, false) => return Formula::top(),
            (Node::And(hs), true) | (Node::Or(hs), false) => {
                for h in hs {
                    push(&mut items, h.clone());
                }
            }
            _ => push(&mut items, s),
        }
    }
    if conj {
        Formula::and(items)
    } else {
        Formula::or(items)
    }
}
