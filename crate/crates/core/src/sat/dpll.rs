//! A small complete DPLL solver: two-watched-literal unit propagation and
//! chronological backtracking over a fixed branching order.

use super::cnf::Cnf;

/// Literal encoding: `2 * var + sign`, variables 0-based, sign 1 = negative.
type Lit = usize;

fn lit_of(dimacs: i32) -> Lit {
    let var = dimacs.unsigned_abs() as usize - 1;
    2 * var + (dimacs < 0) as usize
}

fn var_of(lit: Lit) -> usize {
    lit >> 1
}

fn neg(lit: Lit) -> Lit {
    lit ^ 1
}

#[derive(Debug, Clone, Copy)]
struct Level {
    trail_len: usize,
    decision: Lit,
    flipped: bool,
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    /// Per variable: `None` unassigned, `Some(true)` when the positive literal holds.
    assign: Vec<Option<bool>>,
    trail: Vec<Lit>,
    qhead: usize,
    levels: Vec<Level>,
}

impl Dpll {
    fn value(&self, lit: Lit) -> Option<bool> {
        self.assign[var_of(lit)].map(|v| v != (lit & 1 == 1))
    }

    /// Returns false if `lit` is already false.
    fn enqueue(&mut self, lit: Lit) -> bool {
        match self.value(lit) {
            Some(v) => v,
            None => {
                self.assign[var_of(lit)] = Some(lit & 1 == 0);
                self.trail.push(lit);
                true
            }
        }
    }

    /// Unit propagation; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let watchers = std::mem::take(&mut self.watches[false_lit]);
            let mut kept = Vec::with_capacity(watchers.len());
            let mut conflict = false;
            let mut iter = watchers.into_iter();
            for ci in iter.by_ref() {
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_value = self.assign[var_of(first)].map(|v| v != (first & 1 == 1));
                if first_value == Some(true) {
                    kept.push(ci);
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let lv = self.assign[var_of(l)].map(|v| v != (l & 1 == 1));
                    if lv != Some(false) {
                        clause.swap(1, k);
                        self.watches[clause[1]].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(ci);
                if first_value == Some(false) {
                    conflict = true;
                    break;
                }
                self.enqueue(first);
            }
            kept.extend(iter);
            self.watches[false_lit] = kept;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        for lit in self.trail.drain(len..) {
            self.assign[var_of(lit)] = None;
        }
        self.qhead = len;
    }

    /// Chronological backtracking: flip the most recent unflipped decision.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_len);
            if !level.flipped {
                let flipped = neg(level.decision);
                self.levels.push(Level {
                    trail_len: self.trail.len(),
                    decision: flipped,
                    flipped: true,
                });
                self.enqueue(flipped);
                return true;
            }
        }
        false
    }
}

/// Decides satisfiability of `cnf`, branching on variables in index order.
///
/// Encodings put alphabet variables first, so once those are decided every
/// gate variable is fixed by propagation.
pub fn solve(cnf: &Cnf) -> bool {
    let num_vars = cnf.num_vars as usize;
    let mut solver = Dpll {
        clauses: Vec::with_capacity(cnf.clauses.len()),
        watches: vec![Vec::new(); 2 * num_vars],
        assign: vec![None; num_vars],
        trail: Vec::with_capacity(num_vars),
        qhead: 0,
        levels: Vec::new(),
    };
    let mut units = Vec::new();
    for raw in &cnf.clauses {
        let mut clause: Vec<Lit> = raw.iter().map(|&l| lit_of(l)).collect();
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0] == neg(w[1])) {
            continue;
        }
        match clause.len() {
            0 => return false,
            1 => units.push(clause[0]),
            _ => {
                let ci = solver.clauses.len();
                solver.watches[clause[0]].push(ci);
                solver.watches[clause[1]].push(ci);
                solver.clauses.push(clause);
            }
        }
    }
    for lit in units {
        if !solver.enqueue(lit) {
            return false;
        }
    }
    if !solver.propagate() {
        return false;
    }
    let mut next_var = 0;
    loop {
        while next_var < num_vars && solver.assign[next_var].is_some() {
            next_var += 1;
        }
        if next_var == num_vars {
            return true;
        }
        let decision = 2 * next_var + 1;
        solver.levels.push(Level {
            trail_len: solver.trail.len(),
            decision,
            flipped: false,
        });
        solver.enqueue(decision);
        while !solver.propagate() {
            if !solver.backtrack() {
                return false;
            }
            // backtracking unassigns variables below `next_var`
            next_var = 0;
        }
    }
}
