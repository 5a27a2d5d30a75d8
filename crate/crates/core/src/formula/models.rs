use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{Alphabet, Formula, Node, VarId};
use crate::error::Result;

/// A total truth assignment; bit `i` is the value of variable `i`.
///
/// Interpretations are numbered by their bit pattern, which fixes the model
/// enumeration order for a given alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation(u64);

impl Interpretation {
    pub fn from_bits(bits: u64) -> Self {
        Interpretation(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn get(self, var: VarId) -> bool {
        var < 64 && (self.0 >> var) & 1 == 1
    }

    pub fn with(self, var: VarId, value: bool) -> Self {
        if value {
            Interpretation(self.0 | (1 << var))
        } else {
            Interpretation(self.0 & !(1 << var))
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayInterpretation {
            interp: *self,
            alphabet,
        }
    }
}

struct DisplayInterpretation<'a> {
    interp: Interpretation,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayInterpretation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, name) in self.alphabet.names().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={}", name, self.interp.get(i) as u8)?;
        }
        f.write_str("}")
    }
}

/// A set of interpretations over an alphabet of `num_vars` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModelSet {
    num_vars: usize,
    bits: FixedBitSet,
}

impl ModelSet {
    pub fn empty(num_vars: usize) -> Self {
        ModelSet {
            num_vars,
            bits: FixedBitSet::with_capacity(1 << num_vars),
        }
    }

    pub fn full(num_vars: usize) -> Self {
        let mut set = Self::empty(num_vars);
        set.bits.insert_range(..);
        set
    }

    pub fn from_models<I: IntoIterator<Item = Interpretation>>(num_vars: usize, models: I) -> Self {
        let mut set = Self::empty(num_vars);
        for m in models {
            set.insert(m);
        }
        set
    }

    /// Interpretations whose variable `var` is true.
    pub fn of_var(num_vars: usize, var: VarId) -> Self {
        let mut set = Self::empty(num_vars);
        for bits in 0..set.universe() {
            if (bits >> var) & 1 == 1 {
                set.bits.insert(bits);
            }
        }
        set
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn universe(&self) -> usize {
        1 << self.num_vars
    }

    pub fn insert(&mut self, m: Interpretation) {
        self.bits.insert(m.bits() as usize);
    }

    pub fn contains(&self, m: Interpretation) -> bool {
        self.bits.contains(m.bits() as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Interpretation> + '_ {
        self.bits.ones().map(|b| Interpretation(b as u64))
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn complement(&self) -> ModelSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ModelSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|m| format!("{:0width$b}", m.bits(), width = self.num_vars)))
            .finish()
    }
}

/// All satisfying interpretations of `f` over `alphabet`.
///
/// Evaluation is set-at-a-time and memoized per shared node, so the cost is
/// linear in the DAG size of `f` times `2^|alphabet|` bits.
pub fn enumerate_models(f: &Formula, alphabet: &Alphabet, cap: usize) -> Result<ModelSet> {
    alphabet.check_cap(cap)?;
    f.check_alphabet(alphabet)?;
    let mut memo = HashMap::new();
    Ok(models_of(f, alphabet.len(), &mut memo))
}

fn models_of(f: &Formula, n: usize, memo: &mut HashMap<*const Node, ModelSet>) -> ModelSet {
    if let Some(set) = memo.get(&f.addr()) {
        return set.clone();
    }
    let set = match f.node() {
        Node::True => ModelSet::full(n),
        Node::False => ModelSet::empty(n),
        Node::Var(v) => ModelSet::of_var(n, *v),
        Node::Not(g) => models_of(g, n, memo).complement(),
        Node::And(gs) => {
            let mut acc = ModelSet::full(n);
            for g in gs {
                acc.bits.intersect_with(&models_of(g, n, memo).bits);
            }
            acc
        }
        Node::Or(gs) => {
            let mut acc = ModelSet::empty(n);
            for g in gs {
                acc.bits.union_with(&models_of(g, n, memo).bits);
            }
            acc
        }
        Node::Implies([a, b]) => models_of(a, n, memo).complement().union(&models_of(b, n, memo)),
        Node::Iff([a, b]) => {
            let a = models_of(a, n, memo);
            let b = models_of(b, n, memo);
            a.intersection(&b).union(&a.union(&b).complement())
        }
    };
    memo.insert(f.addr(), set.clone());
    set
}

/// Disjunction of complete minterms, one per model, in enumeration order.
pub fn formula_of_models(models: &ModelSet, alphabet: &Alphabet) -> Formula {
    debug_assert_eq!(models.num_vars(), alphabet.len());
    Formula::or(models.iter().map(|m| minterm(m, alphabet.len())))
}

fn minterm(m: Interpretation, num_vars: usize) -> Formula {
    Formula::and((0..num_vars).map(|v| {
        let lit = Formula::var(v);
        if m.get(v) {
            lit
        } else {
            Formula::not(lit)
        }
    }))
}
