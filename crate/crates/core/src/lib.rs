//! Iterated belief change over total preorders of propositional models.
//!
//! The [`symbolic`] engine answers base and entailment queries for sequences
//! of ten change operators with polynomially many satisfiability checks,
//! after [`reduce`] rewrites every operator into lexicographic revisions,
//! refinements and severe antiwithdrawals. The [`preorder`] module is an
//! explicit brute-force implementation of every operator, used as ground
//! truth on small alphabets.

pub mod cli;
mod error;
pub mod formula;
pub mod preorder;
pub mod reduce;
pub mod sat;
pub mod symbolic;

pub use error::{Error, Result};
pub use formula::{
    enumerate_models, formula_of_models, parse_formula, Alphabet, Formula, Interpretation, ModelSet,
};
