//! Finite instances of the relational model: Rel with its tensor, the
//! truncated exponential with its structural and differential maps, the
//! coKleisli category, and law checks that report truncation honestly.

mod laws;
mod rel;
mod set;

pub use laws::{check_laws, compare, compare_on, LawInstance, LawReport, LawVerdict};
pub use rel::*;
pub use set::{union as multiset_union, Atom, FinSet};
