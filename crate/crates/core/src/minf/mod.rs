//! The relational model M∞ restricted to a finite universe of elements,
//! with a bounded type-derivation search.

mod elem;
mod search;

pub use elem::{
    abs_elem, app_elem, multiset_count, multisets, render_multiset, Elem, ElemParseError, Env,
    Universe,
};
pub use search::{
    derivable, interp, semantic_approximation, separating_element, Derivability, Derivation,
    Interpretation, Search, Separation, Side,
};
