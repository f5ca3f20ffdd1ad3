//! Resource lambda-calculus with tests: syntax, rewriting, the fixpoint
//! combinators of the counter-example, observational probing, the M∞ model
//! at bounded size, and finite relational semantics.

pub mod combinators;
pub mod gen;
pub mod minf;
pub mod relsem;
pub mod rewriting;
pub mod separation;
pub mod sexp;
pub mod syntax;
