//! Substitution, reduction rules, the outer-head strategy and fuel-bounded
//! convergence.

mod normalize;
mod reduce;
mod step;
mod subst;

pub use normalize::{full_normalize, Normalized, Strategy};
pub use reduce::{converges, reduce, reduce_traced, Outcome, Reduction, TraceStep, Verdict};
pub use step::{
    contract_term, contract_test, is_onf_term, is_onf_test, is_redex_term, is_redex_test,
    outer_head_step, path_sexp, test_contract, Path, Pos, Reducible, RewriteError, Rule, Scan,
    Step,
};
pub use subst::{beta_contract, fresh_name, linear_fold, rename_free, Substitute};
