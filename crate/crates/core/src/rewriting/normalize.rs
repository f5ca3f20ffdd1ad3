//! Full normalization under a fixed redex-selection strategy.

use super::step::{Reducible, Scan};
use crate::syntax::FormalSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The outer-head redex first, then the leftmost-outermost redex anywhere.
    OuterHeadFirst,
    RightmostInnermost,
}

#[derive(Clone, Debug)]
pub struct Normalized<T: crate::syntax::Node> {
    /// `None` when the step budget ran out.
    pub normal: Option<FormalSum<T>>,
    pub steps: usize,
}

/// Rewrites every redex, including those under bangs, until none is left.
/// Summands are tracked with multiplicity.
pub fn full_normalize<T: Reducible>(
    e: &FormalSum<T>,
    strategy: Strategy,
    fuel: usize,
) -> Normalized<T> {
    let mut pending: Vec<T> = e.items().iter().rev().cloned().collect();
    let mut done = Vec::new();
    let mut steps = 0;
    while let Some(t) = pending.pop() {
        let path = match strategy {
            Strategy::OuterHeadFirst => t
                .outer_head_path()
                .or_else(|| t.first_redex(Scan::LeftmostOutermost)),
            Strategy::RightmostInnermost => t.first_redex(Scan::RightmostInnermost),
        };
        let Some(path) = path else {
            done.push(t);
            continue;
        };
        if steps == fuel {
            return Normalized {
                normal: None,
                steps,
            };
        }
        steps += 1;
        let (_, result) = t.rewrite_at(&path).expect("scans return redex positions");
        pending.extend(result.into_items().into_iter().rev());
    }
    Normalized {
        normal: Some(FormalSum::from_vec(done)),
        steps,
    }
}
