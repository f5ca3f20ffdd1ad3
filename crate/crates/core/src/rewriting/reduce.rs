//! Fuel-bounded outer-head reduction of formal sums.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::step::{outer_head_step, path_sexp, Path, Reducible, Rule, Step};
use crate::sexp::{Sexp, ToSexp};
use crate::syntax::{FormalSum, Node};

#[derive(Clone, Debug)]
pub enum Outcome<T: Node> {
    /// Some summand reached outer-head normal form.
    Converged { witness: T, steps: usize },
    /// Every summand was annihilated.
    Zero { steps: usize },
    FuelExhausted {
        frontier: FormalSum<T>,
        steps: usize,
    },
}

impl<T: Node> Outcome<T> {
    pub fn steps(&self) -> usize {
        match self {
            Outcome::Converged { steps, .. }
            | Outcome::Zero { steps }
            | Outcome::FuelExhausted { steps, .. } => *steps,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Converged { .. } => "Converged",
            Outcome::Zero { .. } => "Zero",
            Outcome::FuelExhausted { .. } => "FuelExhausted",
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            Outcome::Converged { steps, .. } => Verdict::Yes(*steps),
            Outcome::Zero { .. } => Verdict::No,
            Outcome::FuelExhausted { .. } => Verdict::Unknown,
        }
    }
}

impl<T: Node + ToSexp> ToSexp for Outcome<T> {
    fn to_sexp(&self) -> Sexp {
        match self {
            Outcome::Converged { witness, steps } => Sexp::tagged(
                "converged",
                [
                    Sexp::field("steps", Sexp::int(*steps as i128)),
                    Sexp::field("witness", witness.to_sexp()),
                ],
            ),
            Outcome::Zero { steps } => {
                Sexp::tagged("zero", [Sexp::field("steps", Sexp::int(*steps as i128))])
            }
            Outcome::FuelExhausted { frontier, steps } => Sexp::tagged(
                "fuel-exhausted",
                [
                    Sexp::field("steps", Sexp::int(*steps as i128)),
                    Sexp::field("frontier", frontier.to_sexp()),
                ],
            ),
        }
    }
}

/// Three-valued convergence verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes(usize),
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes(n) => write!(f, "Yes({n})"),
            Verdict::No => f.write_str("No"),
            Verdict::Unknown => f.write_str("Unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep<T: Node> {
    pub index: usize,
    pub rule: Rule,
    pub path: Path,
    pub before: T,
    pub after: FormalSum<T>,
}

impl<T: Node + ToSexp> ToSexp for TraceStep<T> {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "step",
            [
                Sexp::int(self.index as i128),
                Sexp::atom(self.rule.name()),
                path_sexp(&self.path),
                self.after.to_sexp(),
            ],
        )
    }
}

#[derive(Clone, Debug)]
pub struct Reduction<T: Node> {
    pub initial: FormalSum<T>,
    pub outcome: Outcome<T>,
    /// Empty unless tracing was requested.
    pub trace: Vec<TraceStep<T>>,
}

impl<T: Reducible> Reduction<T> {
    /// Checks every recorded step against the rewriting function and
    /// that the steps, applied to the initial sum, give the final frontier.
    pub fn replay(&self) -> Result<(), String> {
        let mut present: BTreeSet<String> = self.initial.iter().map(Node::key).collect();
        for s in &self.trace {
            let (rule, after) = s
                .before
                .rewrite_at(&s.path)
                .map_err(|e| format!("step {}: {e}", s.index))?;
            if rule != s.rule || after.key() != s.after.key() {
                return Err(format!("step {} does not replay", s.index));
            }
            if !present.remove(&s.before.key()) {
                return Err(format!("step {} rewrites an absent summand", s.index));
            }
            present.extend(after.iter().map(Node::key));
        }
        match &self.outcome {
            Outcome::Converged { witness, .. } if !present.contains(&witness.key()) => {
                Err("witness is not in the replayed frontier".into())
            }
            Outcome::Zero { .. } if !present.is_empty() => {
                Err("replayed frontier is not empty".into())
            }
            Outcome::FuelExhausted { frontier, .. } => {
                let expected: BTreeSet<String> = frontier.iter().map(Node::key).collect();
                if expected == present {
                    Ok(())
                } else {
                    Err("replayed frontier differs from the reported one".into())
                }
            }
            _ => Ok(()),
        }
    }

    /// One tree-serialized line per step.
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().map(|s| s.to_sexp().to_string()).collect()
    }
}

/// Breadth-first may-convergence search. Summands are kept as a set: a
/// summand already waiting in the queue is not enqueued twice.
pub fn reduce_traced<T: Reducible>(e: &FormalSum<T>, fuel: usize, record: bool) -> Reduction<T> {
    let mut trace = Vec::new();
    let finish = |outcome, trace| Reduction {
        initial: e.clone(),
        outcome,
        trace,
    };
    if let Some(w) = e.iter().find(|t| t.is_onf()) {
        return finish(
            Outcome::Converged {
                witness: w.clone(),
                steps: 0,
            },
            trace,
        );
    }
    let mut present = BTreeSet::new();
    let mut queue = VecDeque::new();
    for t in e.iter() {
        if present.insert(t.key()) {
            queue.push_back(t.clone());
        }
    }
    let mut steps = 0;
    while !queue.is_empty() {
        if steps == fuel {
            let frontier = FormalSum::from_vec(queue.into_iter().collect());
            return finish(Outcome::FuelExhausted { frontier, steps }, trace);
        }
        let t = queue.pop_front().expect("front exists");
        present.remove(&t.key());
        let Step::Reduced { rule, path, result } = outer_head_step(&t) else {
            unreachable!("normal summands end the search when produced")
        };
        steps += 1;
        if record {
            trace.push(TraceStep {
                index: steps,
                rule,
                path,
                before: t,
                after: result.clone(),
            });
        }
        for r in result {
            if r.is_onf() {
                return finish(Outcome::Converged { witness: r, steps }, trace);
            }
            if present.insert(r.key()) {
                queue.push_back(r);
            }
        }
    }
    finish(Outcome::Zero { steps }, trace)
}

pub fn reduce<T: Reducible>(e: &FormalSum<T>, fuel: usize) -> Outcome<T> {
    reduce_traced(e, fuel, false).outcome
}

pub fn converges<T: Reducible>(e: &FormalSum<T>, fuel: usize) -> Verdict {
    reduce(e, fuel).verdict()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_normal, Normal, Term, Test};

    fn terms(s: &str) -> FormalSum<Term> {
        match parse_normal(s).unwrap() {
            Normal::Terms(t) => t,
            Normal::Tests(_) => panic!("not a term"),
        }
    }

    fn tests(s: &str) -> FormalSum<Test> {
        match parse_normal(s).unwrap() {
            Normal::Tests(t) => t,
            Normal::Terms(_) => panic!("not a test"),
        }
    }

    const OMEGA: &str = "(\\x. x [x!]) [(\\x. x [x!])!]";

    #[test]
    fn identity_applied_to_identity() {
        match reduce(&terms("(\\x. x) [(\\y. y)!]"), 10) {
            Outcome::Converged { witness, steps } => {
                assert_eq!(witness.to_string(), "\\y. y");
                assert!(steps <= 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unused_linear_argument_annihilates() {
        assert!(matches!(reduce(&terms("(\\x. y) [n; p!]"), 10), Outcome::Zero { .. }));
        assert_eq!(converges(&terms("(\\x. y) [n; p!]"), 10), Verdict::No);
    }

    #[test]
    fn omega_loops() {
        let r = reduce_traced(&terms(OMEGA), 100, true);
        assert!(matches!(r.outcome, Outcome::FuelExhausted { steps: 100, .. }));
        assert_eq!(r.trace.len(), 100);
        // one beta step reproduces the input
        assert_eq!(r.trace[0].after.key(), FormalSum::single(r.trace[0].before.clone()).key());
        r.replay().unwrap();
        assert_eq!(converges(&terms(OMEGA), 100), Verdict::Unknown);
    }

    #[test]
    fn gamma_converges_in_one_step() {
        assert_eq!(converges(&tests("tau(tbar(eps))"), 5), Verdict::Yes(1));
    }

    #[test]
    fn may_convergence_takes_any_summand() {
        let sum = terms(&format!("{OMEGA} + (\\x. x) [z!]"));
        assert!(matches!(converges(&sum, 10), Verdict::Yes(n) if n <= 2));
    }

    #[test]
    fn zero_fuel_on_non_normal_input() {
        assert!(matches!(
            reduce(&terms(OMEGA), 0),
            Outcome::FuelExhausted { steps: 0, .. }
        ));
        assert_eq!(converges(&terms("\\x. x"), 0), Verdict::Yes(0));
        assert_eq!(converges(&terms("0"), 0), Verdict::No);
    }

    #[test]
    fn trace_lines_are_tree_serialized() {
        let r = reduce_traced(&tests("tau(tbar(eps))"), 5, true);
        assert_eq!(r.trace_lines(), vec!["(step 1 gamma () (sum eps))".to_string()]);
        r.replay().unwrap();
    }
}
