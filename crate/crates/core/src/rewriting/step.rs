//! Redexes, positions, contraction and the outer-head strategy.

use std::fmt;

use thiserror::Error;

use super::subst::{beta_contract, Substitute};
use crate::sexp::{Sexp, ToSexp};
use crate::syntax::{Bag, Expr, FormalSum, Node, Term, Test};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Beta,
    Gamma,
    Tau,
    TauBar1,
    TauBar2,
    Eps,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Beta,
        Rule::Gamma,
        Rule::Tau,
        Rule::TauBar1,
        Rule::TauBar2,
        Rule::Eps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Beta => "beta",
            Rule::Gamma => "gamma",
            Rule::Tau => "tau",
            Rule::TauBar1 => "taubar1",
            Rule::TauBar2 => "taubar2",
            Rule::Eps => "eps",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One step down the syntax tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pos {
    /// Body of an abstraction.
    Body,
    /// Function part of an application.
    Fun,
    /// Linear component of the applied bag, in stored order.
    Linear(usize),
    /// Summand of the banged slot of the applied bag.
    Banged(usize),
    /// Test under `tbar`.
    TauBarTest,
    /// Term under `tau`.
    TauSubject,
    ParLeft,
    ParRight,
}

pub type Path = Vec<Pos>;

impl ToSexp for Pos {
    fn to_sexp(&self) -> Sexp {
        match self {
            Pos::Body => Sexp::atom("body"),
            Pos::Fun => Sexp::atom("fun"),
            Pos::Linear(i) => Sexp::tagged("lin", [Sexp::int(*i as i128)]),
            Pos::Banged(j) => Sexp::tagged("bang", [Sexp::int(*j as i128)]),
            Pos::TauBarTest => Sexp::atom("tbar"),
            Pos::TauSubject => Sexp::atom("tau"),
            Pos::ParLeft => Sexp::atom("left"),
            Pos::ParRight => Sexp::atom("right"),
        }
    }
}

pub fn path_sexp(path: &[Pos]) -> Sexp {
    Sexp::list(path.iter().map(ToSexp::to_sexp))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("expression is not a redex: {0}")]
    NotARedex(String),
    #[error("path does not address a subexpression")]
    BadPath,
}

pub fn is_redex_term(t: &Term) -> bool {
    matches!(t, Term::App(f, _) if matches!(**f, Term::Abs(..) | Term::TauBar(_)))
}

pub fn is_redex_test(q: &Test) -> bool {
    match q {
        Test::Tau(m) => matches!(**m, Term::Abs(..) | Term::TauBar(_)),
        Test::Par(l, r) => matches!((&**l, &**r), (Test::Eps, Test::Eps)),
        Test::Eps => false,
    }
}

/// Contracts a term redex at the root: beta, or one of the two `tbar` rules.
pub fn contract_term(t: &Term) -> Option<(Rule, FormalSum<Term>)> {
    let Term::App(f, bag) = t else { return None };
    match &**f {
        Term::Abs(x, body) => Some((Rule::Beta, beta_contract(x, body, bag))),
        Term::TauBar(_) if bag.linear().is_empty() => {
            Some((Rule::TauBar1, FormalSum::single((**f).clone())))
        }
        Term::TauBar(_) => Some((Rule::TauBar2, FormalSum::zero())),
        _ => None,
    }
}

/// Contracts a test redex at the root: gamma, tau, or eps.
pub fn contract_test(q: &Test) -> Option<(Rule, FormalSum<Test>)> {
    match q {
        Test::Tau(m) => match &**m {
            Term::TauBar(inner) => Some((Rule::Gamma, FormalSum::single((**inner).clone()))),
            Term::Abs(x, body) => Some((
                Rule::Tau,
                body.subst(x, &FormalSum::zero()).map(Test::tau),
            )),
            _ => None,
        },
        Test::Par(l, r) if matches!((&**l, &**r), (Test::Eps, Test::Eps)) => {
            Some((Rule::Eps, FormalSum::single(Test::Eps)))
        }
        _ => None,
    }
}

/// Contracts a root redex of either sort.
pub fn test_contract(redex: &Expr) -> Result<(Rule, FormalSum<Expr>), RewriteError> {
    match redex {
        Expr::Term(t) => contract_term(t)
            .map(|(r, s)| (r, s.map(Expr::Term)))
            .ok_or_else(|| RewriteError::NotARedex(t.to_string())),
        Expr::Test(q) => contract_test(q)
            .map(|(r, s)| (r, s.map(Expr::Test)))
            .ok_or_else(|| RewriteError::NotARedex(q.to_string())),
    }
}

fn rewrite_term(t: &Term, path: &[Pos]) -> Result<(Rule, FormalSum<Term>), RewriteError> {
    let Some((first, rest)) = path.split_first() else {
        return contract_term(t).ok_or_else(|| RewriteError::NotARedex(t.to_string()));
    };
    match (first, t) {
        (Pos::Body, Term::Abs(x, body)) => {
            let (rule, s) = rewrite_term(body, rest)?;
            Ok((rule, s.map(|b| Term::Abs(x.clone(), Box::new(b)))))
        }
        (Pos::Fun, Term::App(f, bag)) => {
            let (rule, s) = rewrite_term(f, rest)?;
            Ok((rule, s.map(|f2| Term::App(Box::new(f2), bag.clone()))))
        }
        (Pos::Linear(i), Term::App(f, bag)) => {
            let comp = bag.linear().get(*i).ok_or(RewriteError::BadPath)?;
            let (rule, s) = rewrite_term(comp, rest)?;
            Ok((
                rule,
                s.map(|c| {
                    let mut linear = bag.linear().to_vec();
                    linear[*i] = c;
                    Term::App(f.clone(), Box::new(Bag::new(linear, bag.banged_sum().clone())))
                }),
            ))
        }
        (Pos::Banged(j), Term::App(f, bag)) => {
            let summand = bag.banged_sum().items().get(*j).ok_or(RewriteError::BadPath)?;
            let (rule, s) = rewrite_term(summand, rest)?;
            // a banged slot absorbs the result as a sum; nothing distributes
            let mut banged: Vec<Term> = bag.banged_sum().items().to_vec();
            banged.remove(*j);
            banged.extend(s);
            let bag = Bag::new(bag.linear().to_vec(), FormalSum::from_vec(banged));
            Ok((rule, FormalSum::single(Term::App(f.clone(), Box::new(bag)))))
        }
        (Pos::TauBarTest, Term::TauBar(q)) => {
            let (rule, s) = rewrite_test(q, rest)?;
            Ok((rule, s.map(Term::tau_bar)))
        }
        _ => Err(RewriteError::BadPath),
    }
}

fn rewrite_test(q: &Test, path: &[Pos]) -> Result<(Rule, FormalSum<Test>), RewriteError> {
    let Some((first, rest)) = path.split_first() else {
        return contract_test(q).ok_or_else(|| RewriteError::NotARedex(q.to_string()));
    };
    match (first, q) {
        (Pos::TauSubject, Test::Tau(m)) => {
            let (rule, s) = rewrite_term(m, rest)?;
            Ok((rule, s.map(Test::tau)))
        }
        (Pos::ParLeft, Test::Par(l, r)) => {
            let (rule, s) = rewrite_test(l, rest)?;
            Ok((rule, s.map(|l2| Test::par(l2, (**r).clone()))))
        }
        (Pos::ParRight, Test::Par(l, r)) => {
            let (rule, s) = rewrite_test(r, rest)?;
            Ok((rule, s.map(|r2| Test::par((**l).clone(), r2))))
        }
        _ => Err(RewriteError::BadPath),
    }
}

/// Outer-head normal form, checked directly against the normal-form grammar.
pub fn is_onf_term(t: &Term) -> bool {
    let (_, body) = t.strip_abs();
    let (head, bags) = body.spine();
    match head {
        Term::Var(_) => bags.iter().all(|b| b.linear().iter().all(is_onf_term)),
        Term::TauBar(q) => bags.is_empty() && is_onf_test(q),
        _ => false,
    }
}

pub fn is_onf_test(q: &Test) -> bool {
    match q {
        Test::Eps => true,
        Test::Tau(m) => {
            let (head, bags) = m.spine();
            matches!(head, Term::Var(_)) && bags.iter().all(|b| b.linear().iter().all(is_onf_term))
        }
        Test::Par(l, r) => {
            !matches!((&**l, &**r), (Test::Eps, Test::Eps)) && is_onf_test(l) && is_onf_test(r)
        }
    }
}

fn outer_head_term(t: &Term, path: &mut Path) -> bool {
    let depth = path.len();
    let (binders, body) = t.strip_abs();
    path.extend(std::iter::repeat_n(Pos::Body, binders.len()));
    let (head, bags) = body.spine();
    let k = bags.len();
    let found = match head {
        Term::Abs(..) | Term::TauBar(_) if k > 0 => {
            path.extend(std::iter::repeat_n(Pos::Fun, k - 1));
            true
        }
        Term::TauBar(q) => {
            path.push(Pos::TauBarTest);
            outer_head_test(q, path)
        }
        Term::Var(_) => (0..k).any(|j| {
            let base = path.len();
            path.extend(std::iter::repeat_n(Pos::Fun, k - 1 - j));
            for (i, comp) in bags[j].linear().iter().enumerate() {
                path.push(Pos::Linear(i));
                if outer_head_term(comp, path) {
                    return true;
                }
                path.pop();
            }
            path.truncate(base);
            false
        }),
        _ => false,
    };
    if !found {
        path.truncate(depth);
    }
    found
}

fn outer_head_test(q: &Test, path: &mut Path) -> bool {
    let depth = path.len();
    let found = match q {
        Test::Eps => false,
        _ if is_redex_test(q) => true,
        Test::Tau(m) => {
            path.push(Pos::TauSubject);
            outer_head_term(m, path)
        }
        Test::Par(l, r) => {
            path.push(Pos::ParLeft);
            if outer_head_test(l, path) {
                true
            } else {
                path.pop();
                path.push(Pos::ParRight);
                outer_head_test(r, path)
            }
        }
    };
    if !found {
        path.truncate(depth);
    }
    found
}

/// Order in which [`first_redex`] scans for redexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    /// Pre-order, children left to right.
    LeftmostOutermost,
    /// Post-order, children right to left.
    RightmostInnermost,
}

fn children_term(t: &Term) -> Vec<(Pos, Child<'_>)> {
    match t {
        Term::Var(_) => Vec::new(),
        Term::Abs(_, body) => vec![(Pos::Body, Child::Term(body))],
        Term::App(f, bag) => {
            let mut v = vec![(Pos::Fun, Child::Term(f))];
            v.extend(
                bag.linear()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (Pos::Linear(i), Child::Term(c))),
            );
            v.extend(
                bag.banged_sum()
                    .iter()
                    .enumerate()
                    .map(|(j, c)| (Pos::Banged(j), Child::Term(c))),
            );
            v
        }
        Term::TauBar(q) => vec![(Pos::TauBarTest, Child::Test(q))],
    }
}

fn children_test(q: &Test) -> Vec<(Pos, Child<'_>)> {
    match q {
        Test::Eps => Vec::new(),
        Test::Par(l, r) => vec![(Pos::ParLeft, Child::Test(l)), (Pos::ParRight, Child::Test(r))],
        Test::Tau(m) => vec![(Pos::TauSubject, Child::Term(m))],
    }
}

#[derive(Clone, Copy)]
enum Child<'a> {
    Term(&'a Term),
    Test(&'a Test),
}

impl Child<'_> {
    fn is_redex(self) -> bool {
        match self {
            Child::Term(t) => is_redex_term(t),
            Child::Test(q) => is_redex_test(q),
        }
    }

    fn children(self) -> Vec<(Pos, Self)> {
        match self {
            Child::Term(t) => children_term(t),
            Child::Test(q) => children_test(q),
        }
    }
}

fn scan(node: Child<'_>, order: Scan, path: &mut Path) -> bool {
    if order == Scan::LeftmostOutermost && node.is_redex() {
        return true;
    }
    let mut kids = node.children();
    if order == Scan::RightmostInnermost {
        kids.reverse();
    }
    for (pos, kid) in kids {
        path.push(pos);
        if scan(kid, order, path) {
            return true;
        }
        path.pop();
    }
    order == Scan::RightmostInnermost && node.is_redex()
}

/// Expressions the reduction engine can run on.
pub trait Reducible: Node + ToSexp + fmt::Display + Sized + Send + Sync {
    fn is_onf(&self) -> bool;
    /// Position of the next outer-head redex, `None` on normal forms.
    fn outer_head_path(&self) -> Option<Path>;
    fn first_redex(&self, order: Scan) -> Option<Path>;
    fn rewrite_at(&self, path: &[Pos]) -> Result<(Rule, FormalSum<Self>), RewriteError>;
    fn into_expr(self) -> Expr;
}

impl Reducible for Term {
    fn is_onf(&self) -> bool {
        is_onf_term(self)
    }

    fn outer_head_path(&self) -> Option<Path> {
        let mut p = Vec::new();
        outer_head_term(self, &mut p).then_some(p)
    }

    fn first_redex(&self, order: Scan) -> Option<Path> {
        let mut p = Vec::new();
        scan(Child::Term(self), order, &mut p).then_some(p)
    }

    fn rewrite_at(&self, path: &[Pos]) -> Result<(Rule, FormalSum<Term>), RewriteError> {
        rewrite_term(self, path)
    }

    fn into_expr(self) -> Expr {
        Expr::Term(self)
    }
}

impl Reducible for Test {
    fn is_onf(&self) -> bool {
        is_onf_test(self)
    }

    fn outer_head_path(&self) -> Option<Path> {
        let mut p = Vec::new();
        outer_head_test(self, &mut p).then_some(p)
    }

    fn first_redex(&self, order: Scan) -> Option<Path> {
        let mut p = Vec::new();
        scan(Child::Test(self), order, &mut p).then_some(p)
    }

    fn rewrite_at(&self, path: &[Pos]) -> Result<(Rule, FormalSum<Test>), RewriteError> {
        rewrite_test(self, path)
    }

    fn into_expr(self) -> Expr {
        Expr::Test(self)
    }
}

/// Result of one outer-head step.
#[derive(Clone, Debug)]
pub enum Step<T: Node> {
    AlreadyNormal,
    Reduced {
        rule: Rule,
        path: Path,
        result: FormalSum<T>,
    },
}

/// One deterministic outer-head step.
pub fn outer_head_step<T: Reducible>(e: &T) -> Step<T> {
    match e.outer_head_path() {
        None => Step::AlreadyNormal,
        Some(path) => {
            let (rule, result) = e
                .rewrite_at(&path)
                .expect("outer-head search returns a redex position");
            Step::Reduced { rule, path, result }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_test};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn q(s: &str) -> Test {
        parse_test(s).unwrap()
    }

    fn step_term(s: &str) -> (Rule, String) {
        match outer_head_step(&t(s)) {
            Step::Reduced { rule, result, .. } => (rule, result.to_string()),
            Step::AlreadyNormal => panic!("{s} is normal"),
        }
    }

    fn step_test(s: &str) -> (Rule, String) {
        match outer_head_step(&q(s)) {
            Step::Reduced { rule, result, .. } => (rule, result.to_string()),
            Step::AlreadyNormal => panic!("{s} is normal"),
        }
    }

    #[test]
    fn gamma() {
        assert_eq!(step_test("tau(tbar(eps))"), (Rule::Gamma, "eps".into()));
    }

    #[test]
    fn tau_substitutes_zero() {
        assert_eq!(step_test("tau(\\x. y [x!])"), (Rule::Tau, "tau(y [0!])".into()));
        assert_eq!(step_test("tau(\\x. x [y!])"), (Rule::Tau, "0".into()));
    }

    #[test]
    fn taubar_rules() {
        assert_eq!(step_term("tbar(eps) [m!]"), (Rule::TauBar1, "tbar(eps)".into()));
        assert_eq!(step_term("tbar(eps) [n; m!]"), (Rule::TauBar2, "0".into()));
    }

    #[test]
    fn eps_rule() {
        assert_eq!(step_test("eps | eps"), (Rule::Eps, "eps".into()));
    }

    #[test]
    fn beta_then_self_application() {
        assert_eq!(
            step_term("(\\x. x [x!]) [(\\y. y)!]"),
            (Rule::Beta, "(\\y. y) [\\y. y!]".into())
        );
    }

    #[test]
    fn reduces_inside_linear_slot_under_variable_head() {
        let (rule, out) = step_term("\\z. z [(\\x. x) [y!]; w!]");
        assert_eq!(rule, Rule::Beta);
        assert_eq!(out, "\\z. z [y; w!]");
    }

    #[test]
    fn onf_examples() {
        let omega = "(\\x. x [x!]) [(\\x. x [x!])!]";
        assert!(is_onf_term(&t(&format!("\\x. y [{omega}!]"))));
        assert!(!is_onf_term(&t(&format!("y [{omega}; z!]"))));
        assert!(!is_onf_test(&q("tau(\\x. x)")));
        assert!(is_onf_test(&q("eps")));
        assert!(!is_onf_test(&q("eps | eps")));
        assert!(is_onf_test(&q("eps | tau(y [z!])")));
        assert!(is_onf_term(&t("\\x. tbar(tau(x))")));
        assert!(!is_onf_term(&t("\\x. tbar(tau(\\y. y))")));
        assert!(!is_onf_term(&t("tbar(eps) [x!]")));
    }

    #[test]
    fn par_reduces_leftmost_branch_first() {
        let (rule, out) = step_test("tau(tbar(eps)) | tau(tbar(eps))");
        assert_eq!(rule, Rule::Gamma);
        assert_eq!(out, "eps | tau(tbar(eps))");
    }

    #[test]
    fn non_redex_is_a_contract_violation() {
        assert!(matches!(
            test_contract(&Expr::Term(t("x [y!]"))),
            Err(RewriteError::NotARedex(_))
        ));
        assert!(test_contract(&Expr::Test(q("eps | tau(x)"))).is_err());
    }

    #[test]
    fn redex_scans() {
        // two redexes: the outer one in head position and one in the banged slot
        let m = t("(\\x. x) [((\\y. y) [z!])!]");
        assert_eq!(m.first_redex(Scan::LeftmostOutermost), Some(vec![]));
        assert_eq!(
            m.first_redex(Scan::RightmostInnermost),
            Some(vec![Pos::Banged(0)])
        );
    }

    #[test]
    fn banged_rewrite_keeps_sum_in_slot() {
        let m = t("f [((\\y. y [y!]) [(a + b)!])!]");
        let (rule, out) = m.rewrite_at(&[Pos::Banged(0)]).unwrap();
        assert_eq!(rule, Rule::Beta);
        assert_eq!(out.len(), 1);
        assert_eq!(out.to_string(), "f [a [a + b!] + b [a + b!]!]");
    }
}
