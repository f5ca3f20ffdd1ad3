#![allow(dead_code)]

//! Helpers shared by the integration tests.

use resource_lambda::syntax::{parse_normal, Bag, FormalSum, Name, Normal, Term, Test};

pub fn terms(s: &str) -> FormalSum<Term> {
    match parse_normal(s).expect("parses") {
        Normal::Terms(t) => t,
        Normal::Tests(_) => panic!("{s}: expected terms"),
    }
}

pub fn tests(s: &str) -> FormalSum<Test> {
    match parse_normal(s).expect("parses") {
        Normal::Tests(t) => t,
        // a bare `0` reads as a term sum
        Normal::Terms(t) if t.is_zero() => FormalSum::zero(),
        Normal::Terms(_) => panic!("{s}: expected tests"),
    }
}

#[derive(Clone, Copy, Debug)]
enum Hop {
    Body,
    Fun,
    Linear(usize),
    Banged(usize),
    TauBarTest,
    ParLeft,
    ParRight,
    Subject,
}

/// `M<N/x>` computed by listing the free occurrences of `x` and building,
/// for each, the copy of `M` where that occurrence alone is replaced. An
/// occurrence inside a banged summand `t` moves one copy of `t` (with the
/// replacement) into the linear part of its bag.
///
/// Assumes no binder on the way to an occurrence captures a free variable
/// of `N`.
pub fn slow_linear_subst(m: &Term, x: &Name, n: &Term) -> FormalSum<Term> {
    let mut paths = Vec::new();
    term_paths(m, x, &mut Vec::new(), &mut paths);
    paths.iter().map(|p| replace_term(m, p, n)).collect()
}

/// Number of free occurrences of `x`, counting each banged summand once.
pub fn occurrences(m: &Term, x: &Name) -> usize {
    let mut paths = Vec::new();
    term_paths(m, x, &mut Vec::new(), &mut paths);
    paths.len()
}

fn term_paths(t: &Term, x: &Name, cur: &mut Vec<Hop>, out: &mut Vec<Vec<Hop>>) {
    let under = |hop: Hop, cur: &mut Vec<Hop>, f: &mut dyn FnMut(&mut Vec<Hop>)| {
        cur.push(hop);
        f(cur);
        cur.pop();
    };
    match t {
        Term::Var(y) if y == x => out.push(cur.clone()),
        Term::Var(_) => {}
        Term::Abs(y, _) if y == x => {}
        Term::Abs(_, body) => under(Hop::Body, cur, &mut |c| term_paths(body, x, c, out)),
        Term::App(f, bag) => {
            under(Hop::Fun, cur, &mut |c| term_paths(f, x, c, out));
            for (i, l) in bag.linear().iter().enumerate() {
                under(Hop::Linear(i), cur, &mut |c| term_paths(l, x, c, out));
            }
            for (j, b) in bag.banged_sum().iter().enumerate() {
                under(Hop::Banged(j), cur, &mut |c| term_paths(b, x, c, out));
            }
        }
        Term::TauBar(q) => under(Hop::TauBarTest, cur, &mut |c| test_paths(q, x, c, out)),
    }
}

fn test_paths(q: &Test, x: &Name, cur: &mut Vec<Hop>, out: &mut Vec<Vec<Hop>>) {
    match q {
        Test::Eps => {}
        Test::Par(l, r) => {
            cur.push(Hop::ParLeft);
            test_paths(l, x, cur, out);
            cur.pop();
            cur.push(Hop::ParRight);
            test_paths(r, x, cur, out);
            cur.pop();
        }
        Test::Tau(m) => {
            cur.push(Hop::Subject);
            term_paths(m, x, cur, out);
            cur.pop();
        }
    }
}

fn replace_term(t: &Term, path: &[Hop], n: &Term) -> Term {
    let Some((hop, rest)) = path.split_first() else {
        return n.clone();
    };
    match (t, hop) {
        (Term::Abs(y, body), Hop::Body) => Term::abs(y.clone(), replace_term(body, rest, n)),
        (Term::App(f, bag), Hop::Fun) => Term::app(replace_term(f, rest, n), (**bag).clone()),
        (Term::App(f, bag), Hop::Linear(i)) => {
            let mut linear = bag.linear().to_vec();
            linear[*i] = replace_term(&linear[*i], rest, n);
            Term::app((**f).clone(), Bag::new(linear, bag.banged_sum().clone()))
        }
        (Term::App(f, bag), Hop::Banged(j)) => {
            let mut linear = bag.linear().to_vec();
            linear.push(replace_term(&bag.banged_sum().items()[*j], rest, n));
            Term::app((**f).clone(), Bag::new(linear, bag.banged_sum().clone()))
        }
        (Term::TauBar(q), Hop::TauBarTest) => Term::tau_bar(replace_test(q, rest, n)),
        _ => unreachable!("path does not fit the term"),
    }
}

fn replace_test(q: &Test, path: &[Hop], n: &Term) -> Test {
    let (hop, rest) = path.split_first().expect("occurrences sit in terms");
    match (q, hop) {
        (Test::Par(l, r), Hop::ParLeft) => Test::par(replace_test(l, rest, n), (**r).clone()),
        (Test::Par(l, r), Hop::ParRight) => Test::par((**l).clone(), replace_test(r, rest, n)),
        (Test::Tau(m), Hop::Subject) => Test::tau(replace_term(m, rest, n)),
        _ => unreachable!("path does not fit the test"),
    }
}
