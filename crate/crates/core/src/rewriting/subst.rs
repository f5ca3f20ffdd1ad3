//! Ordinary substitution `M{N/x}` and linear substitution `M<N/x>`.
//!
//! Both return canonical sums: the substituted sum is distributed through
//! every linear context, while banged slots absorb it as a sum.

use std::collections::BTreeSet;

use crate::syntax::{Bag, FormalSum, Name, Node, Term, Test};

/// A name derived from `base` that does not occur in `avoid`.
pub fn fresh_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| Name::new(&format!("{stem}{i}")))
        .find(|n| !avoid.contains(n))
        .expect("infinitely many candidates")
}

/// Replaces the free occurrences of `from` by `to`. `to` must not occur in `t`.
pub fn rename_free(t: &Term, from: &Name, to: &Name) -> Term {
    match t {
        Term::Var(y) if y == from => Term::Var(to.clone()),
        Term::Var(_) => t.clone(),
        Term::Abs(y, _) if y == from => t.clone(),
        Term::Abs(y, body) => Term::Abs(y.clone(), Box::new(rename_free(body, from, to))),
        Term::App(f, bag) => Term::app(rename_free(f, from, to), rename_free_bag(bag, from, to)),
        Term::TauBar(q) => Term::tau_bar(rename_free_test(q, from, to)),
    }
}

fn rename_free_bag(b: &Bag, from: &Name, to: &Name) -> Bag {
    Bag::new(
        b.linear().iter().map(|t| rename_free(t, from, to)).collect(),
        b.banged_sum()
            .iter()
            .map(|t| rename_free(t, from, to))
            .collect(),
    )
}

fn rename_free_test(q: &Test, from: &Name, to: &Name) -> Test {
    match q {
        Test::Eps => Test::Eps,
        Test::Par(l, r) => Test::par(rename_free_test(l, from, to), rename_free_test(r, from, to)),
        Test::Tau(m) => Test::tau(rename_free(m, from, to)),
    }
}

/// Alpha-renames `\y. body` when `y` would capture a free variable of the
/// substituted expression.
fn rename_binder(y: &Name, body: &Term, x: &Name, fv_n: &BTreeSet<Name>) -> Option<(Name, Term)> {
    if !fv_n.contains(y) {
        return None;
    }
    let mut avoid = body.names();
    avoid.extend(fv_n.iter().cloned());
    avoid.insert(x.clone());
    let z = fresh_name(y, &avoid);
    let body = rename_free(body, y, &z);
    Some((z, body))
}

struct Subst<'a> {
    x: &'a Name,
    n: &'a FormalSum<Term>,
    fv_n: BTreeSet<Name>,
}

impl Subst<'_> {
    fn term(&self, m: &Term) -> FormalSum<Term> {
        match m {
            Term::Var(y) if y == self.x => self.n.clone(),
            Term::Var(_) => FormalSum::single(m.clone()),
            Term::Abs(y, _) if y == self.x => FormalSum::single(m.clone()),
            Term::Abs(y, body) => match rename_binder(y, body, self.x, &self.fv_n) {
                Some((z, body)) => self.term(&body).map(|b| Term::Abs(z.clone(), Box::new(b))),
                None => self.term(body).map(|b| Term::Abs(y.clone(), Box::new(b))),
            },
            Term::App(f, bag) => app_product(self.term(f), self.bag(bag)),
            Term::TauBar(q) => self.test(q).map(Term::tau_bar),
        }
    }

    fn bag(&self, b: &Bag) -> FormalSum<Bag> {
        let banged: FormalSum<Term> = b.banged_sum().iter().flat_map(|t| self.term(t)).collect();
        let choices: Vec<FormalSum<Term>> = b.linear().iter().map(|t| self.term(t)).collect();
        cartesian(choices)
            .into_iter()
            .map(|linear| Bag::new(linear, banged.clone()))
            .collect()
    }

    fn test(&self, q: &Test) -> FormalSum<Test> {
        match q {
            Test::Eps => FormalSum::single(Test::Eps),
            Test::Par(l, r) => par_product(self.test(l), self.test(r)),
            Test::Tau(m) => self.term(m).map(Test::tau),
        }
    }
}

struct LinearSubst<'a> {
    x: &'a Name,
    n: &'a Term,
    fv_n: BTreeSet<Name>,
}

impl LinearSubst<'_> {
    fn term(&self, m: &Term) -> FormalSum<Term> {
        match m {
            Term::Var(y) if y == self.x => FormalSum::single(self.n.clone()),
            Term::Var(_) => FormalSum::zero(),
            Term::Abs(y, _) if y == self.x => FormalSum::zero(),
            Term::Abs(y, body) => match rename_binder(y, body, self.x, &self.fv_n) {
                Some((z, body)) => self.term(&body).map(|b| Term::Abs(z.clone(), Box::new(b))),
                None => self.term(body).map(|b| Term::Abs(y.clone(), Box::new(b))),
            },
            Term::App(f, bag) => {
                // (M P)<N/x> = (M<N/x> P) + (M P<N/x>)
                let left = self
                    .term(f)
                    .map(|f2| Term::App(Box::new(f2), bag.clone()));
                let right = self
                    .bag(bag)
                    .map(|b2| Term::App(f.clone(), Box::new(b2)));
                left.plus(right)
            }
            Term::TauBar(q) => self.test(q).map(Term::tau_bar),
        }
    }

    /// One summand per linear slot, plus one per banged summand where the
    /// derivative of the banged term joins the linear part.
    fn bag(&self, b: &Bag) -> FormalSum<Bag> {
        let mut out = Vec::new();
        for (i, t) in b.linear().iter().enumerate() {
            for s in self.term(t) {
                let mut linear = b.linear().to_vec();
                linear[i] = s;
                out.push(Bag::new(linear, b.banged_sum().clone()));
            }
        }
        for t in b.banged_sum().iter() {
            for s in self.term(t) {
                let mut linear = b.linear().to_vec();
                linear.push(s);
                out.push(Bag::new(linear, b.banged_sum().clone()));
            }
        }
        FormalSum::from_vec(out)
    }

    fn test(&self, q: &Test) -> FormalSum<Test> {
        match q {
            Test::Eps => FormalSum::zero(),
            Test::Par(l, r) => {
                let left = self.test(l).map(|l2| Test::par(l2, (**r).clone()));
                let right = self.test(r).map(|r2| Test::par((**l).clone(), r2));
                left.plus(right)
            }
            Test::Tau(m) => self.term(m).map(Test::tau),
        }
    }
}

/// All pairs, moving each element into its last use.
fn product<A: Clone, B: Clone, C>(xs: Vec<A>, ys: Vec<B>, mut mk: impl FnMut(A, B) -> C) -> Vec<C> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    let last_x = xs.len();
    let mut ys = Some(ys);
    for (i, x) in xs.into_iter().enumerate() {
        if i + 1 == last_x {
            let ys = ys.take().expect("consumed once");
            let last_y = ys.len();
            let mut x = Some(x);
            for (j, y) in ys.into_iter().enumerate() {
                let xv = if j + 1 == last_y {
                    x.take().expect("moved once")
                } else {
                    x.clone().expect("present")
                };
                out.push(mk(xv, y));
            }
        } else {
            for y in ys.as_ref().expect("still present") {
                out.push(mk(x.clone(), y.clone()));
            }
        }
    }
    out
}

fn app_product(funs: FormalSum<Term>, bags: FormalSum<Bag>) -> FormalSum<Term> {
    FormalSum::from_vec(product(funs.into_items(), bags.into_items(), Term::app))
}

fn par_product(ls: FormalSum<Test>, rs: FormalSum<Test>) -> FormalSum<Test> {
    FormalSum::from_vec(product(ls.into_items(), rs.into_items(), Test::par))
}

fn cartesian(choices: Vec<FormalSum<Term>>) -> Vec<Vec<Term>> {
    let n = choices.len();
    choices
        .into_iter()
        .fold(vec![Vec::with_capacity(n)], |acc, alts| {
            product(acc, alts.into_items(), |mut v, t| {
                v.push(t);
                v
            })
        })
}

/// Syntax categories that support both substitutions.
pub trait Substitute: Node + Sized {
    /// `self{N/x}`, capture-avoiding.
    fn subst(&self, x: &Name, n: &FormalSum<Term>) -> FormalSum<Self>;
    /// `self<N/x>`, capture-avoiding.
    fn linear_subst(&self, x: &Name, n: &Term) -> FormalSum<Self>;
}

impl Substitute for Term {
    fn subst(&self, x: &Name, n: &FormalSum<Term>) -> FormalSum<Term> {
        Subst { x, n, fv_n: n.free_vars() }.term(self)
    }

    fn linear_subst(&self, x: &Name, n: &Term) -> FormalSum<Term> {
        LinearSubst { x, n, fv_n: n.free_vars() }.term(self)
    }
}

impl Substitute for Bag {
    fn subst(&self, x: &Name, n: &FormalSum<Term>) -> FormalSum<Bag> {
        Subst { x, n, fv_n: n.free_vars() }.bag(self)
    }

    fn linear_subst(&self, x: &Name, n: &Term) -> FormalSum<Bag> {
        LinearSubst { x, n, fv_n: n.free_vars() }.bag(self)
    }
}

impl Substitute for Test {
    fn subst(&self, x: &Name, n: &FormalSum<Term>) -> FormalSum<Test> {
        Subst { x, n, fv_n: n.free_vars() }.test(self)
    }

    fn linear_subst(&self, x: &Name, n: &Term) -> FormalSum<Test> {
        LinearSubst { x, n, fv_n: n.free_vars() }.test(self)
    }
}

/// `M<N1/x>...<Nk/x>{L/x}` with the linear arguments consumed in the given order.
pub fn linear_fold(
    x: &Name,
    body: &Term,
    linear: &[Term],
    banged: &FormalSum<Term>,
) -> FormalSum<Term> {
    let mut arg_fv: BTreeSet<Name> = banged.free_vars();
    for t in linear {
        arg_fv.extend(t.free_vars());
    }
    // the binder must not clash with the arguments, or a later linear
    // substitution would also hit occurrences brought in by an earlier one
    let (x, body) = if arg_fv.contains(x) {
        let mut avoid = body.names();
        avoid.extend(arg_fv);
        let z = fresh_name(x, &avoid);
        let body = rename_free(body, x, &z);
        (z, body)
    } else {
        (x.clone(), body.clone())
    };
    let mut acc = FormalSum::single(body);
    for n in linear {
        acc = acc.flat_map(|t| t.linear_subst(&x, n));
    }
    acc.flat_map(|t| t.subst(&x, banged))
}

/// The beta rule: `(\x. M) [N1,...,Nn; L!] -> M<N1/x>...<Nn/x>{L/x}`,
/// consuming linear arguments in the bag's canonical order.
pub fn beta_contract(binder: &Name, body: &Term, bag: &Bag) -> FormalSum<Term> {
    linear_fold(binder, body, bag.linear(), bag.banged_sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_normal, parse_term, Normal};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn terms(s: &str) -> FormalSum<Term> {
        match parse_normal(s).unwrap() {
            Normal::Terms(s) => s,
            Normal::Tests(_) => panic!("expected terms"),
        }
    }

    fn x() -> Name {
        Name::new("x")
    }

    fn assert_sum(actual: &FormalSum<Term>, expected: &str) {
        assert_eq!(actual.key(), terms(expected).key(), "got {actual}");
    }

    #[test]
    fn subst_variable() {
        assert_sum(&t("x").subst(&x(), &terms("p")), "p");
    }

    #[test]
    fn subst_under_binder() {
        assert_sum(&t("\\y. x [y!]").subst(&x(), &terms("p")), "\\y. p [y!]");
    }

    #[test]
    fn subst_zero_into_banged_slot_survives() {
        let r = t("y [x!]").subst(&x(), &FormalSum::zero());
        assert_sum(&r, "y [0!]");
        assert_eq!(r.to_string(), "y [0!]");
    }

    #[test]
    fn subst_zero_into_linear_position_annihilates() {
        assert!(t("y [x; z!]").subst(&x(), &FormalSum::zero()).is_zero());
        assert!(t("x [z!]").subst(&x(), &FormalSum::zero()).is_zero());
    }

    #[test]
    fn subst_sum_distributes_linearly_but_not_under_bang() {
        assert_sum(
            &t("x [x!]").subst(&x(), &terms("a + b")),
            "a [(a + b)!] + b [(a + b)!]",
        );
    }

    #[test]
    fn subst_avoids_capture() {
        let r = t("\\y. x [y!]").subst(&x(), &terms("y"));
        assert_eq!(r.len(), 1);
        assert_sum(&r, "\\z. y [z!]");
        assert_eq!(r.to_string(), "\\y1. y [y1!]");
    }

    #[test]
    fn linear_subst_clauses() {
        assert_sum(&t("x").linear_subst(&x(), &t("n")), "n");
        assert!(t("y").linear_subst(&x(), &t("n")).is_zero());
        assert_sum(&t("\\y. x").linear_subst(&x(), &t("n")), "\\y. n");
    }

    #[test]
    fn linear_subst_bag_with_dead_linear_slot() {
        let r = Bag::new(vec![t("z")], FormalSum::single(t("x"))).linear_subst(&x(), &t("n"));
        assert_eq!(r.len(), 1);
        assert_eq!(r.items()[0].to_string(), "[n, z; x!]");
    }

    #[test]
    fn linear_subst_bag_counts_every_slot() {
        // [x, x; x!]<n/x> = 2 * [n, x; x!] + [x, x, n; x!]
        let r = Bag::new(vec![t("x"), t("x")], FormalSum::single(t("x")))
            .linear_subst(&x(), &t("n"));
        let printed: Vec<String> = r.iter().map(|b| b.to_string()).collect();
        assert_eq!(printed, ["[n, x, x; x!]", "[n, x; x!]", "[n, x; x!]"]);
    }

    #[test]
    fn linear_subst_application_product_rule() {
        assert_sum(
            &t("x [x!]").linear_subst(&x(), &t("n")),
            "n [x!] + x [n; x!]",
        );
    }

    #[test]
    fn linear_subst_tests() {
        let q = Test::tau(t("x"));
        assert_eq!(q.linear_subst(&x(), &t("n")).items()[0].to_string(), "tau(n)");
        assert!(Test::Eps.linear_subst(&x(), &t("n")).is_zero());
        let q = Test::par(Test::tau(t("x")), Test::Eps);
        let r = q.linear_subst(&x(), &t("n"));
        assert_eq!(r.len(), 1);
        assert_eq!(r.items()[0].to_string(), "tau(n) | eps");
    }

    #[test]
    fn beta_examples() {
        let bag = |s: &str| match t(&format!("f {s}")) {
            Term::App(_, b) => *b,
            _ => unreachable!(),
        };
        assert_sum(&beta_contract(&x(), &t("x"), &bag("[p!]")), "p");
        assert_sum(&beta_contract(&x(), &t("x"), &bag("[n; p!]")), "n");
        assert!(beta_contract(&x(), &t("y"), &bag("[n; p!]")).is_zero());
    }

    #[test]
    fn beta_renames_binder_free_in_arguments() {
        // (\x. f [x; x!]) [x; p!] must use the argument x exactly once
        let body = t("f [x; x!]");
        let r = linear_fold(&x(), &body, &[t("x")], &terms("p"));
        assert_sum(&r, "f [x; p!] + f [p, x; p!]");
    }

    #[test]
    fn fresh_names_strip_digits() {
        let avoid: BTreeSet<Name> = ["x1", "x2"].into_iter().map(Name::new).collect();
        assert_eq!(fresh_name(&Name::new("x1"), &avoid).as_str(), "x3");
    }
}
