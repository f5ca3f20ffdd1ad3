//! Backward derivation search for the non-idempotent intersection type
//! system whose judgements describe the interpretation in M∞.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::elem::{multiset_count, multisets, render_multiset, Elem, Env, Universe};
use crate::combinators::{term_a, term_b_n};
use crate::sexp::{Sexp, ToSexp};
use crate::syntax::{alpha_eq, Bag, Expr, FormalSum, Name, Node, Term, Test};

/// A finished derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub env: Env,
    pub subject: String,
    pub target: Option<String>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn node(rule: &'static str, env: &Env, subject: String, target: Option<&Elem>, premises: Vec<Derivation>) -> Self {
        Derivation {
            rule,
            env: env.clone(),
            subject,
            target: target.map(Elem::to_string),
            premises,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    fn write(&self, indent: usize, out: &mut String) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!("{} ⊢ {}", self.env.render(), self.subject));
        if let Some(t) = &self.target {
            out.push_str(&format!(" : {t}"));
        }
        out.push_str(&format!("   ({})\n", self.rule));
        for p in &self.premises {
            p.write(indent + 1, out);
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(0, &mut s);
        f.write_str(&s)
    }
}

impl ToSexp for Derivation {
    fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::atom(self.rule),
            Sexp::str(self.env.render()),
            Sexp::str(self.subject.clone()),
        ];
        if let Some(t) = &self.target {
            items.push(Sexp::str(t.clone()));
        }
        items.extend(self.premises.iter().map(ToSexp::to_sexp));
        Sexp::List(items)
    }
}

/// Three-valued answer of the bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivability {
    Yes(Derivation),
    /// No derivation exists with the searched bag types.
    No,
    /// The node budget or the universe bound was hit.
    Unknown,
}

impl Derivability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Derivability::Yes(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Derivability::Yes(_) => "Yes",
            Derivability::No => "No",
            Derivability::Unknown => "Unknown",
        }
    }
}

/// Result of a search over premises: either all of them, or a reason for failure.
enum Found {
    Yes(Vec<Derivation>),
    No,
    Unknown,
}

/// Largest number of bag types tried when an abstraction is applied.
const GUESS_CAP: u128 = 4096;

/// Search state: the universe, remaining node budget, and a memo table.
pub struct Search<'u> {
    universe: &'u Universe,
    fuel: usize,
    memo: HashMap<(Env, String, Option<Elem>), Derivability>,
    guesses: HashMap<(usize, usize), Vec<Vec<Elem>>>,
}

impl<'u> Search<'u> {
    pub fn new(universe: &'u Universe, fuel: usize) -> Self {
        Search {
            universe,
            fuel,
            memo: HashMap::new(),
            guesses: HashMap::new(),
        }
    }

    pub fn fuel_left(&self) -> usize {
        self.fuel
    }

    pub fn term(&mut self, env: &Env, m: &Term, target: &Elem) -> Derivability {
        let key = (env.clone(), m.key(), Some(target.clone()));
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        if self.fuel == 0 {
            return Derivability::Unknown;
        }
        self.fuel -= 1;
        let v = if unused_resources(env, m) {
            Derivability::No
        } else {
            self.term_rules(env, m, target)
        };
        self.memo.insert(key, v.clone());
        v
    }

    pub fn test(&mut self, env: &Env, q: &Test) -> Derivability {
        let key = (env.clone(), q.key(), None);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        if self.fuel == 0 {
            return Derivability::Unknown;
        }
        self.fuel -= 1;
        let v = if unused_resources(env, q) {
            Derivability::No
        } else {
            self.test_rules(env, q)
        };
        self.memo.insert(key, v.clone());
        v
    }

    /// A sum is derivable at `α` when one of its summands is.
    pub fn sum(&mut self, env: &Env, s: &FormalSum<Term>, target: &Elem) -> Derivability {
        let mut unknown = false;
        for m in s.iter() {
            match self.term(env, m, target) {
                Derivability::Yes(d) => return Derivability::Yes(d),
                Derivability::Unknown => unknown = true,
                Derivability::No => {}
            }
        }
        if unknown {
            Derivability::Unknown
        } else {
            Derivability::No
        }
    }

    fn term_rules(&mut self, env: &Env, m: &Term, target: &Elem) -> Derivability {
        let done = |rule, premises| {
            Derivability::Yes(Derivation::node(rule, env, m.to_string(), Some(target), premises))
        };
        match m {
            Term::Var(x) => {
                if *env == Env::single(x.clone(), vec![target.clone()]) {
                    done("var", vec![])
                } else {
                    Derivability::No
                }
            }
            Term::Abs(x, body) => {
                let (a, beta) = target.uncons();
                let inner = env.sum(&Env::single(x.clone(), a));
                match self.term(&inner, body, &beta) {
                    Derivability::Yes(d) => done("abs", vec![d]),
                    other => other,
                }
            }
            Term::TauBar(q) => {
                if *target != Elem::Star {
                    return Derivability::No;
                }
                match self.test(env, q) {
                    Derivability::Yes(d) => done("tbar", vec![d]),
                    other => other,
                }
            }
            Term::App(..) => {
                let (head, bags) = m.spine();
                match head {
                    Term::Var(x) => self.var_spine(env, m, x, &bags, target),
                    Term::TauBar(q) => {
                        // τ̄(Q) only has type `*`, so every bag gets type `[]`
                        if *target != Elem::Star || bags.iter().any(|b| !b.linear().is_empty()) {
                            return Derivability::No;
                        }
                        match self.test(env, q) {
                            Derivability::Yes(d) => done("tbar-app", vec![d]),
                            other => other,
                        }
                    }
                    _ => self.guessed_app(env, m, target),
                }
            }
        }
    }

    /// `x B₁ ⋯ Bₖ`: the type of `x` fixes every bag type.
    fn var_spine(&mut self, env: &Env, m: &Term, x: &Name, bags: &[&Bag], target: &Elem) -> Derivability {
        let candidates: BTreeSet<Elem> = env.get(x).iter().cloned().collect();
        let mut unknown = false;
        for gamma in candidates {
            let mut ws = Vec::with_capacity(bags.len());
            let mut rest = gamma.clone();
            for _ in bags {
                let (w, r) = rest.uncons();
                ws.push(w);
                rest = r;
            }
            if rest != *target {
                continue;
            }
            let remaining = env.remove_one(x, &gamma).expect("gamma is in the environment");
            match self.bags(&remaining, bags, &ws) {
                Found::Yes(mut ds) => {
                    let head = Derivation::node(
                        "var",
                        &Env::single(x.clone(), vec![gamma.clone()]),
                        x.to_string(),
                        Some(&gamma),
                        vec![],
                    );
                    ds.insert(0, head);
                    return Derivability::Yes(Derivation::node("app", env, m.to_string(), Some(target), ds));
                }
                Found::Unknown => unknown = true,
                Found::No => {}
            }
        }
        if unknown {
            Derivability::Unknown
        } else {
            Derivability::No
        }
    }

    /// Types `bags[i] : ws[i]`, splitting `env` among them.
    fn bags(&mut self, env: &Env, bags: &[&Bag], ws: &[Vec<Elem>]) -> Found {
        let Some((bag, rest_bags)) = bags.split_first() else {
            return if env.is_empty() { Found::Yes(vec![]) } else { Found::No };
        };
        let fv = bag.free_vars();
        let mut unknown = false;
        for (taken, rest) in env.splits(&fv) {
            match self.bag(&taken, bag, &ws[0]) {
                Found::No => continue,
                Found::Unknown => {
                    if !matches!(self.bags(&rest, rest_bags, &ws[1..]), Found::No) {
                        unknown = true;
                    }
                }
                Found::Yes(mut ds) => match self.bags(&rest, rest_bags, &ws[1..]) {
                    Found::Yes(more) => {
                        ds.extend(more);
                        return Found::Yes(ds);
                    }
                    Found::Unknown => unknown = true,
                    Found::No => {}
                },
            }
        }
        if unknown {
            Found::Unknown
        } else {
            Found::No
        }
    }

    /// `[L₁, …, Lₙ; L!] : w`: each linear term takes one member of `w`, the
    /// banged sum takes the rest, one derivation per member.
    fn bag(&mut self, env: &Env, bag: &Bag, w: &[Elem]) -> Found {
        if w.len() < bag.linear().len() {
            return Found::No;
        }
        self.linear_slots(env, bag.linear(), w.to_vec(), bag.banged_sum())
    }

    fn linear_slots(&mut self, env: &Env, linear: &[Term], w: Vec<Elem>, banged: &FormalSum<Term>) -> Found {
        let Some((l, rest_linear)) = linear.split_first() else {
            return self.banged_copies(env, banged, &w);
        };
        let distinct: BTreeSet<Elem> = w.iter().cloned().collect();
        let fv = l.free_vars();
        let splits = env.splits(&fv);
        let mut unknown = false;
        for beta in distinct {
            let mut rest_w = w.clone();
            let i = rest_w.iter().position(|e| *e == beta).expect("member");
            rest_w.remove(i);
            for (taken, rest) in &splits {
                let d = match self.term(taken, l, &beta) {
                    Derivability::No => continue,
                    Derivability::Unknown => None,
                    Derivability::Yes(d) => Some(d),
                };
                match (d, self.linear_slots(rest, rest_linear, rest_w.clone(), banged)) {
                    (_, Found::No) => {}
                    (Some(d), Found::Yes(mut ds)) => {
                        ds.insert(0, d);
                        return Found::Yes(ds);
                    }
                    _ => unknown = true,
                }
            }
        }
        if unknown {
            Found::Unknown
        } else {
            Found::No
        }
    }

    fn banged_copies(&mut self, env: &Env, banged: &FormalSum<Term>, w: &[Elem]) -> Found {
        let Some((beta, rest_w)) = w.split_first() else {
            return if env.is_empty() { Found::Yes(vec![]) } else { Found::No };
        };
        let fv = banged.free_vars();
        let mut unknown = false;
        for (taken, rest) in env.splits(&fv) {
            let d = match self.sum(&taken, banged, beta) {
                Derivability::No => continue,
                Derivability::Unknown => None,
                Derivability::Yes(d) => Some(d),
            };
            match (d, self.banged_copies(&rest, banged, rest_w)) {
                (_, Found::No) => {}
                (Some(d), Found::Yes(mut ds)) => {
                    ds.insert(0, d);
                    return Found::Yes(ds);
                }
                _ => unknown = true,
            }
        }
        if unknown {
            Found::Unknown
        } else {
            Found::No
        }
    }

    /// `M B` with a non-variable head: the bag type is guessed from the
    /// universe. A failed guess is never conclusive.
    fn guessed_app(&mut self, env: &Env, m: &Term, target: &Elem) -> Derivability {
        let Term::App(f, bag) = m else { unreachable!("applications only") };
        let lo = bag.linear().len();
        let hi = self.universe.width;
        if lo > hi || multiset_count(self.universe.len(), lo, hi) > GUESS_CAP {
            return Derivability::Unknown;
        }
        let universe = self.universe;
        let guesses = self
            .guesses
            .entry((lo, hi))
            .or_insert_with(|| multisets(universe.elems(), lo, hi))
            .clone();
        let fv_bag = bag.free_vars();
        for w in guesses {
            let fun_target = Elem::cons(w.clone(), target.clone());
            if !self.universe.contains(&fun_target) {
                continue;
            }
            for (taken, rest) in env.splits(&fv_bag) {
                let Found::Yes(mut ds) = self.bag(&taken, bag, &w) else { continue };
                if let Derivability::Yes(d) = self.term(&rest, f, &fun_target) {
                    ds.insert(0, d);
                    return Derivability::Yes(Derivation::node("app", env, m.to_string(), Some(target), ds));
                }
            }
            if self.fuel == 0 {
                break;
            }
        }
        Derivability::Unknown
    }

    fn test_rules(&mut self, env: &Env, q: &Test) -> Derivability {
        let done = |rule, premises| Derivability::Yes(Derivation::node(rule, env, q.to_string(), None, premises));
        match q {
            Test::Eps => {
                if env.is_empty() {
                    done("eps", vec![])
                } else {
                    Derivability::No
                }
            }
            Test::Tau(m) => match self.term(env, m, &Elem::Star) {
                Derivability::Yes(d) => done("tau", vec![d]),
                other => other,
            },
            Test::Par(l, r) => {
                let mut unknown = false;
                for (taken, rest) in env.splits(&l.free_vars()) {
                    let dl = match self.test(&taken, l) {
                        Derivability::No => continue,
                        Derivability::Unknown => None,
                        Derivability::Yes(d) => Some(d),
                    };
                    match (dl, self.test(&rest, r)) {
                        (_, Derivability::No) => {}
                        (Some(dl), Derivability::Yes(dr)) => return done("par", vec![dl, dr]),
                        _ => unknown = true,
                    }
                }
                if unknown {
                    Derivability::Unknown
                } else {
                    Derivability::No
                }
            }
        }
    }
}

/// An environment entry for a variable that the subject does not use.
fn unused_resources<T: Node>(env: &Env, subject: &T) -> bool {
    let fv = subject.free_vars();
    env.vars().any(|x| !fv.contains(x))
}

/// One-shot derivability of `env ⊢ subject : target` (no target for tests).
pub fn derivable(env: &Env, subject: &Expr, target: Option<&Elem>, universe: &Universe, fuel: usize) -> Derivability {
    let mut s = Search::new(universe, fuel);
    match (subject, target) {
        (Expr::Term(m), Some(t)) => s.term(env, m, t),
        (Expr::Test(q), None) => s.test(env, q),
        _ => Derivability::No,
    }
}

/// Bounded interpretation of a term.
#[derive(Clone, Debug, Default)]
pub struct Interpretation {
    /// Environment (one multiset per listed variable) and element.
    pub members: BTreeSet<(Vec<Vec<Elem>>, Elem)>,
    pub unknown: BTreeSet<(Vec<Vec<Elem>>, Elem)>,
}

impl Interpretation {
    pub fn to_sexp_with(&self, vars: &[Name]) -> Sexp {
        let row = |(env, e): &(Vec<Vec<Elem>>, Elem)| {
            Sexp::list(
                vars.iter()
                    .zip(env)
                    .map(|(x, ms)| Sexp::str(format!("{x}:{}", render_multiset(ms))))
                    .chain([Sexp::str(e.to_string())]),
            )
        };
        Sexp::tagged(
            "interp",
            [
                Sexp::field("members", Sexp::list(self.members.iter().map(row))),
                Sexp::field("unknown", Sexp::list(self.unknown.iter().map(row))),
            ],
        )
    }
}

/// All `(ā, α)` over the universe with `x̄ : ā ⊢ m : α`, each multiset of
/// `ā` drawn from universe elements up to the universe width.
pub fn interp(m: &FormalSum<Term>, vars: &[Name], universe: &Universe, fuel: usize) -> Interpretation {
    let envs = if vars.is_empty() {
        vec![]
    } else {
        multisets(universe.elems(), 0, universe.width)
    };
    let mut tuples: Vec<Vec<Vec<Elem>>> = vec![vec![]];
    for _ in vars {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                envs.iter().map(move |ms| {
                    let mut t = t.clone();
                    t.push(ms.clone());
                    t
                })
            })
            .collect();
    }
    let mut search = Search::new(universe, fuel);
    let mut out = Interpretation::default();
    for tuple in tuples {
        let env = vars
            .iter()
            .zip(&tuple)
            .fold(Env::empty(), |acc, (x, ms)| acc.sum(&Env::single(x.clone(), ms.clone())));
        for e in universe.elems() {
            match search.sum(&env, m, e) {
                Derivability::Yes(_) => {
                    out.members.insert((tuple.clone(), e.clone()));
                }
                Derivability::Unknown => {
                    out.unknown.insert((tuple.clone(), e.clone()));
                }
                Derivability::No => {}
            }
        }
    }
    out
}

/// `A` is handled through its unfoldings `B₁ + ⋯ + B_bound`; every other
/// term stands for itself.
pub fn semantic_approximation(m: &Term, unfold_bound: usize) -> FormalSum<Term> {
    if alpha_eq(m, &term_a()) {
        (1..=unfold_bound.max(1))
            .map(|n| term_b_n(n).expect("n is at least one"))
            .collect()
    } else {
        FormalSum::single(m.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    InLeftNotRight,
    InRightNotLeft,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::InLeftNotRight => "in-left-not-in-right",
            Side::InRightNotLeft => "in-right-not-in-left",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Separation {
    pub elem: Elem,
    pub side: Side,
    pub derivation: Derivation,
}

/// An element derivable for one closed term and refuted for the other.
/// Both directions are searched, left-not-right first; refutations
/// contaminated by an unknown verdict are skipped.
pub fn separating_element(
    m: &Term,
    n: &Term,
    universe: &Universe,
    fuel: usize,
    unfold_bound: usize,
) -> Option<Separation> {
    let left = semantic_approximation(m, unfold_bound);
    let right = semantic_approximation(n, unfold_bound);
    let mut search = Search::new(universe, fuel);
    for (a, b, side) in [
        (&left, &right, Side::InLeftNotRight),
        (&right, &left, Side::InRightNotLeft),
    ] {
        for e in universe.elems() {
            let Derivability::Yes(d) = search.sum(&Env::empty(), a, e) else {
                continue;
            };
            if search.sum(&Env::empty(), b, e) == Derivability::No {
                return Some(Separation {
                    elem: e.clone(),
                    side,
                    derivation: d,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::identity;
    use crate::syntax::{parse_term, parse_test};

    fn e(s: &str) -> Elem {
        Elem::parse(s).unwrap()
    }

    fn term_at(m: &str, target: &str, u: &Universe) -> Derivability {
        derivable(&Env::empty(), &Expr::Term(parse_term(m).unwrap()), Some(&e(target)), u, 10_000)
    }

    #[test]
    fn identity_derivations() {
        let u = Universe::enumerate(2, 2);
        let d = term_at("\\x. x", "[*]::*", &u);
        let Derivability::Yes(d) = d else { panic!("{d:?}") };
        assert_eq!(d.rule, "abs");
        assert_eq!(d.premises[0].rule, "var");
        assert_eq!(term_at("\\x. x", "*", &u), Derivability::No);
        assert_eq!(term_at("\\x. x", "[*,*]::*", &u), Derivability::No);
    }

    #[test]
    fn test_axioms() {
        let u = Universe::enumerate(1, 1);
        let eps = Expr::Test(parse_test("eps").unwrap());
        assert!(derivable(&Env::empty(), &eps, None, &u, 10).is_yes());
        let tbar = Expr::Term(parse_term("tbar(eps)").unwrap());
        assert!(derivable(&Env::empty(), &tbar, Some(&Elem::Star), &u, 10).is_yes());
        assert_eq!(
            derivable(&Env::empty(), &tbar, Some(&e("[*]::*")), &u, 10),
            Derivability::No
        );
    }

    #[test]
    fn variable_axiom_needs_exactly_one_copy() {
        let u = Universe::enumerate(1, 1);
        let x = Name::new("x");
        let m = Expr::Term(Term::var("x"));
        let one = Env::single(x.clone(), vec![Elem::Star]);
        let two = Env::single(x.clone(), vec![Elem::Star, Elem::Star]);
        assert!(derivable(&one, &m, Some(&Elem::Star), &u, 10).is_yes());
        assert_eq!(derivable(&two, &m, Some(&Elem::Star), &u, 10), Derivability::No);
        assert_eq!(derivable(&Env::empty(), &m, Some(&Elem::Star), &u, 10), Derivability::No);
    }

    #[test]
    fn bags_count_resources() {
        let u = Universe::enumerate(2, 2);
        // λf y. f [y; y!] at [[*,*]::*]::[*,*]::*: one copy linear, one banged
        assert!(term_at("\\f. \\y. f [y; y!]", "[[*,*]::*]::[*,*]::*", &u).is_yes());
        // the linear slot cannot be left empty
        assert_eq!(term_at("\\f. \\y. f [y; y!]", "[[]::*]::*", &u), Derivability::No);
        // zero copies of the banged part
        assert!(term_at("\\f. \\y. f [y!]", "[*]::*", &u).is_yes());
    }

    #[test]
    fn redex_uses_guessed_bag_types() {
        let u = Universe::enumerate(2, 2);
        assert!(term_at("(\\x. x) [\\y. y!]", "[*]::*", &u).is_yes());
        assert_eq!(term_at("(\\x. x) [\\y. y!]", "*", &u), Derivability::Unknown);
    }

    #[test]
    fn empty_sum_has_no_elements() {
        let u = Universe::enumerate(2, 1);
        let i = interp(&FormalSum::zero(), &[], &u, 1000);
        assert!(i.members.is_empty() && i.unknown.is_empty());
    }

    #[test]
    fn interpretation_of_a_variable() {
        let u = Universe::enumerate(1, 1);
        let x = Name::new("x");
        let i = interp(&FormalSum::single(Term::var("x")), &[x], &u, 1000);
        let expected: BTreeSet<(Vec<Vec<Elem>>, Elem)> =
            u.elems().iter().map(|a| (vec![vec![a.clone()]], a.clone())).collect();
        assert_eq!(i.members, expected);
    }

    #[test]
    fn separation_of_identity_and_a() {
        let u = Universe::enumerate(2, 2);
        let s = separating_element(&identity(), &term_a(), &u, 100_000, 3).unwrap();
        assert_eq!(s.elem, e("[*]::*"));
        assert_eq!(s.side, Side::InLeftNotRight);
        let s = separating_element(&term_a(), &identity(), &u, 100_000, 3).unwrap();
        assert_eq!(s.side, Side::InLeftNotRight);
        assert_eq!(s.elem.uncons().0, vec![]);
        assert!(separating_element(&identity(), &identity(), &u, 100_000, 3).is_none());
    }
}
