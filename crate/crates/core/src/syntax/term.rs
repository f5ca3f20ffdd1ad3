use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Variable identifier. Cheap to clone and shareable across threads.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sum-free term of the resource calculus with tests.
#[derive(Clone, Debug)]
pub enum Term {
    Var(Name),
    Abs(Name, Box<Term>),
    App(Box<Term>, Box<Bag>),
    TauBar(Box<Test>),
}

/// Argument of an application: a multiset of linear terms and one banged slot.
///
/// The banged slot holds a formal sum, since sums under a bang are not
/// distributed. The linear components are kept sorted by canonical key so
/// that equal multisets have equal representations.
#[derive(Clone, Debug)]
pub struct Bag {
    linear: Vec<Term>,
    banged: FormalSum<Term>,
}

/// Sum-free test.
#[derive(Clone, Debug)]
pub enum Test {
    Eps,
    Par(Box<Test>, Box<Test>),
    Tau(Box<Term>),
}

/// Finite multiset of sum-free expressions; the empty sum is `0`.
///
/// Summands are stored sorted by canonical key, so two sums that are equal
/// as multisets up to alpha-equivalence have summands in the same order.
#[derive(Clone, Debug)]
pub struct FormalSum<T> {
    items: Vec<T>,
}

/// Operations shared by every syntactic category.
pub trait Node: Clone {
    /// Appends a nameless rendering: bound variables become de Bruijn
    /// indices relative to `scope`, and multiset parts are sorted.
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String);

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>);

    /// Every name occurring in the expression, bound or free.
    fn collect_names(&self, out: &mut BTreeSet<Name>);

    fn size(&self) -> usize;

    fn key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

/// Alpha-equivalence; multiset parts compare as multisets.
pub fn alpha_eq<T: Node>(a: &T, b: &T) -> bool {
    a.key() == b.key()
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Name::new(name))
    }

    pub fn abs(binder: impl Into<Name>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    /// Nested abstraction `\x1. \x2. ... body`.
    pub fn abs_many<'a>(binders: impl IntoIterator<Item = &'a str>, body: Term) -> Term {
        let binders: Vec<&str> = binders.into_iter().collect();
        binders
            .into_iter()
            .rev()
            .fold(body, |acc, x| Term::abs(x, acc))
    }

    pub fn app(fun: Term, bag: Bag) -> Term {
        Term::App(Box::new(fun), Box::new(bag))
    }

    /// `fun [a1!] [a2!] ...`
    pub fn app_banged(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter()
            .fold(fun, |acc, a| Term::app(acc, Bag::banged(a)))
    }

    pub fn tau_bar(test: Test) -> Term {
        Term::TauBar(Box::new(test))
    }

    /// Splits `\x1...xn. body` into its binders and body.
    pub fn strip_abs(&self) -> (Vec<&Name>, &Term) {
        let mut binders = Vec::new();
        let mut cur = self;
        while let Term::Abs(x, body) = cur {
            binders.push(x);
            cur = body;
        }
        (binders, cur)
    }

    /// Splits `h B1 ... Bk` into its head and bags, left to right.
    pub fn spine(&self) -> (&Term, Vec<&Bag>) {
        let mut bags = Vec::new();
        let mut cur = self;
        while let Term::App(f, b) = cur {
            bags.push(&**b);
            cur = f;
        }
        bags.reverse();
        (cur, bags)
    }
}

impl Bag {
    pub fn new(linear: Vec<Term>, banged: FormalSum<Term>) -> Bag {
        let mut linear = linear;
        linear.sort_by_cached_key(|t| t.key());
        Bag { linear, banged }
    }

    /// `[t!]`
    pub fn banged(t: Term) -> Bag {
        Bag::new(Vec::new(), FormalSum::single(t))
    }

    pub fn linear(&self) -> &[Term] {
        &self.linear
    }

    pub fn banged_sum(&self) -> &FormalSum<Term> {
        &self.banged
    }

    pub fn into_parts(self) -> (Vec<Term>, FormalSum<Term>) {
        (self.linear, self.banged)
    }
}

impl Test {
    pub fn par(l: Test, r: Test) -> Test {
        Test::Par(Box::new(l), Box::new(r))
    }

    pub fn tau(t: Term) -> Test {
        Test::Tau(Box::new(t))
    }
}

impl<T: Node> FormalSum<T> {
    pub fn zero() -> Self {
        FormalSum { items: Vec::new() }
    }

    pub fn single(t: T) -> Self {
        FormalSum { items: vec![t] }
    }

    pub fn from_vec(mut items: Vec<T>) -> Self {
        if items.len() > 1 {
            items.sort_by_cached_key(|t| t.key());
        }
        FormalSum { items }
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn into_items(self) -> Vec<T> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_zero(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.items.iter()
    }

    pub fn map<U: Node>(self, f: impl FnMut(T) -> U) -> FormalSum<U> {
        FormalSum::from_vec(self.items.into_iter().map(f).collect())
    }

    pub fn plus(self, other: FormalSum<T>) -> Self {
        let mut items = self.items;
        items.extend(other.items);
        FormalSum::from_vec(items)
    }

    /// Summand-wise `f`, flattening the resulting sums.
    pub fn flat_map<U: Node>(self, mut f: impl FnMut(T) -> FormalSum<U>) -> FormalSum<U> {
        let mut out = Vec::new();
        for t in self.items {
            out.extend(f(t).items);
        }
        FormalSum::from_vec(out)
    }
}

impl<T: Node> FromIterator<T> for FormalSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        FormalSum::from_vec(iter.into_iter().collect())
    }
}

impl<T: Node> IntoIterator for FormalSum<T> {
    type Item = T;
    type IntoIter = std::vec::IntoIter<T>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

fn write_var(x: &Name, scope: &[Name], out: &mut String) {
    match scope.iter().rposition(|y| y == x) {
        Some(pos) => {
            out.push('#');
            out.push_str(&(scope.len() - 1 - pos).to_string());
        }
        None => {
            out.push('$');
            out.push_str(x.as_str());
        }
    }
}

impl Node for Term {
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String) {
        match self {
            Term::Var(x) => write_var(x, scope, out),
            Term::Abs(x, body) => {
                out.push_str("\\(");
                scope.push(x.clone());
                body.write_key(scope, out);
                scope.pop();
                out.push(')');
            }
            Term::App(f, bag) => {
                out.push_str("@(");
                f.write_key(scope, out);
                out.push(')');
                bag.write_key(scope, out);
            }
            Term::TauBar(q) => {
                out.push_str("T(");
                q.write_key(scope, out);
                out.push(')');
            }
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, bag) => {
                f.collect_free(bound, out);
                bag.collect_free(bound, out);
            }
            Term::TauBar(q) => q.collect_free(bound, out),
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Abs(x, body) => {
                out.insert(x.clone());
                body.collect_names(out);
            }
            Term::App(f, bag) => {
                f.collect_names(out);
                bag.collect_names(out);
            }
            Term::TauBar(q) => q.collect_names(out),
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, body) => 1 + body.size(),
            Term::App(f, bag) => 1 + f.size() + bag.size(),
            Term::TauBar(q) => 1 + q.size(),
        }
    }
}

impl Node for Bag {
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String) {
        // Sorting must happen in scope: the stored order uses context-free keys.
        let mut keys: Vec<String> = self
            .linear
            .iter()
            .map(|t| {
                let mut s = String::new();
                t.write_key(scope, &mut s);
                s
            })
            .collect();
        keys.sort();
        out.push('[');
        out.push_str(&keys.join(","));
        out.push(';');
        self.banged.write_key(scope, out);
        out.push(']');
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        for t in &self.linear {
            t.collect_free(bound, out);
        }
        self.banged.collect_free(bound, out);
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        for t in &self.linear {
            t.collect_names(out);
        }
        self.banged.collect_names(out);
    }

    fn size(&self) -> usize {
        1 + self.linear.iter().map(Node::size).sum::<usize>() + self.banged.size()
    }
}

impl Node for Test {
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String) {
        match self {
            Test::Eps => out.push('e'),
            Test::Par(l, r) => {
                out.push('(');
                l.write_key(scope, out);
                out.push('|');
                r.write_key(scope, out);
                out.push(')');
            }
            Test::Tau(m) => {
                out.push_str("t(");
                m.write_key(scope, out);
                out.push(')');
            }
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Test::Eps => {}
            Test::Par(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Test::Tau(m) => m.collect_free(bound, out),
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Test::Eps => {}
            Test::Par(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Test::Tau(m) => m.collect_names(out),
        }
    }

    fn size(&self) -> usize {
        match self {
            Test::Eps => 1,
            Test::Par(l, r) => 1 + l.size() + r.size(),
            Test::Tau(m) => 1 + m.size(),
        }
    }
}

impl<T: Node> Node for FormalSum<T> {
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String) {
        let mut keys: Vec<String> = self
            .items
            .iter()
            .map(|t| {
                let mut s = String::new();
                t.write_key(scope, &mut s);
                s
            })
            .collect();
        keys.sort();
        out.push('{');
        out.push_str(&keys.join("+"));
        out.push('}');
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        for t in &self.items {
            t.collect_free(bound, out);
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        for t in &self.items {
            t.collect_names(out);
        }
    }

    fn size(&self) -> usize {
        self.items.iter().map(Node::size).sum::<usize>().max(1)
    }
}

/// A sum-free expression of either sort.
#[derive(Clone, Debug)]
pub enum Expr {
    Term(Term),
    Test(Test),
}

impl Node for Expr {
    fn write_key(&self, scope: &mut Vec<Name>, out: &mut String) {
        match self {
            Expr::Term(t) => t.write_key(scope, out),
            Expr::Test(q) => q.write_key(scope, out),
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Term(t) => t.collect_free(bound, out),
            Expr::Test(q) => q.collect_free(bound, out),
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Term(t) => t.collect_names(out),
            Expr::Test(q) => q.collect_names(out),
        }
    }

    fn size(&self) -> usize {
        match self {
            Expr::Term(t) => t.size(),
            Expr::Test(q) => q.size(),
        }
    }
}

/// A canonical sum of either sort, as produced by normalizing a raw tree.
#[derive(Clone, Debug)]
pub enum Normal {
    Terms(FormalSum<Term>),
    Tests(FormalSum<Test>),
}

impl Normal {
    pub fn len(&self) -> usize {
        match self {
            Normal::Terms(s) => s.len(),
            Normal::Tests(s) => s.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn key(&self) -> String {
        match self {
            Normal::Terms(s) => s.key(),
            Normal::Tests(s) => s.key(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            Normal::Terms(s) => s.free_vars(),
            Normal::Tests(s) => s.free_vars(),
        }
    }
}
