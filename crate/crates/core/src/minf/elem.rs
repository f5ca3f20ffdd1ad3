//! Elements of M∞, bounded universes of them, and typing environments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::Name;

/// `*` (the list of empty multisets) or `a::α`. `[]::*` is `*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Star,
    Cons(Vec<Elem>, Box<Elem>),
}

impl Elem {
    /// Canonical `a::α`: the head is sorted and `[]::*` collapses to `*`.
    pub fn cons(mut head: Vec<Elem>, tail: Elem) -> Elem {
        if head.is_empty() && tail == Elem::Star {
            return Elem::Star;
        }
        head.sort();
        Elem::Cons(head, Box::new(tail))
    }

    /// `(a, α)` with `self = a::α`; `*` splits as `([], *)`.
    pub fn uncons(&self) -> (Vec<Elem>, Elem) {
        match self {
            Elem::Star => (Vec::new(), Elem::Star),
            Elem::Cons(head, tail) => (head.clone(), (**tail).clone()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Elem::Star => 0,
            Elem::Cons(head, tail) => {
                1 + head
                    .iter()
                    .map(Elem::depth)
                    .chain([tail.depth()])
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Largest multiset anywhere inside.
    pub fn width(&self) -> usize {
        match self {
            Elem::Star => 0,
            Elem::Cons(head, tail) => head
                .iter()
                .map(Elem::width)
                .chain([head.len(), tail.width()])
                .max()
                .unwrap_or(0),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            Elem::Star => true,
            Elem::Cons(head, tail) => {
                !(head.is_empty() && **tail == Elem::Star)
                    && head.windows(2).all(|w| w[0] <= w[1])
                    && head.iter().all(Elem::is_canonical)
                    && tail.is_canonical()
            }
        }
    }

    /// Parses `*` and `[a, b]::tail`.
    pub fn parse(text: &str) -> Result<Elem, ElemParseError> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let e = parse_elem(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(ElemParseError(format!("trailing input at {pos}")));
        }
        Ok(e)
    }
}

/// `app`: the head and tail of an element.
pub fn app_elem(e: &Elem) -> (Vec<Elem>, Elem) {
    e.uncons()
}

/// `abs`: builds `a::α`.
pub fn abs_elem(head: Vec<Elem>, tail: Elem) -> Elem {
    Elem::cons(head, tail)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad element: {0}")]
pub struct ElemParseError(String);

fn parse_elem(s: &[char], pos: &mut usize) -> Result<Elem, ElemParseError> {
    match s.get(*pos) {
        Some('*') => {
            *pos += 1;
            Ok(Elem::Star)
        }
        Some('[') => {
            *pos += 1;
            let mut head = Vec::new();
            if s.get(*pos) != Some(&']') {
                loop {
                    head.push(parse_elem(s, pos)?);
                    match s.get(*pos) {
                        Some(',') => *pos += 1,
                        Some(']') => break,
                        _ => return Err(ElemParseError(format!("expected `,` or `]` at {pos}"))),
                    }
                }
            }
            *pos += 1;
            if s.get(*pos..*pos + 2) != Some(&[':', ':']) {
                return Err(ElemParseError(format!("expected `::` at {pos}")));
            }
            *pos += 2;
            let tail = parse_elem(s, pos)?;
            Ok(Elem::cons(head, tail))
        }
        _ => Err(ElemParseError(format!("expected `*` or `[` at {pos}"))),
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Star => f.write_str("*"),
            Elem::Cons(head, tail) => {
                f.write_str("[")?;
                for (i, e) in head.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]::{tail}")
            }
        }
    }
}

/// All sorted multisets of size `lo..=hi` over `items` (assumed sorted and
/// duplicate-free).
pub fn multisets<T: Clone>(items: &[T], lo: usize, hi: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], start: usize, left: usize, cur: &mut Vec<T>, lo: usize, out: &mut Vec<Vec<T>>) {
        if cur.len() >= lo {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, i, left - 1, cur, lo, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, 0, hi, &mut Vec::new(), lo, &mut out);
    out
}

/// Number of multisets of size `lo..=hi` over `n` items.
pub fn multiset_count(n: usize, lo: usize, hi: usize) -> u128 {
    (lo..=hi)
        .map(|s| {
            // C(n + s - 1, s)
            let mut c: u128 = 1;
            for k in 0..s as u128 {
                c = c * (n as u128 + k) / (k + 1);
            }
            if n == 0 && s > 0 {
                0
            } else {
                c
            }
        })
        .sum()
}

/// Every canonical element of depth at most `depth` whose multisets have at
/// most `width` members.
#[derive(Clone, Debug)]
pub struct Universe {
    pub depth: usize,
    pub width: usize,
    elems: Vec<Elem>,
    set: BTreeSet<Elem>,
}

impl Universe {
    pub fn enumerate(depth: usize, width: usize) -> Universe {
        let mut level = vec![Elem::Star];
        for _ in 0..depth {
            let heads = multisets(&level, 0, width);
            let mut next = BTreeSet::new();
            for h in &heads {
                for t in &level {
                    next.insert(Elem::cons(h.clone(), t.clone()));
                }
            }
            level = next.into_iter().collect();
        }
        let mut elems = level;
        elems.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.cmp(b)));
        let set = elems.iter().cloned().collect();
        Universe {
            depth,
            width,
            elems,
            set,
        }
    }

    /// Elements ordered by depth, then structurally.
    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.set.contains(e)
    }
}

/// Variable assignment to finite multisets; absent means empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Env(BTreeMap<Name, Vec<Elem>>);

impl Env {
    pub fn empty() -> Env {
        Env::default()
    }

    pub fn single(x: Name, mut ms: Vec<Elem>) -> Env {
        let mut m = BTreeMap::new();
        if !ms.is_empty() {
            ms.sort();
            m.insert(x, ms);
        }
        Env(m)
    }

    pub fn get(&self, x: &Name) -> &[Elem] {
        self.0.get(x).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Vec<Elem>)> {
        self.0.iter()
    }

    /// Pointwise multiset union.
    pub fn sum(&self, other: &Env) -> Env {
        let mut out = self.0.clone();
        for (x, ms) in &other.0 {
            let e = out.entry(x.clone()).or_default();
            e.extend(ms.iter().cloned());
            e.sort();
        }
        Env(out)
    }

    /// Removes one occurrence of `e` from `x`'s multiset.
    pub fn remove_one(&self, x: &Name, e: &Elem) -> Option<Env> {
        let mut out = self.0.clone();
        let ms = out.get_mut(x)?;
        let i = ms.iter().position(|y| y == e)?;
        ms.remove(i);
        if ms.is_empty() {
            out.remove(x);
        }
        Some(Env(out))
    }

    pub fn without(&self, x: &Name) -> Env {
        let mut out = self.0.clone();
        out.remove(x);
        Env(out)
    }

    /// Every way to take a sub-environment using only `allowed` variables,
    /// paired with what is left.
    pub fn splits(&self, allowed: &BTreeSet<Name>) -> Vec<(Env, Env)> {
        let mut out = vec![(Env::empty(), Env::empty())];
        for (x, ms) in &self.0 {
            let groups = group(ms);
            let choices: Vec<(Vec<Elem>, Vec<Elem>)> = if allowed.contains(x) {
                sub_multisets(&groups)
            } else {
                vec![(Vec::new(), ms.clone())]
            };
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for (taken, rest) in &out {
                for (t, r) in &choices {
                    let mut taken = taken.clone();
                    let mut rest = rest.clone();
                    if !t.is_empty() {
                        taken.0.insert(x.clone(), t.clone());
                    }
                    if !r.is_empty() {
                        rest.0.insert(x.clone(), r.clone());
                    }
                    next.push((taken, rest));
                }
            }
            out = next;
        }
        out
    }

    /// Compact rendering, e.g. `{x:[*], y:[[*]::*,*]}`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(x, ms)| format!("{x}:{}", render_multiset(ms)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

pub fn render_multiset(ms: &[Elem]) -> String {
    let items: Vec<String> = ms.iter().map(Elem::to_string).collect();
    format!("[{}]", items.join(","))
}

fn group(ms: &[Elem]) -> Vec<(Elem, usize)> {
    let mut out: Vec<(Elem, usize)> = Vec::new();
    for e in ms {
        match out.last_mut() {
            Some((last, n)) if last == e => *n += 1,
            _ => out.push((e.clone(), 1)),
        }
    }
    out
}

fn sub_multisets(groups: &[(Elem, usize)]) -> Vec<(Vec<Elem>, Vec<Elem>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for (e, n) in groups {
        let mut next = Vec::new();
        for (t, r) in &out {
            for k in 0..=*n {
                let mut t: Vec<Elem> = t.clone();
                let mut r: Vec<Elem> = r.clone();
                t.extend(std::iter::repeat_n(e.clone(), k));
                r.extend(std::iter::repeat_n(e.clone(), n - k));
                next.push((t, r));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Elem {
        Elem::parse(s).unwrap()
    }

    #[test]
    fn universe_sizes() {
        assert_eq!(Universe::enumerate(0, 3).elems(), &[Elem::Star]);
        assert_eq!(Universe::enumerate(1, 1).elems(), &[Elem::Star, e("[*]::*")]);
        assert_eq!(Universe::enumerate(1, 2).len(), 3);
        assert_eq!(Universe::enumerate(2, 2).len(), 30);
    }

    #[test]
    fn universe_is_monotone_and_canonical() {
        let small = Universe::enumerate(2, 2);
        let big = Universe::enumerate(3, 2);
        assert_eq!(big.len(), 14880);
        assert!(small.elems().iter().all(|x| big.contains(x)));
        assert!(big.elems().iter().all(Elem::is_canonical));
        assert!(big.elems().iter().all(|x| x.depth() <= 3 && x.width() <= 2));
    }

    #[test]
    fn empty_head_over_star_is_star() {
        assert_eq!(Elem::cons(vec![], Elem::Star), Elem::Star);
        assert_eq!(e("[]::*"), Elem::Star);
        assert_eq!(app_elem(&Elem::Star), (vec![], Elem::Star));
        assert_eq!(abs_elem(vec![Elem::Star], Elem::Star), e("[*]::*"));
    }

    #[test]
    fn retraction_on_a_universe() {
        for x in Universe::enumerate(3, 2).elems() {
            let (a, t) = app_elem(x);
            assert_eq!(&abs_elem(a, t), x);
        }
    }

    #[test]
    fn text_format() {
        for s in ["*", "[*]::*", "[]::[*]::*", "[*,[*]::*]::[*,*]::*"] {
            assert_eq!(e(s).to_string(), s);
        }
        assert_eq!(e("[ [*]::* , * ]::*").to_string(), "[*,[*]::*]::*");
        assert!(Elem::parse("[*]").is_err());
        assert!(Elem::parse("**").is_err());
    }

    #[test]
    fn multiset_counting() {
        let items = [1, 2, 3];
        assert_eq!(multisets(&items, 0, 2).len(), 10);
        assert_eq!(multiset_count(3, 0, 2), 10);
        assert_eq!(multiset_count(30, 0, 2), 496);
        assert_eq!(multisets(&items, 2, 2).len(), 6);
    }

    #[test]
    fn env_splits_cover_all_sub_multisets() {
        let x = Name::new("x");
        let y = Name::new("y");
        let env = Env::single(x.clone(), vec![Elem::Star, Elem::Star, e("[*]::*")])
            .sum(&Env::single(y.clone(), vec![Elem::Star]));
        let allowed: BTreeSet<Name> = [x.clone()].into();
        let splits = env.splits(&allowed);
        // x: 3 choices for the stars times 2 for the other element
        assert_eq!(splits.len(), 6);
        for (t, r) in &splits {
            assert_eq!(t.sum(r), env);
            assert!(t.get(&y).is_empty());
        }
    }
}
