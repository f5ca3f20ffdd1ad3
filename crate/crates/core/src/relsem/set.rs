use std::collections::BTreeSet;
use std::fmt;

use crate::minf::{multiset_count, multisets};

/// Element of a finite set: symbols, the unit, pairs, tagged values of a
/// disjoint union, and finite multisets (kept sorted).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(String),
    Unit,
    Pair(Box<Atom>, Box<Atom>),
    Tagged(u8, Box<Atom>),
    Multiset(Vec<Atom>),
}

impl Atom {
    pub fn sym(s: &str) -> Atom {
        Atom::Sym(s.to_string())
    }

    pub fn pair(a: Atom, b: Atom) -> Atom {
        Atom::Pair(Box::new(a), Box::new(b))
    }

    pub fn tagged(tag: u8, a: Atom) -> Atom {
        Atom::Tagged(tag, Box::new(a))
    }

    pub fn multiset(mut items: Vec<Atom>) -> Atom {
        items.sort();
        Atom::Multiset(items)
    }

    pub fn empty_multiset() -> Atom {
        Atom::Multiset(Vec::new())
    }

    pub fn as_multiset(&self) -> Option<&[Atom]> {
        match self {
            Atom::Multiset(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Atom, &Atom)> {
        match self {
            Atom::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

/// Multiset union.
pub fn union(a: &[Atom], b: &[Atom]) -> Atom {
    Atom::multiset(a.iter().chain(b).cloned().collect())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sym(s) => f.write_str(s),
            Atom::Unit => f.write_str("*"),
            Atom::Pair(a, b) => write!(f, "({a},{b})"),
            Atom::Tagged(t, a) => write!(f, "{t}:{a}"),
            Atom::Multiset(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A finite set, described by how it was built. `Bang(A, k)` holds the
/// multisets over `A` with at most `k` members.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FinSet {
    Explicit(BTreeSet<Atom>),
    Unit,
    Tensor(Box<FinSet>, Box<FinSet>),
    /// Disjoint union `{(1,a)} ∪ {(2,b)}`, the carrier of both `&` and `⊕`.
    With(Box<FinSet>, Box<FinSet>),
    Bang(Box<FinSet>, usize),
}

/// Largest set materialized for an extensional comparison.
const MATERIALIZE_CAP: u128 = 200_000;

impl FinSet {
    pub fn of_symbols<'a>(names: impl IntoIterator<Item = &'a str>) -> FinSet {
        FinSet::Explicit(names.into_iter().map(Atom::sym).collect())
    }

    /// `{a, b, c, …}` with `n` symbols.
    pub fn standard(n: usize) -> FinSet {
        FinSet::Explicit((0..n).map(|i| Atom::Sym(symbol(i))).collect())
    }

    pub fn tensor(a: &FinSet, b: &FinSet) -> FinSet {
        FinSet::Tensor(Box::new(a.clone()), Box::new(b.clone()))
    }

    pub fn with(a: &FinSet, b: &FinSet) -> FinSet {
        FinSet::With(Box::new(a.clone()), Box::new(b.clone()))
    }

    pub fn bang(a: &FinSet, k: usize) -> FinSet {
        FinSet::Bang(Box::new(a.clone()), k)
    }

    pub fn contains(&self, x: &Atom) -> bool {
        match (self, x) {
            (FinSet::Explicit(s), _) => s.contains(x),
            (FinSet::Unit, Atom::Unit) => true,
            (FinSet::Tensor(a, b), Atom::Pair(x, y)) => a.contains(x) && b.contains(y),
            (FinSet::With(a, _), Atom::Tagged(1, x)) => a.contains(x),
            (FinSet::With(_, b), Atom::Tagged(2, y)) => b.contains(y),
            (FinSet::Bang(a, k), Atom::Multiset(items)) => {
                items.len() <= *k && items.windows(2).all(|w| w[0] <= w[1]) && items.iter().all(|i| a.contains(i))
            }
            _ => false,
        }
    }

    pub fn len(&self) -> u128 {
        match self {
            FinSet::Explicit(s) => s.len() as u128,
            FinSet::Unit => 1,
            FinSet::Tensor(a, b) => a.len() * b.len(),
            FinSet::With(a, b) => a.len() + b.len(),
            FinSet::Bang(a, k) => multiset_count(a.len() as usize, 0, *k),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every element, sorted.
    pub fn elements(&self) -> Vec<Atom> {
        let mut out = match self {
            FinSet::Explicit(s) => s.iter().cloned().collect(),
            FinSet::Unit => vec![Atom::Unit],
            FinSet::Tensor(a, b) => {
                let bs = b.elements();
                a.elements()
                    .into_iter()
                    .flat_map(|x| bs.iter().map(move |y| Atom::pair(x.clone(), y.clone())))
                    .collect()
            }
            FinSet::With(a, b) => a
                .elements()
                .into_iter()
                .map(|x| Atom::tagged(1, x))
                .chain(b.elements().into_iter().map(|y| Atom::tagged(2, y)))
                .collect(),
            FinSet::Bang(a, k) => multisets(&a.elements(), 0, *k)
                .into_iter()
                .map(Atom::multiset)
                .collect(),
        };
        out.sort();
        out
    }

    /// Equality as sets. Structurally different descriptions are compared
    /// element by element when they are small enough.
    pub fn same_as(&self, other: &FinSet) -> bool {
        if self == other {
            return true;
        }
        self.len() == other.len()
            && self.len() <= MATERIALIZE_CAP
            && self.elements() == other.elements()
    }
}

fn symbol(i: usize) -> String {
    let letters = "abcdefghijklmnopqrstuvwxyz".as_bytes();
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("s{i}")
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinSet::Explicit(s) => {
                f.write_str("{")?;
                for (i, a) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("}")
            }
            FinSet::Unit => f.write_str("1"),
            FinSet::Tensor(a, b) => write!(f, "({a} ⊗ {b})"),
            FinSet::With(a, b) => write!(f, "({a} & {b})"),
            FinSet::Bang(a, k) => write!(f, "!{k}{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bang_of_a_singleton() {
        let a = FinSet::of_symbols(["a"]);
        let got: Vec<String> = FinSet::bang(&a, 2).elements().iter().map(Atom::to_string).collect();
        assert_eq!(got, ["[]", "[a]", "[a,a]"]);
    }

    #[test]
    fn sizes_match_enumeration() {
        let a = FinSet::standard(3);
        let sets = [
            FinSet::bang(&a, 3),
            FinSet::tensor(&a, &FinSet::bang(&a, 2)),
            FinSet::with(&a, &FinSet::Unit),
            FinSet::bang(&FinSet::bang(&a, 2), 2),
        ];
        for s in &sets {
            let e = s.elements();
            assert_eq!(e.len() as u128, s.len(), "{s}");
            assert!(e.iter().all(|x| s.contains(x)));
            let dedup: BTreeSet<&Atom> = e.iter().collect();
            assert_eq!(dedup.len(), e.len());
        }
    }

    #[test]
    fn membership_rejects_oversized_and_unsorted() {
        let a = FinSet::standard(2);
        let b = FinSet::bang(&a, 2);
        assert!(!b.contains(&Atom::Multiset(vec![Atom::sym("a"); 3])));
        assert!(!b.contains(&Atom::Multiset(vec![Atom::sym("b"), Atom::sym("a")])));
        assert!(b.contains(&Atom::multiset(vec![Atom::sym("b"), Atom::sym("a")])));
    }

    #[test]
    fn extensional_equality() {
        let a = FinSet::standard(2);
        let explicit = FinSet::Explicit(FinSet::tensor(&a, &a).elements().into_iter().collect());
        assert!(explicit.same_as(&FinSet::tensor(&a, &a)));
        assert!(!explicit.same_as(&FinSet::with(&a, &a)));
    }
}
