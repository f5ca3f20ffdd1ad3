use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use super::set::{union, Atom, FinSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelError {
    #[error("cannot compose: {found} is not {expected}")]
    Mismatch { expected: String, found: String },
    #[error("{pair} is not in {source_set} × {target_set}")]
    OutOfCarrier {
        pair: String,
        source_set: String,
        target_set: String,
    },
    #[error("{0} is not of the form !A")]
    NotABang(String),
}

/// A relation between finite sets. `truncated` is set when pairs of the
/// untruncated relation were left out because one side exceeds a multiset
/// size cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinRel {
    pub source: FinSet,
    pub target: FinSet,
    pub pairs: BTreeSet<(Atom, Atom)>,
    pub truncated: bool,
}

impl FinRel {
    pub fn new(source: FinSet, target: FinSet, pairs: BTreeSet<(Atom, Atom)>) -> Result<FinRel, RelError> {
        if let Some((x, y)) = pairs.iter().find(|(x, y)| !source.contains(x) || !target.contains(y)) {
            return Err(RelError::OutOfCarrier {
                pair: format!("({x},{y})"),
                source_set: source.to_string(),
                target_set: target.to_string(),
            });
        }
        Ok(FinRel {
            source,
            target,
            pairs,
            truncated: false,
        })
    }

    fn build(source: FinSet, target: FinSet, pairs: impl IntoIterator<Item = (Atom, Atom)>, truncated: bool) -> FinRel {
        let pairs: BTreeSet<(Atom, Atom)> = pairs.into_iter().collect();
        debug_assert!(pairs.iter().all(|(x, y)| source.contains(x) && target.contains(y)));
        FinRel {
            source,
            target,
            pairs,
            truncated,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: &Atom, y: &Atom) -> bool {
        self.pairs.contains(&(x.clone(), y.clone()))
    }

    /// Targets related to each source.
    pub fn by_source(&self) -> BTreeMap<&Atom, Vec<&Atom>> {
        let mut m: BTreeMap<&Atom, Vec<&Atom>> = BTreeMap::new();
        for (x, y) in &self.pairs {
            m.entry(x).or_default().push(y);
        }
        m
    }

    /// Sources related to each target.
    pub fn by_target(&self) -> BTreeMap<&Atom, Vec<&Atom>> {
        let mut m: BTreeMap<&Atom, Vec<&Atom>> = BTreeMap::new();
        for (x, y) in &self.pairs {
            m.entry(y).or_default().push(x);
        }
        m
    }

    /// Union of relations with the same carriers (the sum of Rel).
    pub fn union(&self, other: &FinRel) -> Result<FinRel, RelError> {
        same(&self.source, &other.source)?;
        same(&self.target, &other.target)?;
        Ok(FinRel::build(
            self.source.clone(),
            self.target.clone(),
            self.pairs.union(&other.pairs).cloned(),
            self.truncated || other.truncated,
        ))
    }

    /// Each pair of `source × target` independently with probability `density`.
    pub fn random(source: &FinSet, target: &FinSet, density: f64, rng: &mut impl Rng) -> FinRel {
        let ys = target.elements();
        let mut pairs = BTreeSet::new();
        for x in source.elements() {
            for y in &ys {
                if rng.gen_bool(density) {
                    pairs.insert((x.clone(), y.clone()));
                }
            }
        }
        FinRel::build(source.clone(), target.clone(), pairs, false)
    }
}

impl fmt::Display for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "}}")
    }
}

fn same(expected: &FinSet, found: &FinSet) -> Result<(), RelError> {
    if expected.same_as(found) {
        Ok(())
    } else {
        Err(RelError::Mismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

fn bang_parts(s: &FinSet) -> Result<(&FinSet, usize), RelError> {
    match s {
        FinSet::Bang(a, k) => Ok((a, *k)),
        other => Err(RelError::NotABang(other.to_string())),
    }
}

/// `f ∘ g`: first `g`, then `f`.
pub fn compose(f: &FinRel, g: &FinRel) -> Result<FinRel, RelError> {
    same(&g.target, &f.source)?;
    let next = f.by_source();
    let mut pairs = BTreeSet::new();
    for (x, y) in &g.pairs {
        for z in next.get(y).into_iter().flatten() {
            pairs.insert((x.clone(), (*z).clone()));
        }
    }
    Ok(FinRel::build(g.source.clone(), f.target.clone(), pairs, f.truncated || g.truncated))
}

pub fn tensor(f: &FinRel, g: &FinRel) -> FinRel {
    let mut pairs = BTreeSet::new();
    for (u, v) in &f.pairs {
        for (x, y) in &g.pairs {
            pairs.insert((Atom::pair(u.clone(), x.clone()), Atom::pair(v.clone(), y.clone())));
        }
    }
    FinRel::build(
        FinSet::tensor(&f.source, &g.source),
        FinSet::tensor(&f.target, &g.target),
        pairs,
        f.truncated || g.truncated,
    )
}

pub fn identity(a: &FinSet) -> FinRel {
    FinRel::build(a.clone(), a.clone(), a.elements().into_iter().map(|x| (x.clone(), x)), false)
}

/// Multisets of size at most `k` over `a`.
pub fn bang_obj(a: &FinSet, k: usize) -> FinSet {
    FinSet::bang(a, k)
}

/// Every `b` list with `(aᵢ, bᵢ) ∈ f`, as sorted multisets.
fn pointwise_images(m: &[Atom], next: &BTreeMap<&Atom, Vec<&Atom>>) -> BTreeSet<Atom> {
    let mut partial: BTreeSet<Vec<Atom>> = BTreeSet::from([vec![]]);
    for a in m {
        let Some(bs) = next.get(a) else {
            return BTreeSet::new();
        };
        partial = partial
            .into_iter()
            .flat_map(|p| {
                bs.iter().map(move |b| {
                    let mut q = p.clone();
                    q.push((*b).clone());
                    q.sort();
                    q
                })
            })
            .collect();
    }
    partial.into_iter().map(Atom::Multiset).collect()
}

/// `!f` restricted to the given source multisets.
pub(crate) fn bang_mor_over(f: &FinRel, k: usize, sources: &[Atom]) -> FinRel {
    let next = f.by_source();
    let mut pairs = BTreeSet::new();
    for m in sources {
        let items = m.as_multiset().expect("sources of !f are multisets");
        for img in pointwise_images(items, &next) {
            pairs.insert((m.clone(), img));
        }
    }
    FinRel::build(bang_obj(&f.source, k), bang_obj(&f.target, k), pairs, f.truncated)
}

/// `!f = {([a₁…aₖ], [b₁…bₖ]) | (aᵢ, bᵢ) ∈ f}` on multisets of size ≤ `k`.
pub fn bang_mor(f: &FinRel, k: usize) -> FinRel {
    bang_mor_over(f, k, &bang_obj(&f.source, k).elements())
}

/// `d = {([a], a)}`; also the identity of the coKleisli category.
pub fn dereliction(a: &FinSet, k: usize) -> FinRel {
    let pairs = if k == 0 {
        vec![]
    } else {
        a.elements().into_iter().map(|x| (Atom::multiset(vec![x.clone()]), x)).collect()
    };
    FinRel::build(bang_obj(a, k), a.clone(), pairs, k == 0 && !a.is_empty())
}

/// All ways of writing `m` as a union of `parts` multisets, as sorted lists
/// of multisets.
fn decompositions(m: &[Atom], parts: usize) -> BTreeSet<Vec<Atom>> {
    let mut out = BTreeSet::new();
    if parts == 0 {
        if m.is_empty() {
            out.insert(vec![]);
        }
        return out;
    }
    let total = parts.pow(m.len() as u32);
    for code in 0..total {
        let mut buckets = vec![Vec::new(); parts];
        let mut c = code;
        for a in m {
            buckets[c % parts].push(a.clone());
            c /= parts;
        }
        let mut ms: Vec<Atom> = buckets.into_iter().map(Atom::multiset).collect();
        ms.sort();
        out.insert(ms);
    }
    out
}

/// `p = {(m₁ ⊎ ⋯ ⊎ mⱼ, [m₁, …, mⱼ])}`, keeping `j ≤ k` and `|⊎mᵢ| ≤ k`.
pub fn digging(a: &FinSet, k: usize) -> FinRel {
    let source = bang_obj(a, k);
    let mut pairs = BTreeSet::new();
    for m in source.elements() {
        let items = m.as_multiset().expect("multiset").to_vec();
        for j in 0..=k {
            for parts in decompositions(&items, j) {
                pairs.insert((m.clone(), Atom::Multiset(parts)));
            }
        }
    }
    let truncated = k >= 2 && !a.is_empty();
    FinRel::build(source, bang_obj(&bang_obj(a, k), k), pairs, truncated)
}

/// `c = {(l ⊎ r, (l, r))}`
pub fn contraction(a: &FinSet, k: usize) -> FinRel {
    let bang = bang_obj(a, k);
    let (pairs, truncated) = split_pairs(&bang, k);
    FinRel::build(
        bang.clone(),
        FinSet::tensor(&bang, &bang),
        pairs.into_iter().map(|(lr, m)| (m, lr)),
        truncated,
    )
}

/// `c̄ = {((l, r), l ⊎ r)}`
pub fn cocontraction(a: &FinSet, k: usize) -> FinRel {
    let bang = bang_obj(a, k);
    let (pairs, truncated) = split_pairs(&bang, k);
    FinRel::build(FinSet::tensor(&bang, &bang), bang, pairs, truncated)
}

fn split_pairs(bang: &FinSet, k: usize) -> (Vec<(Atom, Atom)>, bool) {
    let ms = bang.elements();
    let mut out = Vec::new();
    let mut truncated = false;
    for l in &ms {
        for r in &ms {
            let (lm, rm) = (l.as_multiset().expect("multiset"), r.as_multiset().expect("multiset"));
            if lm.len() + rm.len() <= k {
                out.push((Atom::pair(l.clone(), r.clone()), union(lm, rm)));
            } else {
                truncated = true;
            }
        }
    }
    (out, truncated)
}

/// `w = {([], *)}`
pub fn weakening(a: &FinSet, k: usize) -> FinRel {
    FinRel::build(bang_obj(a, k), FinSet::Unit, [(Atom::empty_multiset(), Atom::Unit)], false)
}

/// `w̄ = {(*, [])}`
pub fn coweakening(a: &FinSet, k: usize) -> FinRel {
    FinRel::build(FinSet::Unit, bang_obj(a, k), [(Atom::Unit, Atom::empty_multiset())], false)
}

/// `d̄ = {(a, [a])}`
pub fn codereliction(a: &FinSet, k: usize) -> FinRel {
    let pairs = if k == 0 {
        vec![]
    } else {
        a.elements().into_iter().map(|x| (x.clone(), Atom::multiset(vec![x]))).collect()
    };
    FinRel::build(a.clone(), bang_obj(a, k), pairs, k == 0 && !a.is_empty())
}

/// `∂ = (id ⊗ d) ∘ c : !A → !A ⊗ A`
pub fn derivative(a: &FinSet, k: usize) -> FinRel {
    let bang = bang_obj(a, k);
    compose(&tensor(&identity(&bang), &dereliction(a, k)), &contraction(a, k))
        .expect("carriers match by construction")
}

/// `∂̄ = c̄ ∘ (id ⊗ d̄) : !A ⊗ A → !A`
pub fn coderivative(a: &FinSet, k: usize) -> FinRel {
    let bang = bang_obj(a, k);
    compose(&cocontraction(a, k), &tensor(&identity(&bang), &codereliction(a, k)))
        .expect("carriers match by construction")
}

/// The Seely map `!A ⊗ !B → !(A & B)`, `([a…], [b…]) ↦ [(1,a)…, (2,b)…]`,
/// on pairs whose total size is at most `k`.
pub fn seely(a: &FinSet, b: &FinSet, k: usize) -> FinRel {
    let (ba, bb) = (bang_obj(a, k), bang_obj(b, k));
    let mut pairs = Vec::new();
    let mut truncated = false;
    for l in ba.elements() {
        for r in bb.elements() {
            let (lm, rm) = (l.as_multiset().expect("multiset"), r.as_multiset().expect("multiset"));
            if lm.len() + rm.len() > k {
                truncated = true;
                continue;
            }
            let merged = lm
                .iter()
                .map(|x| Atom::tagged(1, x.clone()))
                .chain(rm.iter().map(|y| Atom::tagged(2, y.clone())))
                .collect();
            pairs.push((Atom::pair(l.clone(), r.clone()), Atom::multiset(merged)));
        }
    }
    FinRel::build(FinSet::tensor(&ba, &bb), bang_obj(&FinSet::with(a, b), k), pairs, truncated)
}

/// `ev = {(((a,b),a),b)} : (A ⊸ B) ⊗ A → B`, with `A ⊸ B = A × B`.
pub fn evaluation(a: &FinSet, b: &FinSet) -> FinRel {
    let mut pairs = Vec::new();
    for x in a.elements() {
        for y in b.elements() {
            pairs.push((Atom::pair(Atom::pair(x.clone(), y.clone()), x.clone()), y));
        }
    }
    FinRel::build(FinSet::tensor(&FinSet::tensor(a, b), a), b.clone(), pairs, false)
}

/// `Λ(f) : C → (A ⊸ B)` for `f : C ⊗ A → B`.
pub fn curry(f: &FinRel) -> Result<FinRel, RelError> {
    let FinSet::Tensor(c, a) = &f.source else {
        return Err(RelError::Mismatch {
            expected: "C ⊗ A".into(),
            found: f.source.to_string(),
        });
    };
    let pairs = f.pairs.iter().map(|(ca, b)| {
        let (c, a) = ca.as_pair().expect("pairs of a tensor");
        (c.clone(), Atom::pair(a.clone(), b.clone()))
    });
    Ok(FinRel::build(
        (**c).clone(),
        FinSet::tensor(a, &f.target),
        pairs.collect::<Vec<_>>(),
        f.truncated,
    ))
}

/// `(A ⊗ B) ⊗ C → A ⊗ (B ⊗ C)`
pub fn associator(a: &FinSet, b: &FinSet, c: &FinSet) -> FinRel {
    let src = FinSet::tensor(&FinSet::tensor(a, b), c);
    let pairs = src.elements().into_iter().map(|abc| {
        let (ab, z) = abc.as_pair().expect("pair");
        let (x, y) = ab.as_pair().expect("pair");
        let out = Atom::pair(x.clone(), Atom::pair(y.clone(), z.clone()));
        (abc.clone(), out)
    });
    let pairs: Vec<_> = pairs.collect();
    FinRel::build(src, FinSet::tensor(a, &FinSet::tensor(b, c)), pairs, false)
}

/// Projection `A & B → A` (`i = 1`) or `A & B → B` (`i = 2`).
pub fn projection(a: &FinSet, b: &FinSet, i: u8) -> FinRel {
    let side = if i == 1 { a } else { b };
    let pairs: Vec<_> = side.elements().into_iter().map(|x| (Atom::tagged(i, x.clone()), x)).collect();
    FinRel::build(FinSet::with(a, b), side.clone(), pairs, false)
}

/// Injection `A → A ⊕ B` (`i = 1`) or `B → A ⊕ B` (`i = 2`).
pub fn injection(a: &FinSet, b: &FinSet, i: u8) -> FinRel {
    let side = if i == 1 { a } else { b };
    let pairs: Vec<_> = side.elements().into_iter().map(|x| (x.clone(), Atom::tagged(i, x))).collect();
    FinRel::build(side.clone(), FinSet::with(a, b), pairs, false)
}

/// CoKleisli composition of `g : !A → B` and then `f : !B → C`:
/// `{(X₁ ⊎ ⋯ ⊎ Xₙ, z) | ([y₁…yₙ], z) ∈ f, (Xᵢ, yᵢ) ∈ g}`. Results whose
/// source exceeds the cap of `!A` are dropped and mark the result truncated.
pub fn mrel_compose(f: &FinRel, g: &FinRel) -> Result<FinRel, RelError> {
    let (b, _) = bang_parts(&f.source)?;
    let (_, cap) = bang_parts(&g.source)?;
    same(b, &g.target)?;
    let pre = g.by_target();
    let mut pairs = BTreeSet::new();
    let mut truncated = f.truncated || g.truncated;
    for (ys, z) in &f.pairs {
        let ys = ys.as_multiset().expect("multiset");
        let mut partial: BTreeSet<Vec<Atom>> = BTreeSet::from([vec![]]);
        for y in ys {
            let xs = pre.get(y).map(Vec::as_slice).unwrap_or_default();
            let mut next = BTreeSet::new();
            for p in &partial {
                for x in xs {
                    let xm = x.as_multiset().expect("multiset");
                    if p.len() + xm.len() > cap {
                        truncated = true;
                        continue;
                    }
                    let mut q = p.clone();
                    q.extend(xm.iter().cloned());
                    q.sort();
                    next.insert(q);
                }
            }
            partial = next;
        }
        for x in partial {
            pairs.insert((Atom::Multiset(x), z.clone()));
        }
    }
    Ok(FinRel::build(g.source.clone(), f.target.clone(), pairs, truncated))
}

/// The composition formula taken literally, with one `X` serving every
/// `y ∈ Y`. Kept for comparison: it does not have `dig` as a right unit.
pub fn mrel_compose_literal(f: &FinRel, g: &FinRel) -> Result<FinRel, RelError> {
    let (b, _) = bang_parts(&f.source)?;
    bang_parts(&g.source)?;
    same(b, &g.target)?;
    let mut pairs = BTreeSet::new();
    for (ys, z) in &f.pairs {
        let ys = ys.as_multiset().expect("multiset");
        for x in g.source.elements() {
            if ys.iter().all(|y| g.contains(&x, y)) {
                pairs.insert((x, z.clone()));
            }
        }
    }
    Ok(FinRel::build(g.source.clone(), f.target.clone(), pairs, f.truncated || g.truncated))
}

/// `dig = {([x], x)}`
pub fn mrel_identity(a: &FinSet, k: usize) -> FinRel {
    dereliction(a, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ms(items: &[&str]) -> Atom {
        Atom::multiset(items.iter().map(|s| Atom::sym(s)).collect())
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (FinSet::standard(2), FinSet::standard(3));
        let f = FinRel::random(&a, &b, 0.5, &mut rng);
        assert_eq!(compose(&identity(&b), &f).unwrap(), f);
        assert_eq!(compose(&f, &identity(&a)).unwrap(), f);
        assert_eq!(tensor(&identity(&a), &identity(&b)), identity(&FinSet::tensor(&a, &b)));
    }

    #[test]
    fn composition_checks_carriers() {
        let (a, b) = (FinSet::standard(2), FinSet::standard(3));
        assert!(matches!(compose(&identity(&a), &identity(&b)), Err(RelError::Mismatch { .. })));
        let bad = BTreeSet::from([(Atom::sym("z"), Atom::sym("a"))]);
        assert!(matches!(FinRel::new(a.clone(), a, bad), Err(RelError::OutOfCarrier { .. })));
    }

    #[test]
    fn displayed_structural_maps() {
        let ab = FinSet::of_symbols(["a", "b"]);
        let d = dereliction(&ab, 3);
        let expected = BTreeSet::from([(ms(&["a"]), Atom::sym("a")), (ms(&["b"]), Atom::sym("b"))]);
        assert_eq!(d.pairs, expected);
        assert_eq!(
            weakening(&ab, 2).pairs,
            BTreeSet::from([(Atom::empty_multiset(), Atom::Unit)])
        );
        let a = FinSet::of_symbols(["a"]);
        assert_eq!(codereliction(&a, 2).pairs, BTreeSet::from([(Atom::sym("a"), ms(&["a"]))]));
    }

    #[test]
    fn bang_preserves_identity() {
        let a = FinSet::standard(2);
        for k in 0..=3 {
            assert_eq!(bang_mor(&identity(&a), k).pairs, identity(&bang_obj(&a, k)).pairs);
        }
    }

    #[test]
    fn derivative_matches_direct_formula() {
        for n in 1..=2 {
            let a = FinSet::standard(n);
            for k in 1..=3 {
                let got = derivative(&a, k);
                let mut expected = BTreeSet::new();
                for m in bang_obj(&a, k).elements() {
                    let items = m.as_multiset().unwrap();
                    for (i, x) in items.iter().enumerate() {
                        let mut rest = items.to_vec();
                        rest.remove(i);
                        expected.insert((m.clone(), Atom::pair(Atom::Multiset(rest), x.clone())));
                    }
                }
                assert_eq!(got.pairs, expected, "n={n} k={k}");
            }
        }
        let a = FinSet::standard(1);
        let d = derivative(&a, 2);
        let aa = ms(&["a", "a"]);
        assert_eq!(d.by_source()[&aa], vec![&Atom::pair(ms(&["a"]), Atom::sym("a"))]);
    }

    #[test]
    fn coderivative_on_empty_multiset_is_codereliction() {
        let a = FinSet::standard(2);
        let cd = coderivative(&a, 3);
        for x in a.elements() {
            let src = Atom::pair(Atom::empty_multiset(), x.clone());
            let img: Vec<&Atom> = cd.by_source()[&src].clone();
            assert_eq!(img, vec![&Atom::multiset(vec![x])]);
        }
    }

    #[test]
    fn digging_examples() {
        let a = FinSet::of_symbols(["a"]);
        let p = digging(&a, 2);
        let targets: Vec<String> = p.by_source()[&ms(&["a"])].iter().map(|t| t.to_string()).collect();
        assert_eq!(targets, ["[[],[a]]", "[[a]]"]);
        assert!(p.truncated);
        assert!(!digging(&a, 1).truncated);
    }

    #[test]
    fn literal_composition_breaks_right_identity() {
        let a = FinSet::standard(1);
        let b = FinSet::standard(1);
        let f = FinRel::new(
            bang_obj(&a, 2),
            b.clone(),
            BTreeSet::from([(ms(&["a", "a"]), Atom::sym("a"))]),
        )
        .unwrap();
        let dig = mrel_identity(&a, 2);
        assert_eq!(mrel_compose(&f, &dig).unwrap().pairs, f.pairs);
        assert_ne!(mrel_compose_literal(&f, &dig).unwrap().pairs, f.pairs);
    }

    #[test]
    fn seely_is_total_on_small_pairs() {
        let (a, b) = (FinSet::standard(1), FinSet::standard(1));
        let s = seely(&a, &b, 2);
        assert_eq!(s.len() as u128, bang_obj(&FinSet::with(&a, &b), 2).len());
    }

    #[test]
    fn projections_and_injections() {
        let (a, b) = (FinSet::standard(2), FinSet::standard(1));
        let round = compose(&projection(&a, &b, 1), &injection(&a, &b, 1)).unwrap();
        assert_eq!(round.pairs, identity(&a).pairs);
        let cross = compose(&projection(&a, &b, 2), &injection(&a, &b, 1)).unwrap();
        assert!(cross.is_empty());
    }
}
