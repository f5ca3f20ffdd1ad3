use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rel::*;
use super::set::{Atom, FinSet};
use crate::sexp::{Sexp, ToSexp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawVerdict {
    Holds,
    /// A pair on one side only, with no truncation involved.
    Fails { pair: (Atom, Atom), in_lhs: bool },
    /// The sides differ but one of them lost pairs to the size cap.
    Inconclusive { pair: (Atom, Atom), in_lhs: bool },
}

impl LawVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            LawVerdict::Holds => "Holds",
            LawVerdict::Fails { .. } => "Fails",
            LawVerdict::Inconclusive { .. } => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LawInstance {
    pub group: &'static str,
    pub law: &'static str,
    pub size: usize,
    pub k: usize,
    pub sample: usize,
    pub verdict: LawVerdict,
}

impl ToSexp for LawInstance {
    fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::atom(self.group),
            Sexp::atom(self.law),
            Sexp::field("size", Sexp::int(self.size as i128)),
            Sexp::field("k", Sexp::int(self.k as i128)),
            Sexp::field("sample", Sexp::int(self.sample as i128)),
            Sexp::atom(self.verdict.name().to_lowercase()),
        ];
        match &self.verdict {
            LawVerdict::Holds => {}
            LawVerdict::Fails { pair, in_lhs } | LawVerdict::Inconclusive { pair, in_lhs } => {
                items.push(Sexp::tagged(
                    "witness",
                    [
                        Sexp::str(pair.0.to_string()),
                        Sexp::str(pair.1.to_string()),
                        Sexp::atom(if *in_lhs { "lhs-only" } else { "rhs-only" }),
                    ],
                ));
            }
        }
        Sexp::tagged("law", items)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub instances: Vec<LawInstance>,
}

impl LawReport {
    pub fn count(&self, verdict: &str) -> usize {
        self.instances.iter().filter(|i| i.verdict.name() == verdict).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawInstance> {
        self.instances
            .iter()
            .filter(|i| matches!(i.verdict, LawVerdict::Fails { .. }))
    }

    pub fn all_hold_or_inconclusive(&self) -> bool {
        self.failures().next().is_none()
    }

    /// One row per law, aggregated over sizes and samples.
    pub fn table(&self) -> String {
        let mut rows: Vec<(&str, &str, [usize; 3])> = Vec::new();
        for i in &self.instances {
            let slot = match i.verdict {
                LawVerdict::Holds => 0,
                LawVerdict::Fails { .. } => 1,
                LawVerdict::Inconclusive { .. } => 2,
            };
            match rows.iter_mut().find(|r| r.0 == i.group && r.1 == i.law) {
                Some(r) => r.2[slot] += 1,
                None => {
                    let mut c = [0; 3];
                    c[slot] = 1;
                    rows.push((i.group, i.law, c));
                }
            }
        }
        let mut out = format!("{:<12} {:<28} {:>6} {:>6} {:>12}\n", "group", "law", "holds", "fails", "inconclusive");
        for (g, l, c) in rows {
            out.push_str(&format!("{g:<12} {l:<28} {:>6} {:>6} {:>12}\n", c[0], c[1], c[2]));
        }
        out
    }
}

impl ToSexp for LawReport {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "laws",
            [
                Sexp::field("holds", Sexp::int(self.count("Holds") as i128)),
                Sexp::field("fails", Sexp::int(self.count("Fails") as i128)),
                Sexp::field("inconclusive", Sexp::int(self.count("Inconclusive") as i128)),
                Sexp::field("instances", Sexp::list(self.instances.iter().map(ToSexp::to_sexp))),
            ],
        )
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.table())
    }
}

/// Compares two relations with equal carriers.
pub fn compare(lhs: &FinRel, rhs: &FinRel) -> LawVerdict {
    let witness = lhs
        .pairs
        .difference(&rhs.pairs)
        .next()
        .map(|p| (p.clone(), true))
        .or_else(|| rhs.pairs.difference(&lhs.pairs).next().map(|p| (p.clone(), false)));
    match witness {
        None => LawVerdict::Holds,
        Some((pair, in_lhs)) if lhs.truncated || rhs.truncated => LawVerdict::Inconclusive { pair, in_lhs },
        Some((pair, in_lhs)) => LawVerdict::Fails { pair, in_lhs },
    }
}

/// Compares two relations on the pairs selected by `region`, a part of the
/// carrier where neither side lost pairs to truncation.
pub fn compare_on(lhs: &FinRel, rhs: &FinRel, region: impl Fn(&Atom, &Atom) -> bool) -> LawVerdict {
    let restrict = |r: &FinRel| FinRel {
        pairs: r.pairs.iter().filter(|(x, y)| region(x, y)).cloned().collect(),
        truncated: false,
        ..r.clone()
    };
    compare(&restrict(lhs), &restrict(rhs))
}

struct Checker {
    rng: ChaCha8Rng,
    k: usize,
    samples: usize,
    out: Vec<LawInstance>,
}

impl Checker {
    fn record(&mut self, group: &'static str, law: &'static str, size: usize, sample: usize, verdict: LawVerdict) {
        self.out.push(LawInstance {
            group,
            law,
            size,
            k: self.k,
            sample,
            verdict,
        });
    }

    fn eq(&mut self, group: &'static str, law: &'static str, size: usize, sample: usize, lhs: &FinRel, rhs: &FinRel) {
        self.record(group, law, size, sample, compare(lhs, rhs));
    }

    fn random(&mut self, source: &FinSet, target: &FinSet, density: f64) -> FinRel {
        FinRel::random(source, target, density, &mut self.rng)
    }

    fn comonad(&mut self, n: usize) {
        let k = self.k;
        let a = FinSet::standard(n);
        let bang = bang_obj(&a, k);
        let p = digging(&a, k);
        let id = identity(&bang);
        let c = |f: &FinRel, g: &FinRel| compose(f, g).expect("carriers match");
        self.eq("comonad", "counit-left", n, 0, &c(&dereliction(&bang, k), &p), &id);
        self.eq("comonad", "counit-right", n, 0, &c(&bang_mor(&dereliction(&a, k), k), &p), &id);
        // !p is only needed on the image of p
        let image: Vec<Atom> = p.pairs.iter().map(|(_, y)| y.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let bang_p = bang_mor_over(&p, k, &image);
        // A target [G₁…Gₗ] of !!!A is reached through p on the left only when
        // it has at most k inner multisets in all; both sides are complete there.
        let fits = |_: &Atom, y: &Atom| {
            let groups = y.as_multiset().expect("multiset");
            groups.iter().map(|g| g.as_multiset().expect("multiset").len()).sum::<usize>() <= k
        };
        let v = compare_on(&c(&digging(&bang, k), &p), &c(&bang_p, &p), fits);
        self.record("comonad", "coassociativity", n, 0, v);
    }

    fn cokleisli(&mut self, n: usize) {
        let k = self.k;
        let a = FinSet::standard(n);
        let b = FinSet::standard(2);
        let cc = FinSet::of_symbols(["u", "v"]);
        let d = FinSet::of_symbols(["p", "q"]);
        for s in 0..self.samples {
            let f = self.random(&bang_obj(&a, k), &b, 0.3);
            let g = self.random(&bang_obj(&b, k), &cc, 0.3);
            let h = self.random(&bang_obj(&cc, k), &d, 0.3);
            let m = |x: &FinRel, y: &FinRel| mrel_compose(x, y).expect("carriers match");
            self.eq("cokleisli", "left-identity", n, s, &m(&mrel_identity(&b, k), &f), &f);
            self.eq("cokleisli", "right-identity", n, s, &m(&f, &mrel_identity(&a, k)), &f);
            self.eq("cokleisli", "associativity", n, s, &m(&h, &m(&g, &f)), &m(&m(&h, &g), &f));
            // g ∘ !f ∘ p in Rel
            let via_rel = compose(&g, &compose(&bang_mor(&f, k), &digging(&a, k)).expect("match")).expect("match");
            self.eq("cokleisli", "agrees-with-comonad", n, s, &m(&g, &f), &via_rel);
        }
    }

    fn seely(&mut self, n: usize) {
        let k = self.k;
        let (a, b) = (FinSet::standard(n), FinSet::of_symbols(["u", "v"]));
        let s = seely(&a, &b, k);
        let target = bang_obj(&FinSet::with(&a, &b), k);
        let forward = s.by_source();
        let backward = s.by_target();
        let functional = forward.values().all(|v| v.len() == 1);
        let injective = backward.values().all(|v| v.len() == 1);
        let mut verdict = LawVerdict::Holds;
        if !functional || !injective {
            let (x, ys) = forward.iter().find(|(_, v)| v.len() != 1).map(|(x, v)| (*x, v.clone())).unwrap_or_else(|| {
                let (y, xs) = backward.iter().find(|(_, v)| v.len() != 1).expect("some fibre is not a singleton");
                (xs[0], vec![*y])
            });
            verdict = LawVerdict::Fails {
                pair: (x.clone(), ys[0].clone()),
                in_lhs: true,
            };
        } else if let Some(y) = target.elements().into_iter().find(|y| !backward.contains_key(y)) {
            verdict = LawVerdict::Fails {
                pair: (Atom::Unit, y),
                in_lhs: false,
            };
        }
        self.record("seely", "bijection", n, 0, verdict);
    }

    fn differential(&mut self, n: usize) {
        let k = self.k;
        let a = FinSet::standard(n);
        let bang = bang_obj(&a, k);
        let dd = compose(&coderivative(&a, k), &derivative(&a, k)).expect("carriers match");
        let j = identity(&bang).union(&dd).expect("carriers match");
        self.eq("differential", "J-is-identity", n, 0, &j, &identity(&bang));
        for s in 0..self.samples {
            // f₂ agrees with f₁ on nonempty multisets, so f₁∂̄ = f₂∂̄
            let b = FinSet::standard(2);
            let f1 = self.random(&bang, &b, 0.4);
            let mut f2 = f1.clone();
            f2.pairs.retain(|(x, _)| x != &Atom::empty_multiset());
            for y in b.elements() {
                if self.rng.gen_bool(0.5) {
                    f2.pairs.insert((Atom::empty_multiset(), y));
                }
            }
            let cd = coderivative(&a, k);
            let c = |f: &FinRel, g: &FinRel| compose(f, g).expect("carriers match");
            if c(&f1, &cd).pairs != c(&f2, &cd).pairs {
                continue;
            }
            let ww = c(&coweakening(&a, k), &weakening(&a, k));
            let lhs = f1.union(&c(&f2, &ww)).expect("match");
            let rhs = c(&f1, &ww).union(&f2).expect("match");
            self.eq("differential", "taylor", n, s, &lhs, &rhs);
        }
    }

    fn naturality(&mut self, n: usize) {
        let k = self.k;
        let a = FinSet::standard(n);
        let b = FinSet::of_symbols(["u", "v"]);
        let c = |f: &FinRel, g: &FinRel| compose(f, g).expect("carriers match");
        for s in 0..self.samples {
            let f = self.random(&a, &b, 0.5);
            let bf = bang_mor(&f, k);
            self.eq("naturality", "dereliction", n, s, &c(&f, &dereliction(&a, k)), &c(&dereliction(&b, k), &bf));
            self.eq(
                "naturality",
                "digging",
                n,
                s,
                &c(&bang_mor(&bf, k), &digging(&a, k)),
                &c(&digging(&b, k), &bf),
            );
            self.eq(
                "naturality",
                "contraction",
                n,
                s,
                &c(&tensor(&bf, &bf), &contraction(&a, k)),
                &c(&contraction(&b, k), &bf),
            );
            self.eq("naturality", "weakening", n, s, &c(&weakening(&b, k), &bf), &weakening(&a, k));
            self.eq(
                "naturality",
                "codereliction",
                n,
                s,
                &c(&codereliction(&b, k), &f),
                &c(&bf, &codereliction(&a, k)),
            );
        }
    }

    fn functoriality(&mut self, n: usize) {
        let k = self.k;
        let a = FinSet::standard(n);
        let b = FinSet::of_symbols(["u", "v"]);
        let cc = FinSet::of_symbols(["p", "q"]);
        let c = |f: &FinRel, g: &FinRel| compose(f, g).expect("carriers match");
        self.eq("functor", "bang-identity", n, 0, &bang_mor(&identity(&a), k), &identity(&bang_obj(&a, k)));
        for s in 0..self.samples {
            let f = self.random(&a, &b, 0.5);
            let g = self.random(&b, &cc, 0.5);
            self.eq("functor", "bang-composition", n, s, &bang_mor(&c(&g, &f), k), &c(&bang_mor(&g, k), &bang_mor(&f, k)));
            let f2 = self.random(&b, &a, 0.5);
            let g2 = self.random(&cc, &b, 0.5);
            self.eq(
                "tensor",
                "functorial",
                n,
                s,
                &tensor(&c(&f2, &f), &c(&g2, &g)),
                &c(&tensor(&f2, &g2), &tensor(&f, &g)),
            );
            let h = self.random(&cc, &a, 0.5);
            let lhs = c(&associator(&b, &cc, &a), &tensor(&tensor(&f, &g), &h));
            let rhs = c(&tensor(&f, &tensor(&g, &h)), &associator(&a, &b, &cc));
            self.eq("tensor", "associativity", n, s, &lhs, &rhs);
        }
    }

    fn closure(&mut self, n: usize) {
        let a = FinSet::standard(n.min(2));
        let b = FinSet::of_symbols(["u", "v"]);
        let ctx = FinSet::of_symbols(["p", "q"]);
        for s in 0..self.samples {
            let f = self.random(&FinSet::tensor(&ctx, &a), &b, 0.5);
            let lam = curry(&f).expect("source is a tensor");
            let tri = compose(&evaluation(&a, &b), &tensor(&lam, &identity(&a))).expect("carriers match");
            self.eq("closure", "evaluation-triangle", n, s, &tri, &f);
        }
    }
}

/// Runs every law family for objects of size `1..=max_size` with multiset
/// cap `k`. Naturality, functoriality and closure use objects of size at
/// most 2. Random morphisms come from `seed`.
pub fn check_laws(max_size: usize, k: usize, seed: u64) -> LawReport {
    let mut ch = Checker {
        rng: ChaCha8Rng::seed_from_u64(seed),
        k,
        samples: 3,
        out: Vec::new(),
    };
    for n in 1..=max_size {
        ch.comonad(n);
        ch.cokleisli(n);
        ch.seely(n);
        ch.differential(n);
    }
    for n in 1..=max_size.min(2) {
        ch.naturality(n);
        ch.functoriality(n);
        ch.closure(n);
    }
    LawReport { instances: ch.out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_has_no_failures() {
        let r = check_laws(2, 2, 0);
        let fails: Vec<String> = r.failures().map(|i| i.to_sexp().to_string()).collect();
        assert!(fails.is_empty(), "{fails:?}");
        assert!(r.count("Holds") > 0);
    }

    #[test]
    fn compare_reports_witnesses() {
        let a = FinSet::standard(2);
        let id = identity(&a);
        let mut smaller = id.clone();
        let first = smaller.pairs.iter().next().unwrap().clone();
        smaller.pairs.remove(&first);
        assert_eq!(compare(&id, &smaller), LawVerdict::Fails { pair: first.clone(), in_lhs: true });
        smaller.truncated = true;
        assert_eq!(compare(&id, &smaller), LawVerdict::Inconclusive { pair: first, in_lhs: true });
        assert_eq!(compare(&id, &id), LawVerdict::Holds);
    }
}
