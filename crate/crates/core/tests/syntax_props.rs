use proptest::prelude::*;
use resource_lambda::gen::{Gen, GenConfig};
use resource_lambda::rewriting::{fresh_name, rename_free};
use resource_lambda::syntax::{
    alpha_eq, parse_normal, sum_normalize, Bag, Node, Normal, Raw, Term,
};

fn open() -> GenConfig {
    GenConfig {
        max_size: 14,
        closed: false,
        sums: true,
        tests: true,
    }
}

/// Renames every binder outside tests to a name not used below it.
fn rename_binders(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::TauBar(_) => t.clone(),
        Term::Abs(x, body) => {
            let body = rename_binders(body);
            let w = fresh_name(x, &body.names());
            Term::abs(w.clone(), rename_free(&body, x, &w))
        }
        Term::App(f, bag) => Term::app(
            rename_binders(f),
            Bag::new(
                bag.linear().iter().map(rename_binders).collect(),
                bag.banged_sum().clone().map(|t| rename_binders(&t)),
            ),
        ),
    }
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity_up_to_alpha(seed in any::<u64>()) {
        let mut g = Gen::new(seed, open());
        let e = Normal::Terms((0..3).map(|_| g.term()).collect());
        let back = parse_normal(&e.to_string()).unwrap();
        prop_assert_eq!(back.key(), e.key());
        let q = Normal::Tests((0..2).map(|_| g.test()).collect());
        let back = parse_normal(&q.to_string()).unwrap();
        prop_assert_eq!(back.key(), q.key());
    }

    #[test]
    fn sum_normalization_is_idempotent(seed in any::<u64>()) {
        let mut g = Gen::new(seed, open());
        let raw = g.raw_term(4);
        let once = sum_normalize(&raw).unwrap();
        let twice = sum_normalize(&Raw::from(&once)).unwrap();
        prop_assert_eq!(once.key(), twice.key());
        prop_assert_eq!(once.free_vars(), twice.free_vars());
    }

    #[test]
    fn normalization_keeps_free_variables_of_surviving_summands(seed in any::<u64>()) {
        let mut g = Gen::new(seed, open());
        let t = g.term();
        let n = sum_normalize(&Raw::from(&t)).unwrap();
        prop_assert_eq!(n.len(), 1);
        prop_assert_eq!(n.free_vars(), t.free_vars());
    }

    #[test]
    fn renaming_binders_preserves_alpha_class(seed in any::<u64>()) {
        let mut g = Gen::new(seed, open());
        let t = g.term();
        let r = rename_binders(&t);
        prop_assert!(alpha_eq(&t, &r), "{} vs {}", t, r);
        prop_assert_eq!(t.size(), r.size());
    }

    #[test]
    fn alpha_equivalence_is_a_congruence_for_application(seed in any::<u64>()) {
        let mut g = Gen::new(seed, open());
        let (f, a) = (g.term(), g.term());
        let bag = Bag::banged(a.clone());
        let lhs = Term::app(f.clone(), bag);
        let rhs = Term::app(rename_binders(&f), Bag::banged(rename_binders(&a)));
        prop_assert!(alpha_eq(&lhs, &rhs));
    }
}

#[test]
fn free_and_bound_occurrences_differ() {
    let a = parse_normal("\\x. x").unwrap();
    let b = parse_normal("\\x. y").unwrap();
    assert_ne!(a.key(), b.key());
    assert_eq!(a.key(), parse_normal("\\z. z").unwrap().key());
}
