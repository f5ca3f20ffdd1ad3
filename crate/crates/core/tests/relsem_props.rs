use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resource_lambda::relsem::{
    bang_mor, compare, compose, dereliction, identity, mrel_compose, mrel_identity, FinRel,
    FinSet, LawVerdict,
};

fn rel(seed: u64, a: &FinSet, b: &FinSet) -> FinRel {
    FinRel::random(a, b, 0.4, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bang_is_a_functor(seed in any::<u64>(), n in 1usize..=3, k in 0usize..=3) {
        let a = FinSet::standard(n);
        let b = FinSet::standard(2);
        let f = rel(seed, &a, &b);
        let g = rel(seed ^ 1, &b, &a);
        let lhs = bang_mor(&compose(&g, &f).unwrap(), k);
        let rhs = compose(&bang_mor(&g, k), &bang_mor(&f, k)).unwrap();
        prop_assert_eq!(compare(&lhs, &rhs), LawVerdict::Holds);
        prop_assert_eq!(compare(&bang_mor(&identity(&a), k), &identity(&FinSet::bang(&a, k))), LawVerdict::Holds);
    }

    #[test]
    fn dereliction_is_natural(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        let a = FinSet::standard(n);
        let b = FinSet::standard(3);
        let f = rel(seed, &a, &b);
        let lhs = compose(&f, &dereliction(&a, k)).unwrap();
        let rhs = compose(&dereliction(&b, k), &bang_mor(&f, k)).unwrap();
        prop_assert_eq!(compare(&lhs, &rhs), LawVerdict::Holds);
    }

    #[test]
    fn cokleisli_identity_laws(seed in any::<u64>(), n in 1usize..=2) {
        let a = FinSet::standard(n);
        let b = FinSet::standard(2);
        let k = 3;
        let f = rel(seed, &FinSet::bang(&a, k), &b);
        let left = mrel_compose(&mrel_identity(&b, k), &f).unwrap();
        prop_assert_eq!(compare(&left, &f), LawVerdict::Holds);
    }
}
