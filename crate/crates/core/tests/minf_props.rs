use proptest::prelude::*;
use resource_lambda::combinators::identity;
use resource_lambda::gen::{Gen, GenConfig};
use resource_lambda::minf::{interp, Derivability, Elem, Env, Search, Universe};
use resource_lambda::rewriting::{outer_head_step, Step};
use resource_lambda::syntax::{FormalSum, Name};

fn small() -> GenConfig {
    GenConfig {
        max_size: 8,
        closed: true,
        sums: false,
        tests: true,
    }
}

fn contradicts(a: &Derivability, b: &Derivability) -> bool {
    matches!((a, b), (Derivability::Yes(_), Derivability::No) | (Derivability::No, Derivability::Yes(_)))
}

fn elems(u: &Universe) -> impl Strategy<Value = Vec<Elem>> {
    let all = u.elems().to_vec();
    prop::collection::vec(prop::sample::select(all), 0..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_step_keeps_the_interpretation(seed in any::<u64>()) {
        let u = Universe::enumerate(2, 2);
        let mut g = Gen::new(seed, small());
        let t = g.term();
        let Step::Reduced { result, .. } = outer_head_step(&t) else { return Ok(()) };
        let mut search = Search::new(&u, 200_000);
        for e in u.elems() {
            let before = search.sum(&Env::empty(), &FormalSum::single(t.clone()), e);
            let after = search.sum(&Env::empty(), &result, e);
            prop_assert!(!contradicts(&before, &after), "{} -> {} at {}: {} vs {}", t, result, e, before.name(), after.name());
        }
    }

    #[test]
    fn environment_sum_is_commutative_and_associative(
        a in elems(&Universe::enumerate(1, 2)),
        b in elems(&Universe::enumerate(1, 2)),
        c in elems(&Universe::enumerate(1, 2)),
    ) {
        let (x, y) = (Name::new("x"), Name::new("y"));
        let ea = Env::single(x.clone(), a);
        let eb = Env::single(y, b).sum(&Env::single(x.clone(), c.clone()));
        let ec = Env::single(x, c);
        prop_assert_eq!(ea.sum(&eb), eb.sum(&ea));
        prop_assert_eq!(ea.sum(&eb).sum(&ec), ea.sum(&eb.sum(&ec)));
        prop_assert_eq!(ea.sum(&Env::empty()), ea.clone());
    }
}

#[test]
fn identity_denotes_the_diagonal() {
    for (depth, width) in [(1, 1), (2, 2), (2, 3)] {
        let u = Universe::enumerate(depth, width);
        let got = interp(&FormalSum::single(identity()), &[], &u, 100_000);
        assert!(got.unknown.is_empty());
        let expected: Vec<Elem> = u
            .elems()
            .iter()
            .map(|a| Elem::cons(vec![a.clone()], a.clone()))
            .filter(|e| u.contains(e))
            .collect();
        let members: Vec<Elem> = got.members.iter().map(|(_, e)| e.clone()).collect();
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(members, sorted, "U({depth},{width})");
    }
}

#[test]
fn free_variable_is_interpreted_by_its_environment() {
    let u = Universe::enumerate(1, 1);
    let x = Name::new("x");
    let got = interp(&FormalSum::single(resource_lambda::syntax::Term::var("x")), &[x], &u, 10_000);
    for (env, e) in &got.members {
        assert_eq!(env[0], vec![e.clone()]);
    }
    assert_eq!(got.members.len(), u.len());
}

#[test]
fn reduction_check_is_not_vacuous() {
    let u = Universe::enumerate(2, 2);
    let mut g = Gen::new(11, small());
    let mut search = Search::new(&u, 200_000);
    let (mut definite, mut yes) = (0, 0);
    for _ in 0..150 {
        let t = g.term();
        let Step::Reduced { result, .. } = outer_head_step(&t) else { continue };
        for e in u.elems() {
            let before = search.sum(&Env::empty(), &FormalSum::single(t.clone()), e);
            let after = search.sum(&Env::empty(), &result, e);
            if before != Derivability::Unknown && after != Derivability::Unknown {
                definite += 1;
                yes += usize::from(after.is_yes());
            }
        }
    }
    assert!(definite > 400 && yes > 20, "{definite} definite, {yes} yes");
}
