//! Seeded random expressions for corpora and property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Bag, FormalSum, Name, Node, Raw, RawBag, Term, Test};

const BINDERS: [&str; 3] = ["x", "y", "z"];
const FREE: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Upper bound on `Node::size` of each generated expression.
    pub max_size: usize,
    pub closed: bool,
    /// Allow banged slots holding sums of several terms (or `0`).
    pub sums: bool,
    pub tests: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_size: 12,
            closed: true,
            sums: false,
            tests: true,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl Gen {
    pub fn new(seed: u64, cfg: GenConfig) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn term(&mut self) -> Term {
        loop {
            let budget = self.rng.gen_range(1..=self.cfg.max_size);
            let t = self.term_in(budget, &mut Vec::new());
            if t.size() <= self.cfg.max_size {
                return t;
            }
        }
    }

    pub fn test(&mut self) -> Test {
        loop {
            let budget = self.rng.gen_range(1..=self.cfg.max_size);
            let q = self.test_in(budget, &mut Vec::new());
            if q.size() <= self.cfg.max_size {
                return q;
            }
        }
    }

    /// A term that uses `x` free at least once, unless the draw made that impossible.
    pub fn term_with_free(&mut self, x: &str) -> Term {
        let mut scope = vec![Name::new(x)];
        let budget = self.rng.gen_range(1..=self.cfg.max_size);
        self.term_in(budget, &mut scope)
    }

    fn leaf(&mut self, scope: &[Name]) -> Option<Term> {
        let mut pool: Vec<Name> = scope.to_vec();
        if !self.cfg.closed {
            pool.extend(FREE.iter().map(|s| Name::new(s)));
        }
        pool.choose(&mut self.rng).cloned().map(Term::Var)
    }

    fn term_in(&mut self, budget: usize, scope: &mut Vec<Name>) -> Term {
        if budget <= 1 {
            if let Some(t) = self.leaf(scope) {
                return t;
            }
        }
        let choice = if budget <= 2 { 0 } else { self.rng.gen_range(0..10) };
        match choice {
            // abstraction
            0..=3 => {
                let x = Name::new(BINDERS.choose(&mut self.rng).expect("nonempty"));
                scope.push(x.clone());
                let body = self.term_in(budget.saturating_sub(1).max(1), scope);
                scope.pop();
                Term::Abs(x, Box::new(body))
            }
            4..=8 => {
                let fun_budget = self.rng.gen_range(1..budget - 1);
                let f = self.term_in(fun_budget, scope);
                let bag = self.bag_in(budget - 1 - fun_budget, scope);
                Term::app(f, bag)
            }
            _ if self.cfg.tests => Term::tau_bar(self.test_in(budget - 1, scope)),
            _ => self.leaf(scope).unwrap_or_else(|| self.term_in(budget, scope)),
        }
    }

    fn bag_in(&mut self, budget: usize, scope: &mut Vec<Name>) -> Bag {
        let mut left = budget.saturating_sub(1);
        let mut linear = Vec::new();
        let n = self.rng.gen_range(0..=2usize);
        for _ in 0..n {
            if left < 2 {
                break;
            }
            let b = self.rng.gen_range(1..=left / 2);
            linear.push(self.term_in(b, scope));
            left -= b;
        }
        let banged = if left == 0 {
            FormalSum::zero()
        } else if self.cfg.sums && self.rng.gen_bool(0.3) {
            let k = self.rng.gen_range(0..=2usize);
            (0..k)
                .map(|_| {
                    let b = self.rng.gen_range(1..=left.max(2) / 2);
                    self.term_in(b, scope)
                })
                .collect()
        } else {
            FormalSum::single(self.term_in(left, scope))
        };
        Bag::new(linear, banged)
    }

    fn test_in(&mut self, budget: usize, scope: &mut Vec<Name>) -> Test {
        if budget <= 2 {
            return Test::Eps;
        }
        if self.rng.gen_bool(0.3) {
            let l = self.rng.gen_range(1..budget - 1);
            Test::par(self.test_in(l, scope), self.test_in(budget - 1 - l, scope))
        } else {
            Test::tau(self.term_in(budget - 1, scope))
        }
    }

    /// A written expression with sums in arbitrary positions, for
    /// exercising sum normalization.
    pub fn raw_term(&mut self, depth: usize) -> Raw {
        let mut scope = Vec::new();
        self.raw_in(depth, &mut scope)
    }

    fn raw_in(&mut self, depth: usize, scope: &mut Vec<Name>) -> Raw {
        let leaf = |g: &mut Gen, scope: &[Name]| match g.leaf(scope) {
            Some(Term::Var(x)) => Raw::Var(x),
            _ => Raw::TauBar(Box::new(Raw::Eps)),
        };
        if depth == 0 {
            return leaf(self, scope);
        }
        match self.rng.gen_range(0..8) {
            0 => leaf(self, scope),
            1 | 2 => {
                let x = Name::new(BINDERS.choose(&mut self.rng).expect("nonempty"));
                scope.push(x.clone());
                let body = self.raw_in(depth - 1, scope);
                scope.pop();
                Raw::Abs(x, Box::new(body))
            }
            3..=5 => {
                let f = self.raw_in(depth - 1, scope);
                let n = self.rng.gen_range(0..=2);
                let linear = (0..n).map(|_| self.raw_in(depth - 1, scope)).collect();
                let banged = vec![self.raw_in(depth - 1, scope)];
                Raw::App(Box::new(f), RawBag { linear, banged })
            }
            _ => {
                let n = self.rng.gen_range(0..=3);
                Raw::Sum((0..n).map(|_| self.raw_in(depth - 1, scope)).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let draw = |seed| {
            let mut g = Gen::new(seed, GenConfig::default());
            (0..20).map(|_| g.term().to_string()).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn respects_bounds() {
        let mut g = Gen::new(1, GenConfig::default());
        for _ in 0..500 {
            let t = g.term();
            assert!(t.size() <= 12, "{t}");
            assert!(t.is_closed(), "{t}");
        }
        let mut g = Gen::new(2, GenConfig { closed: false, sums: true, max_size: 8, tests: true });
        let open = (0..200).filter(|_| !g.term().is_closed()).count();
        assert!(open > 0);
    }
}
