use super::term::{Bag, FormalSum, Name, Normal, Term, Test};
use super::SyntaxError;

/// Expression tree as written: sums may occur anywhere and the two sorts
/// (terms and tests) are not yet separated.
#[derive(Clone, Debug, PartialEq)]
pub enum Raw {
    Var(Name),
    Abs(Name, Box<Raw>),
    App(Box<Raw>, RawBag),
    TauBar(Box<Raw>),
    Eps,
    Par(Box<Raw>, Box<Raw>),
    Tau(Box<Raw>),
    /// `Sum(vec![])` is `0`.
    Sum(Vec<Raw>),
}

/// Bag as written. Well-formed bags have exactly one banged element.
#[derive(Clone, Debug, PartialEq)]
pub struct RawBag {
    pub linear: Vec<Raw>,
    pub banged: Vec<Raw>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Term,
    Test,
}

impl Raw {
    /// Sort of the expression, `None` when it is a (possibly nested) `0`.
    pub fn sort(&self) -> Option<Sort> {
        match self {
            Raw::Var(_) | Raw::Abs(..) | Raw::App(..) | Raw::TauBar(_) => Some(Sort::Term),
            Raw::Eps | Raw::Par(..) | Raw::Tau(_) => Some(Sort::Test),
            Raw::Sum(items) => items.iter().find_map(Raw::sort),
        }
    }
}

impl From<&Term> for Raw {
    fn from(t: &Term) -> Raw {
        match t {
            Term::Var(x) => Raw::Var(x.clone()),
            Term::Abs(x, body) => Raw::Abs(x.clone(), Box::new(Raw::from(&**body))),
            Term::App(f, bag) => Raw::App(Box::new(Raw::from(&**f)), RawBag::from(&**bag)),
            Term::TauBar(q) => Raw::TauBar(Box::new(Raw::from(&**q))),
        }
    }
}

impl From<&Bag> for RawBag {
    fn from(b: &Bag) -> RawBag {
        RawBag {
            linear: b.linear().iter().map(Raw::from).collect(),
            banged: vec![Raw::from(b.banged_sum())],
        }
    }
}

impl From<&Test> for Raw {
    fn from(q: &Test) -> Raw {
        match q {
            Test::Eps => Raw::Eps,
            Test::Par(l, r) => Raw::Par(Box::new(Raw::from(&**l)), Box::new(Raw::from(&**r))),
            Test::Tau(m) => Raw::Tau(Box::new(Raw::from(&**m))),
        }
    }
}

impl From<&FormalSum<Term>> for Raw {
    fn from(s: &FormalSum<Term>) -> Raw {
        match s.items() {
            [t] => Raw::from(t),
            items => Raw::Sum(items.iter().map(Raw::from).collect()),
        }
    }
}

impl From<&FormalSum<Test>> for Raw {
    fn from(s: &FormalSum<Test>) -> Raw {
        match s.items() {
            [q] => Raw::from(q),
            items => Raw::Sum(items.iter().map(Raw::from).collect()),
        }
    }
}

impl From<&Normal> for Raw {
    fn from(n: &Normal) -> Raw {
        match n {
            Normal::Terms(s) => Raw::from(s),
            Normal::Tests(s) => Raw::from(s),
        }
    }
}

/// Distributes every sum out of linear positions.
///
/// The sort of the result is inferred; a bare `0` is read as a term.
pub fn sum_normalize(raw: &Raw) -> Result<Normal, SyntaxError> {
    match raw.sort() {
        Some(Sort::Test) => normalize_test(raw).map(Normal::Tests),
        _ => normalize_term(raw).map(Normal::Terms),
    }
}

pub fn normalize_term(raw: &Raw) -> Result<FormalSum<Term>, SyntaxError> {
    Ok(match raw {
        Raw::Var(x) => FormalSum::single(Term::Var(x.clone())),
        Raw::Abs(x, body) => normalize_term(body)?.map(|b| Term::Abs(x.clone(), Box::new(b))),
        Raw::App(f, bag) => {
            let funs = normalize_term(f)?;
            let bags = normalize_bag(bag)?;
            let mut out = Vec::with_capacity(funs.len() * bags.len());
            for f in funs.items() {
                for b in &bags {
                    out.push(Term::app(f.clone(), b.clone()));
                }
            }
            FormalSum::from_vec(out)
        }
        Raw::TauBar(q) => normalize_test(q)?.map(Term::tau_bar),
        Raw::Sum(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(normalize_term(item)?);
            }
            FormalSum::from_vec(out)
        }
        Raw::Eps | Raw::Par(..) | Raw::Tau(_) => {
            return Err(SyntaxError::Structural(
                "expected a term, found a test".to_string(),
            ))
        }
    })
}

pub fn normalize_test(raw: &Raw) -> Result<FormalSum<Test>, SyntaxError> {
    Ok(match raw {
        Raw::Eps => FormalSum::single(Test::Eps),
        Raw::Par(l, r) => {
            let ls = normalize_test(l)?;
            let rs = normalize_test(r)?;
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for l in ls.items() {
                for r in rs.items() {
                    out.push(Test::par(l.clone(), r.clone()));
                }
            }
            FormalSum::from_vec(out)
        }
        Raw::Tau(m) => normalize_term(m)?.map(Test::tau),
        Raw::Sum(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(normalize_test(item)?);
            }
            FormalSum::from_vec(out)
        }
        Raw::Var(_) | Raw::Abs(..) | Raw::App(..) | Raw::TauBar(_) => {
            return Err(SyntaxError::Structural(
                "expected a test, found a term".to_string(),
            ))
        }
    })
}

/// Bags distribute over sums in linear slots only; the banged slot keeps its sum.
fn normalize_bag(bag: &RawBag) -> Result<Vec<Bag>, SyntaxError> {
    let banged = match bag.banged.as_slice() {
        [b] => normalize_term(b)?,
        [] => {
            return Err(SyntaxError::Structural(
                "bag without a banged component".to_string(),
            ))
        }
        _ => {
            return Err(SyntaxError::Structural(format!(
                "bag with {} banged components",
                bag.banged.len()
            )))
        }
    };
    let mut choices: Vec<Vec<Term>> = vec![Vec::new()];
    for item in &bag.linear {
        let alts = normalize_term(item)?;
        let mut next = Vec::with_capacity(choices.len() * alts.len());
        for prefix in &choices {
            for alt in alts.items() {
                let mut v = prefix.clone();
                v.push(alt.clone());
                next.push(v);
            }
        }
        choices = next;
    }
    Ok(choices
        .into_iter()
        .map(|linear| Bag::new(linear, banged.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn norm(s: &str) -> Normal {
        sum_normalize(&parse(s).unwrap()).unwrap()
    }

    fn same(a: &str, b: &str) {
        assert_eq!(norm(a).key(), norm(b).key(), "{a} vs {b}");
    }

    #[test]
    fn abstraction_distributes() {
        same("\\x. (m + n)", "(\\x. m) + (\\x. n)");
    }

    #[test]
    fn linear_bag_slot_distributes() {
        same("f [m + n, p; l!]", "f [m, p; l!] + f [n, p; l!]");
    }

    #[test]
    fn banged_slot_keeps_its_sum() {
        let n = norm("f [(m + n)!]");
        assert_eq!(n.len(), 1);
        match n {
            Normal::Terms(s) => match &s.items()[0] {
                Term::App(_, bag) => assert_eq!(bag.banged_sum().len(), 2),
                other => panic!("unexpected {other:?}"),
            },
            _ => panic!("expected terms"),
        }
    }

    #[test]
    fn abstraction_over_zero_is_zero() {
        assert!(norm("\\x. 0").is_zero());
        assert!(norm("f [0; y!]").is_zero());
    }

    #[test]
    fn test_constructors_distribute() {
        same("tau(m + n)", "tau(m) + tau(n)");
        same("tbar(eps + eps | tau(x))", "tbar(eps) + tbar(eps | tau(x))");
        same("(eps + tau(x)) | eps", "eps | eps + tau(x) | eps");
    }

    #[test]
    fn idempotent() {
        for s in ["\\x. (m + n) [a + b; (c + d)!]", "tau(\\x. x [0!]) | (eps + eps)"] {
            let once = norm(s);
            let again = sum_normalize(&Raw::from(&once)).unwrap();
            assert_eq!(once.key(), again.key());
        }
    }

    #[test]
    fn structural_errors() {
        let bad = Raw::App(
            Box::new(Raw::Var(Name::new("f"))),
            RawBag {
                linear: vec![Raw::Var(Name::new("x"))],
                banged: vec![],
            },
        );
        assert!(matches!(sum_normalize(&bad), Err(SyntaxError::Structural(_))));
        let bad = Raw::Tau(Box::new(Raw::Eps));
        assert!(sum_normalize(&bad).is_err());
    }
}
