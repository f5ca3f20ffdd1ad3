//! The named terms of the counter-example and checkers for their reduction
//! behaviour.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::rewriting::{
    full_normalize, outer_head_step, reduce, Outcome, Reducible, Step, Strategy,
};
use crate::sexp::{Sexp, ToSexp};
use crate::syntax::{alpha_eq, parse_term, Bag, FormalSum, Name, Node, Term, Test};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatorError {
    #[error("index {index} out of range for {name} (minimum {min})")]
    IndexOutOfRange {
        name: &'static str,
        index: usize,
        min: usize,
    },
    #[error("unknown term name `{0}`")]
    UnknownName(String),
}

fn fixed(text: &str) -> Term {
    parse_term(text).expect("built-in terms parse")
}

/// `λx. x`
pub fn identity() -> Term {
    fixed("\\x. x")
}

/// Turing's fixpoint combinator `T [T!]` with `T = λg u. u [(g [g!] [u!])!]`,
/// so that `Θ [F!]` unfolds to `F [(Θ [F!])!]`.
pub fn theta() -> Term {
    let t = "(\\g. \\u. u [(g [g!] [u!])!])";
    fixed(&format!("{t} [{t}!]"))
}

/// `τ̄(ε)`: absorbs banged arguments and annihilates on linear ones.
pub fn eps0() -> Term {
    Term::tau_bar(Test::Eps)
}

/// `λu v w. w [(I [v!])!]`
pub fn unfold_stop() -> Term {
    fixed("\\u. \\v. \\w. w [((\\x. x) [v!])!]")
}

/// `λu v w. u [(v [w!])!]`
pub fn unfold_step() -> Term {
    fixed("\\u. \\v. \\w. u [(v [w!])!]")
}

/// `Θ [F₁; F₂!]`, the fixpoint whose unfoldings are `B₁ + B₂ + ⋯`.
pub fn term_a() -> Term {
    Term::app(
        theta(),
        Bag::new(vec![unfold_stop()], FormalSum::single(unfold_step())),
    )
}

fn binders(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|k| format!("{prefix}{k}")).collect()
}

/// `f [a₁!] ⋯ [aₙ!]`
fn banged_chain(f: Term, args: &[String]) -> Term {
    args.iter()
        .fold(f, |acc, a| Term::app(acc, Bag::banged(Term::var(a))))
}

/// `Aᵢ = λx₁ ⋯ x_{i+1}. A [(x₁ [x₂!] ⋯ [x_{i+1}!])!]`
pub fn term_a_i(i: usize) -> Term {
    let xs = binders("x", 1..=i + 1);
    let chain = banged_chain(Term::var(&xs[0]), &xs[1..]);
    Term::abs_many(
        xs.iter().map(String::as_str),
        Term::app(term_a(), Bag::banged(chain)),
    )
}

/// `Bₙ = λu₁ ⋯ uₙ w. w [(I [u₁!] ⋯ [uₙ!])!]`
pub fn term_b_n(n: usize) -> Result<Term, CombinatorError> {
    if n == 0 {
        return Err(CombinatorError::IndexOutOfRange {
            name: "B_n",
            index: n,
            min: 1,
        });
    }
    let us = binders("u", 1..=n);
    let chain = banged_chain(identity(), &us);
    let body = Term::app(Term::var("w"), Bag::banged(chain));
    Ok(Term::abs_many(
        us.iter().map(String::as_str).chain(["w"]),
        body,
    ))
}

/// Resolves a built-in name: `I`, `A`, `A_i:<i>`, `B_n:<n>`, `eps0`, `theta`.
pub fn named(name: &str) -> Result<Term, CombinatorError> {
    let index = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| CombinatorError::UnknownName(name.to_string()))
    };
    match name {
        "I" => Ok(identity()),
        "A" => Ok(term_a()),
        "eps0" => Ok(eps0()),
        "theta" => Ok(theta()),
        _ => {
            if let Some(i) = name.strip_prefix("A_i:") {
                Ok(term_a_i(index(i)?))
            } else if let Some(n) = name.strip_prefix("B_n:") {
                term_b_n(index(n)?)
            } else {
                Err(CombinatorError::UnknownName(name.to_string()))
            }
        }
    }
}

/// True when `t` is `λx. target [x!]` with `x` not free in `target`.
pub fn eta_contracts_to(t: &Term, target: &Term) -> bool {
    let Term::Abs(x, body) = t else { return false };
    let Term::App(f, bag) = &**body else { return false };
    bag.linear().is_empty()
        && bag.banged_sum().len() == 1
        && matches!(&bag.banged_sum().items()[0], Term::Var(y) if y == x)
        && !f.free_vars().contains(x)
        && alpha_eq(&**f, target)
}

/// Normal forms of `a` and `b` agree, both computed within `fuel` steps.
fn same_normal_form(a: &Term, b: &Term, fuel: usize) -> Option<usize> {
    let na = full_normalize(&FormalSum::single(a.clone()), Strategy::OuterHeadFirst, fuel);
    let nb = full_normalize(&FormalSum::single(b.clone()), Strategy::OuterHeadFirst, fuel);
    match (na.normal, nb.normal) {
        (Some(x), Some(y)) if x.key() == y.key() => Some(na.steps + nb.steps),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct Match {
    pub summand: Term,
    /// Outer-head steps from the start along this summand's lineage.
    pub depth: usize,
    /// Steps of auxiliary normalization needed to identify it (0 for alpha-equality).
    pub aux_steps: usize,
}

impl ToSexp for Match {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "match",
            [
                Sexp::field("depth", Sexp::int(self.depth as i128)),
                Sexp::field("aux-steps", Sexp::int(self.aux_steps as i128)),
                Sexp::field("summand", Sexp::str(self.summand.to_string())),
            ],
        )
    }
}

#[derive(Clone, Debug)]
pub struct Lemma3Report {
    pub i: usize,
    pub fuel: usize,
    pub passed: bool,
    pub fuel_exhausted: bool,
    pub steps: usize,
    pub next: Option<Match>,
    pub stop: Option<Match>,
    /// Summands neither matched nor normal, left when the search ended.
    pub leftovers: Vec<Term>,
    /// Normal summands that match neither target.
    pub stray_normal: Vec<Term>,
}

impl ToSexp for Lemma3Report {
    fn to_sexp(&self) -> Sexp {
        let opt = |m: &Option<Match>| m.as_ref().map_or(Sexp::atom("none"), ToSexp::to_sexp);
        Sexp::tagged(
            "lemma3",
            [
                Sexp::field("i", Sexp::int(self.i as i128)),
                Sexp::field("fuel", Sexp::int(self.fuel as i128)),
                Sexp::field("passed", Sexp::bool(self.passed)),
                Sexp::field("fuel-exhausted", Sexp::bool(self.fuel_exhausted)),
                Sexp::field("steps", Sexp::int(self.steps as i128)),
                Sexp::field("a-next", opt(&self.next)),
                Sexp::field("b-next", opt(&self.stop)),
                Sexp::field(
                    "leftovers",
                    Sexp::list(self.leftovers.iter().map(|t| Sexp::str(t.to_string()))),
                ),
                Sexp::field(
                    "stray-normal",
                    Sexp::list(self.stray_normal.iter().map(|t| Sexp::str(t.to_string()))),
                ),
            ],
        )
    }
}

/// Reduces `Aᵢ` until the sum contains both `A_{i+1}` (up to alpha) and
/// `B_{i+1}` (up to alpha, or after normalizing both within `fuel` steps).
/// Summands matching a target are not reduced further.
pub fn check_lemma3_step(i: usize, fuel: usize) -> Lemma3Report {
    let a_next = term_a_i(i + 1);
    let b_next = term_b_n(i + 1).expect("index is at least one");
    let mut report = Lemma3Report {
        i,
        fuel,
        passed: false,
        fuel_exhausted: false,
        steps: 0,
        next: None,
        stop: None,
        leftovers: Vec::new(),
        stray_normal: Vec::new(),
    };
    let mut queue: VecDeque<(Term, usize)> = VecDeque::from([(term_a_i(i), 0)]);
    let mut seen = BTreeSet::new();
    while let Some((t, depth)) = queue.pop_front() {
        if report.next.is_none() && alpha_eq(&t, &a_next) {
            report.next = Some(Match {
                summand: t,
                depth,
                aux_steps: 0,
            });
        } else if report.stop.is_none() && t.is_onf() {
            let aux = if alpha_eq(&t, &b_next) {
                Some(0)
            } else {
                same_normal_form(&t, &b_next, fuel)
            };
            match aux {
                Some(aux_steps) => {
                    report.stop = Some(Match {
                        summand: t,
                        depth,
                        aux_steps,
                    })
                }
                None => report.stray_normal.push(t),
            }
        } else if t.is_onf() {
            report.stray_normal.push(t);
        } else if report.steps == fuel {
            report.fuel_exhausted = true;
            report.leftovers.push(t);
            report.leftovers.extend(queue.drain(..).map(|(t, _)| t));
            break;
        } else if let Step::Reduced { result, .. } = outer_head_step(&t) {
            report.steps += 1;
            for r in result {
                if seen.insert(r.key()) {
                    queue.push_back((r, depth + 1));
                }
            }
        }
        if report.next.is_some() && report.stop.is_some() {
            report.leftovers.extend(queue.drain(..).map(|(t, _)| t));
            break;
        }
    }
    report.passed = report.next.is_some() && report.stop.is_some();
    report
}

/// `τ(M [ε₀!])`
pub fn probe_with_eps0(m: Term) -> Test {
    Test::tau(Term::app(m, Bag::banged(eps0())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueVerdict {
    /// The summand reduces to the empty sum.
    TriviallyDivergent,
    Converges,
    Unknown,
}

impl ResidueVerdict {
    fn name(self) -> &'static str {
        match self {
            ResidueVerdict::TriviallyDivergent => "trivially-divergent",
            ResidueVerdict::Converges => "converges",
            ResidueVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Residue {
    pub summand: Test,
    pub verdict: ResidueVerdict,
}

#[derive(Clone, Debug)]
pub struct Lemma5Report {
    pub i: usize,
    pub fuel: usize,
    pub passed: bool,
    pub failure: Option<String>,
    /// Length of the single-summand reduction chain of `τ(A_{i+1} [ε₀!])`.
    pub chain: usize,
    /// Common reduct: steps from `τ(Aᵢ [ε₀!])` and from `τ(A_{i+1} [ε₀!])`.
    pub meet: Option<(usize, usize)>,
    pub common: Option<Test>,
    pub residues: Vec<Residue>,
    /// Summands that vanished while searching for the common reduct.
    pub annihilated: usize,
    pub steps: usize,
}

impl ToSexp for Lemma5Report {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "lemma5",
            [
                Sexp::field("i", Sexp::int(self.i as i128)),
                Sexp::field("fuel", Sexp::int(self.fuel as i128)),
                Sexp::field("passed", Sexp::bool(self.passed)),
                Sexp::field(
                    "failure",
                    self.failure.as_ref().map_or(Sexp::atom("none"), Sexp::str),
                ),
                Sexp::field("chain", Sexp::int(self.chain as i128)),
                Sexp::field(
                    "meet",
                    self.meet.map_or(Sexp::atom("none"), |(d, j)| {
                        Sexp::list([Sexp::int(d as i128), Sexp::int(j as i128)])
                    }),
                ),
                Sexp::field(
                    "common",
                    self.common
                        .as_ref()
                        .map_or(Sexp::atom("none"), |q| Sexp::str(q.to_string())),
                ),
                Sexp::field(
                    "residues",
                    Sexp::list(self.residues.iter().map(|r| {
                        Sexp::list([Sexp::atom(r.verdict.name()), Sexp::str(r.summand.to_string())])
                    })),
                ),
                Sexp::field("annihilated", Sexp::int(self.annihilated as i128)),
                Sexp::field("steps", Sexp::int(self.steps as i128)),
            ],
        )
    }
}

/// The coinductive step for `X = τ(Aᵢ [ε₀!])` and `Y = τ(A_{i+1} [ε₀!])`.
///
/// `Y` reduces through single summands `y₀, y₁, …`. The check passes when
/// `X` reaches some `yⱼ` along a lineage of `d > j` steps while never
/// producing a normal summand, and every other summand of the sum reduces to
/// `0`. Then `X` diverges whenever `Y` does, and `Y`'s reduction is a proper
/// suffix of `X`'s, which is what makes the coinduction productive.
pub fn check_lemma5_certificate(i: usize, fuel: usize) -> Lemma5Report {
    let mut report = Lemma5Report {
        i,
        fuel,
        passed: false,
        failure: None,
        chain: 0,
        meet: None,
        common: None,
        residues: Vec::new(),
        annihilated: 0,
        steps: 0,
    };
    let fail = |mut r: Lemma5Report, why: String| {
        r.failure = Some(why);
        r
    };

    let mut chain: BTreeMap<String, usize> = BTreeMap::new();
    let mut y = probe_with_eps0(term_a_i(i + 1));
    for j in 0..=fuel {
        chain.entry(y.key()).or_insert(j);
        if j == fuel {
            break;
        }
        match outer_head_step(&y) {
            Step::Reduced { result, .. } if result.len() == 1 && !result.items()[0].is_onf() => {
                y = result.into_items().pop().expect("one summand");
            }
            _ => break,
        }
    }
    report.chain = chain.len();

    let mut queue: VecDeque<(Test, usize)> =
        VecDeque::from([(probe_with_eps0(term_a_i(i)), 0)]);
    let mut found = None;
    while let Some((x, depth)) = queue.pop_front() {
        if let Some(&j) = chain.get(&x.key()) {
            if depth > j {
                found = Some((x, depth, j));
                break;
            }
        }
        if x.is_onf() {
            return fail(report, format!("normal summand reached: {x}"));
        }
        if report.steps == fuel {
            return fail(report, "fuel exhausted before reaching a common reduct".into());
        }
        if let Step::Reduced { result, .. } = outer_head_step(&x) {
            report.steps += 1;
            if result.is_zero() {
                report.annihilated += 1;
            }
            for r in result {
                queue.push_back((r, depth + 1));
            }
        }
    }
    let Some((common, d, j)) = found else {
        return fail(report, "sum vanished without a common reduct".into());
    };
    report.meet = Some((d, j));
    report.common = Some(common);

    for (x, _) in queue {
        let verdict = match reduce(&FormalSum::single(x.clone()), fuel) {
            Outcome::Zero { .. } => ResidueVerdict::TriviallyDivergent,
            Outcome::Converged { .. } => ResidueVerdict::Converges,
            Outcome::FuelExhausted { .. } => ResidueVerdict::Unknown,
        };
        report.residues.push(Residue { summand: x, verdict });
    }
    if let Some(r) = report
        .residues
        .iter()
        .find(|r| r.verdict != ResidueVerdict::TriviallyDivergent)
    {
        let why = format!("residue {} is {}", r.summand, r.verdict.name());
        return fail(report, why);
    }
    report.passed = true;
    report
}

/// Tests whose divergence is established by certificates.
#[derive(Clone, Debug, Default)]
pub struct DivergenceRegistry {
    entries: BTreeMap<String, String>,
}

impl DivergenceRegistry {
    /// Runs the certificate for every `i` in `0..=max_i`. When all pass,
    /// registers `τ(Aᵢ [ε₀!])` for those `i` together with `τ(A [ε₀!])`,
    /// the one-step beta reduct of `τ(A₀ [ε₀!])`.
    pub fn certify(max_i: usize, fuel: usize) -> (DivergenceRegistry, Vec<Lemma5Report>) {
        let reports: Vec<Lemma5Report> = (0..=max_i)
            .map(|i| check_lemma5_certificate(i, fuel))
            .collect();
        let mut reg = DivergenceRegistry::default();
        if reports.iter().all(|r| r.passed) {
            for i in 0..=max_i {
                reg.entries.insert(
                    probe_with_eps0(term_a_i(i)).key(),
                    format!("tau(A_{i} [eps0!])"),
                );
            }
            reg.entries
                .insert(probe_with_eps0(term_a()).key(), "tau(A [eps0!])".into());
        }
        (reg, reports)
    }

    pub fn lookup<T: Node>(&self, e: &T) -> Option<&str> {
        self.entries.get(&e.key()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// All binder names used by the built-ins, handy for generators that must
/// avoid them.
pub fn builtin_names() -> BTreeSet<Name> {
    let mut out = term_a().names();
    out.extend(identity().names());
    out
}
