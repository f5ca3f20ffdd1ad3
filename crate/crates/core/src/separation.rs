//! Contexts with a hole, observational probing of two closed terms, and the
//! end-to-end counter-example pipeline.

use std::fmt;
use std::ops::RangeInclusive;
use std::time::Instant;

use thiserror::Error;

use crate::combinators::{
    check_lemma3_step, eps0, identity, probe_with_eps0, term_a, DivergenceRegistry, Lemma3Report,
    Lemma5Report,
};
use crate::gen::{Gen, GenConfig};
use crate::minf::{separating_element, Separation, Side, Universe};
use crate::rewriting::{reduce, Outcome};
use crate::sexp::{Sexp, ToSexp};
use crate::syntax::{print_raw, sum_normalize, Bag, FormalSum, Name, Node, Normal, Raw, RawBag, Term};

/// The name standing for the hole. It cannot be written in source text.
pub const HOLE: &str = "⟦.⟧";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeparationError {
    #[error("probed terms must be closed; {0} has free variables")]
    OpenTerm(String),
    #[error("a context needs exactly one hole, found {0}")]
    HoleCount(usize),
}

/// A term or test with exactly one hole. Plugging does not rename, so the
/// plugged term may be captured by binders around the hole.
#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    raw: Raw,
}

fn count_holes(r: &Raw) -> usize {
    match r {
        Raw::Var(x) => usize::from(x.as_str() == HOLE),
        Raw::Abs(_, b) | Raw::TauBar(b) | Raw::Tau(b) => count_holes(b),
        Raw::App(f, bag) => {
            count_holes(f) + bag.linear.iter().chain(&bag.banged).map(count_holes).sum::<usize>()
        }
        Raw::Par(l, r) => count_holes(l) + count_holes(r),
        Raw::Eps => 0,
        Raw::Sum(items) => items.iter().map(count_holes).sum(),
    }
}

fn fill(r: &Raw, m: &Raw) -> Raw {
    let b = |x: &Raw| Box::new(fill(x, m));
    match r {
        Raw::Var(x) if x.as_str() == HOLE => m.clone(),
        Raw::Var(_) | Raw::Eps => r.clone(),
        Raw::Abs(x, body) => Raw::Abs(x.clone(), b(body)),
        Raw::TauBar(q) => Raw::TauBar(b(q)),
        Raw::Tau(t) => Raw::Tau(b(t)),
        Raw::Par(l, rr) => Raw::Par(b(l), b(rr)),
        Raw::App(f, bag) => Raw::App(
            b(f),
            RawBag {
                linear: bag.linear.iter().map(|x| fill(x, m)).collect(),
                banged: bag.banged.iter().map(|x| fill(x, m)).collect(),
            },
        ),
        Raw::Sum(items) => Raw::Sum(items.iter().map(|x| fill(x, m)).collect()),
    }
}

impl Context {
    pub fn hole() -> Context {
        Context {
            raw: Raw::Var(Name::new(HOLE)),
        }
    }

    pub fn from_raw(raw: Raw) -> Result<Context, SeparationError> {
        match count_holes(&raw) {
            1 => Ok(Context { raw }),
            n => Err(SeparationError::HoleCount(n)),
        }
    }

    /// `τ(⟦.⟧ [ε₀!])`
    pub fn tau_eps0() -> Context {
        let hole = Term::var(HOLE);
        Context {
            raw: Raw::from(&probe_with_eps0(hole)),
        }
    }

    pub fn raw(&self) -> &Raw {
        &self.raw
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(&self.raw))
    }
}

pub fn plug(c: &Context, m: &Term) -> Normal {
    let filled = fill(&c.raw, &Raw::from(m));
    sum_normalize(&filled).expect("plugging a term into a context keeps sorts consistent")
}

/// `⟦.⟧ B₁ ⋯ Bₖ`
pub fn applicative_context(bags: Vec<Bag>) -> Context {
    let raw = bags.iter().fold(Raw::Var(Name::new(HOLE)), |f, bag| {
        Raw::App(Box::new(f), RawBag::from(bag))
    });
    Context { raw }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    Yes(usize),
    No,
    /// Fuel ran out on a summand set covered by divergence certificates.
    CertifiedDivergent(String),
    Unknown,
}

impl ProbeVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, ProbeVerdict::Yes(_))
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ProbeVerdict::No | ProbeVerdict::CertifiedDivergent(_))
    }
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeVerdict::Yes(n) => write!(f, "Yes({n})"),
            ProbeVerdict::No => f.write_str("No"),
            ProbeVerdict::CertifiedDivergent(c) => write!(f, "Certified({c})"),
            ProbeVerdict::Unknown => f.write_str("Unknown"),
        }
    }
}

impl ToSexp for ProbeVerdict {
    fn to_sexp(&self) -> Sexp {
        match self {
            ProbeVerdict::Yes(n) => Sexp::tagged("yes", [Sexp::int(*n as i128)]),
            ProbeVerdict::No => Sexp::atom("no"),
            ProbeVerdict::CertifiedDivergent(c) => Sexp::tagged("certified", [Sexp::str(c.clone())]),
            ProbeVerdict::Unknown => Sexp::atom("unknown"),
        }
    }
}

fn verdict_of<T: crate::rewriting::Reducible>(
    e: &FormalSum<T>,
    fuel: usize,
    registry: &DivergenceRegistry,
) -> ProbeVerdict {
    match reduce(e, fuel) {
        Outcome::Converged { steps, .. } => ProbeVerdict::Yes(steps),
        Outcome::Zero { .. } => ProbeVerdict::No,
        Outcome::FuelExhausted { .. } => {
            let certs: Option<Vec<&str>> = e.iter().map(|t| registry.lookup(t)).collect();
            match certs {
                Some(c) if !c.is_empty() => ProbeVerdict::CertifiedDivergent(c.join(" + ")),
                _ => ProbeVerdict::Unknown,
            }
        }
    }
}

/// Convergence of a plugged context. Only divergence certified up front
/// counts as a negative answer when fuel runs out.
pub fn probe(c: &Context, m: &Term, fuel: usize, registry: &DivergenceRegistry) -> ProbeVerdict {
    match plug(c, m) {
        Normal::Terms(s) => verdict_of(&s, fuel, registry),
        Normal::Tests(s) => verdict_of(&s, fuel, registry),
    }
}

#[derive(Clone, Debug)]
pub struct Probe {
    pub context: Context,
    pub left: ProbeVerdict,
    pub right: ProbeVerdict,
}

impl Probe {
    pub fn separates(&self) -> bool {
        self.left.is_yes() && self.right.is_divergent()
    }
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub left: Term,
    pub right: Term,
    pub probes: Vec<Probe>,
    /// Index of the first probe where the left side converges and the right
    /// side does not.
    pub separated_by: Option<usize>,
}

impl SeparationReport {
    pub fn verdict(&self) -> &'static str {
        if self.separated_by.is_some() {
            "Separated"
        } else {
            "NotSeparatedWithinBudget"
        }
    }
}

impl ToSexp for SeparationReport {
    fn to_sexp(&self) -> Sexp {
        let verdict = match self.separated_by {
            Some(i) => Sexp::tagged("separated", [Sexp::str(self.probes[i].context.to_string())]),
            None => Sexp::atom("not-separated-within-budget"),
        };
        Sexp::tagged(
            "probe-preorder",
            [
                Sexp::field("left", Sexp::str(self.left.to_string())),
                Sexp::field("right", Sexp::str(self.right.to_string())),
                Sexp::field("verdict", verdict),
                Sexp::field(
                    "probes",
                    Sexp::list(self.probes.iter().map(|p| {
                        Sexp::list([Sexp::str(p.context.to_string()), p.left.to_sexp(), p.right.to_sexp()])
                    })),
                ),
            ],
        )
    }
}

/// Looks for a context in which `m` converges and `n` provably does not.
pub fn probe_preorder(
    m: &Term,
    n: &Term,
    contexts: &[Context],
    fuel: usize,
    registry: &DivergenceRegistry,
) -> Result<SeparationReport, SeparationError> {
    for t in [m, n] {
        if !t.is_closed() {
            return Err(SeparationError::OpenTerm(t.to_string()));
        }
    }
    let probes: Vec<Probe> = contexts
        .iter()
        .map(|c| Probe {
            context: c.clone(),
            left: probe(c, m, fuel, registry),
            right: probe(c, n, fuel, registry),
        })
        .collect();
    let separated_by = probes.iter().position(Probe::separates);
    Ok(SeparationReport {
        left: m.clone(),
        right: n.clone(),
        probes,
        separated_by,
    })
}

/// Closed applicative contexts whose bags hold one banged term and nothing
/// linear. Arguments are `I`, `λxy.x [y!]`, or random closed terms of size ≤ 6.
pub fn lemma4_corpus(seed: u64, count: usize) -> Vec<Context> {
    let mut gen = Gen::new(
        seed,
        GenConfig {
            max_size: 6,
            closed: true,
            sums: false,
            tests: false,
        },
    );
    let apply = Term::abs_many(["x", "y"], Term::app_banged(Term::var("x"), [Term::var("y")]));
    (0..count)
        .map(|_| {
            let len = rand::Rng::gen_range(gen.rng(), 1..=4usize);
            let bags = (0..len)
                .map(|_| {
                    let arg = match rand::Rng::gen_range(gen.rng(), 0..4) {
                        0 => identity(),
                        1 => apply.clone(),
                        _ => gen.term(),
                    };
                    Bag::banged(arg)
                })
                .collect();
            applicative_context(bags)
        })
        .collect()
}

/// Contexts with a linear argument, outside the banged-only fragment.
pub fn linear_argument_contexts() -> Vec<Context> {
    let i = identity();
    vec![
        applicative_context(vec![Bag::new(vec![i.clone()], FormalSum::single(i.clone()))]),
        applicative_context(vec![
            Bag::new(vec![i.clone()], FormalSum::single(i.clone())),
            Bag::banged(i.clone()),
        ]),
        applicative_context(vec![Bag::banged(i.clone()), Bag::new(vec![i.clone()], FormalSum::zero())]),
    ]
}

#[derive(Clone, Debug)]
pub struct ReportConfig {
    /// Reduction budget for every engine run.
    pub fuel: usize,
    pub seed: u64,
    pub corpus_size: usize,
    /// Lemma checks run for `i = 0..=max_i`.
    pub max_i: usize,
    pub depth: usize,
    pub width: usize,
    pub unfold: usize,
    /// Node budget of the derivation search.
    pub search_fuel: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            fuel: 1000,
            seed: 0,
            corpus_size: 256,
            max_i: 4,
            depth: 3,
            width: 2,
            unfold: 3,
            search_fuel: 100_000,
        }
    }
}

impl ToSexp for ReportConfig {
    fn to_sexp(&self) -> Sexp {
        let n = |k: &str, v: usize| Sexp::field(k, Sexp::int(v as i128));
        Sexp::tagged(
            "config",
            [
                n("fuel", self.fuel),
                Sexp::field("seed", Sexp::int(self.seed)),
                n("corpus-size", self.corpus_size),
                n("max-i", self.max_i),
                n("depth", self.depth),
                n("width", self.width),
                n("unfold", self.unfold),
                n("search-fuel", self.search_fuel),
            ],
        )
    }
}

/// One line of the human summary.
#[derive(Clone, Debug)]
pub struct Row {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub number: usize,
    pub name: &'static str,
    pub passed: bool,
    pub rows: Vec<Row>,
    pub data: Sexp,
    pub millis: u128,
}

impl ToSexp for Stage {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "stage",
            [
                Sexp::int(self.number as i128),
                Sexp::atom(self.name),
                Sexp::field("passed", Sexp::bool(self.passed)),
                self.data.clone(),
            ],
        )
    }
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub config: ReportConfig,
    pub stages: Vec<Stage>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }

    pub fn failed_stage(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| !s.passed)
    }

    /// Fixed-width table, one row per individual check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<6} {:<34} {:<5} {}\n", "stage", "check", "ok", "detail"));
        for s in &self.stages {
            for r in &s.rows {
                out.push_str(&format!(
                    "{:<6} {:<34} {:<5} {}\n",
                    s.number,
                    r.check,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                ));
            }
        }
        match self.failed_stage() {
            None => out.push_str("result: all stages passed\n"),
            Some(s) => out.push_str(&format!("result: failed at stage {} ({})\n", s.number, s.name)),
        }
        out
    }
}

impl ToSexp for CounterexampleReport {
    /// Timings are left out so that the document is reproducible.
    fn to_sexp(&self) -> Sexp {
        let result = match self.failed_stage() {
            None => Sexp::atom("passed"),
            Some(s) => Sexp::tagged("failed", [Sexp::int(s.number as i128), Sexp::atom(s.name)]),
        };
        let mut items = vec![self.config.to_sexp(), Sexp::field("result", result)];
        items.extend(self.stages.iter().map(ToSexp::to_sexp));
        Sexp::tagged("counterexample", items)
    }
}

/// Stage 1: `Aᵢ` reduces to a sum containing `A_{i+1}` and `B_{i+1}`.
pub fn stage_unfolding(cfg: &ReportConfig, range: RangeInclusive<usize>) -> Stage {
    let reports: Vec<Lemma3Report> = range.map(|i| check_lemma3_step(i, cfg.fuel)).collect();
    let rows = reports
        .iter()
        .map(|r| Row {
            check: format!("A_{} -> A_{} + B_{}", r.i, r.i + 1, r.i + 1),
            passed: r.passed,
            detail: if r.fuel_exhausted {
                format!("FuelExhausted after {} steps", r.steps)
            } else {
                format!("{} steps", r.steps)
            },
        })
        .collect();
    Stage {
        number: 1,
        name: "unfolding",
        passed: reports.iter().all(|r| r.passed),
        rows,
        data: Sexp::list(reports.iter().map(ToSexp::to_sexp)),
        millis: 0,
    }
}

/// Stage 2: no sampled context makes `I` converge and `A` diverge.
pub fn stage_sampling(cfg: &ReportConfig, registry: &DivergenceRegistry) -> Stage {
    let mut contexts = lemma4_corpus(cfg.seed, cfg.corpus_size);
    let banged = contexts.len();
    contexts.extend(linear_argument_contexts());
    let report = probe_preorder(&identity(), &term_a(), &contexts, cfg.fuel, registry)
        .expect("I and A are closed");
    let count = |f: &dyn Fn(&Probe) -> bool| report.probes.iter().filter(|p| f(p)).count();
    let violations = count(&|p| p.separates());
    let both_yes = count(&|p| p.left.is_yes() && p.right.is_yes());
    let unknown = count(&|p| p.left.is_yes() && p.right == ProbeVerdict::Unknown);
    let left_no = count(&|p| !p.left.is_yes());
    let rows = vec![Row {
        check: "C[I] converges => C[A] converges".into(),
        passed: violations == 0,
        detail: format!(
            "{} contexts ({banged} banged-only), both Yes {both_yes}, A Unknown {unknown}, I not Yes {left_no}, violations {violations}",
            contexts.len()
        ),
    }];
    Stage {
        number: 2,
        name: "context-sampling",
        passed: violations == 0,
        rows,
        data: Sexp::tagged(
            "sampling",
            [
                Sexp::field("seed", Sexp::int(cfg.seed)),
                Sexp::field("contexts", Sexp::int(contexts.len() as i128)),
                Sexp::field("banged-only", Sexp::int(banged as i128)),
                Sexp::field("both-yes", Sexp::int(both_yes as i128)),
                Sexp::field("right-unknown", Sexp::int(unknown as i128)),
                Sexp::field("left-not-yes", Sexp::int(left_no as i128)),
                Sexp::field("violations", Sexp::int(violations as i128)),
                report.to_sexp(),
            ],
        ),
        millis: 0,
    }
}

/// Stage 3: `τ(⟦.⟧ [ε₀!])` separates `I` from `A`.
pub fn stage_test_separation(cfg: &ReportConfig, registry: &DivergenceRegistry, certs: &[Lemma5Report]) -> Stage {
    let mut rows = Vec::new();
    let i_side = reduce(&FormalSum::single(probe_with_eps0(identity())), cfg.fuel);
    rows.push(Row {
        check: "tau(I [eps0!]) converges".into(),
        passed: matches!(i_side, Outcome::Converged { .. }),
        detail: format!("{} after {} steps", i_side.status(), i_side.steps()),
    });
    for c in certs {
        rows.push(Row {
            check: format!("divergence certificate i={}", c.i),
            passed: c.passed,
            detail: match (&c.failure, c.meet) {
                (Some(f), _) => f.clone(),
                (None, Some((d, j))) => format!("meets chain at depth {d} / {j}, {} steps", c.steps),
                (None, None) => format!("{} steps", c.steps),
            },
        });
    }
    let sep = probe_preorder(&identity(), &term_a(), &[Context::tau_eps0()], cfg.fuel, registry)
        .expect("I and A are closed");
    rows.push(Row {
        check: "probe tau([.] [eps0!]) separates".into(),
        passed: sep.separated_by.is_some(),
        detail: format!("I {} / A {}", sep.probes[0].left, sep.probes[0].right),
    });
    Stage {
        number: 3,
        name: "test-separation",
        passed: rows.iter().all(|r| r.passed),
        rows,
        data: Sexp::tagged(
            "test-separation",
            [
                Sexp::field("eps0", Sexp::str(eps0().to_string())),
                Sexp::field("identity-side", i_side.to_sexp()),
                Sexp::field("certificates", Sexp::list(certs.iter().map(ToSexp::to_sexp))),
                sep.to_sexp(),
            ],
        ),
        millis: 0,
    }
}

pub fn separation_sexp(s: &Option<Separation>) -> Sexp {
    match s {
        None => Sexp::atom("none"),
        Some(s) => Sexp::tagged(
            "witness",
            [
                Sexp::str(s.elem.to_string()),
                Sexp::atom(s.side.name()),
                s.derivation.to_sexp(),
            ],
        ),
    }
}

/// Stage 4: separating elements of the model in both directions.
pub fn stage_semantic(cfg: &ReportConfig) -> Stage {
    let u = Universe::enumerate(cfg.depth, cfg.width);
    let (i, a) = (identity(), term_a());
    let forward = separating_element(&i, &a, &u, cfg.search_fuel, cfg.unfold);
    let backward = separating_element(&a, &i, &u, cfg.search_fuel, cfg.unfold);
    let row = |check: &str, s: &Option<Separation>| Row {
        check: check.into(),
        passed: s.is_some(),
        detail: match s {
            Some(s) => format!("{} ({})", s.elem, s.side.name()),
            None => "no witness".into(),
        },
    };
    let rows = vec![row("element of [[I]] not in [[A]]", &forward), row("element of [[A]] not in [[I]]", &backward)];
    let directed = matches!(&forward, Some(s) if s.side == Side::InLeftNotRight);
    Stage {
        number: 4,
        name: "semantic-separation",
        passed: forward.is_some() && backward.is_some() && directed,
        rows,
        data: Sexp::tagged(
            "semantic-separation",
            [
                Sexp::field("universe", Sexp::list([Sexp::int(cfg.depth as i128), Sexp::int(cfg.width as i128)])),
                Sexp::field("universe-size", Sexp::int(u.len() as i128)),
                Sexp::field("unfold", Sexp::int(cfg.unfold as i128)),
                Sexp::field("i-vs-a", separation_sexp(&forward)),
                Sexp::field("a-vs-i", separation_sexp(&backward)),
            ],
        ),
        millis: 0,
    }
}

/// Runs the four stages in order: unfolding of `A`, context sampling in the
/// test-free fragment, separation by a test context, and separation in the
/// model. Every stage runs even when an earlier one fails.
pub fn counterexample_report(cfg: &ReportConfig) -> CounterexampleReport {
    let timed = |f: &dyn Fn() -> Stage| {
        let t = Instant::now();
        let mut s = f();
        s.millis = t.elapsed().as_millis();
        s
    };
    let (registry, certs) = DivergenceRegistry::certify(cfg.max_i, cfg.fuel);
    let stages = vec![
        timed(&|| stage_unfolding(cfg, 0..=cfg.max_i)),
        timed(&|| stage_sampling(cfg, &registry)),
        timed(&|| stage_test_separation(cfg, &registry, &certs)),
        timed(&|| stage_semantic(cfg)),
    ];
    CounterexampleReport {
        config: cfg.clone(),
        stages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Test};

    #[test]
    fn plug_examples() {
        let p = parse_term("\\y. y").unwrap();
        let c = applicative_context(vec![Bag::banged(p.clone())]);
        let Normal::Terms(s) = plug(&c, &identity()) else { panic!() };
        assert_eq!(s.to_string(), "(\\x. x) [\\y. y!]");

        let Normal::Tests(s) = plug(&Context::tau_eps0(), &term_a()) else { panic!() };
        assert_eq!(s.key(), FormalSum::single(probe_with_eps0(term_a())).key());
    }

    #[test]
    fn plug_captures() {
        let c = Context::from_raw(Raw::Abs(Name::new("x"), Box::new(Raw::Var(Name::new(HOLE))))).unwrap();
        let Normal::Terms(s) = plug(&c, &Term::var("x")) else { panic!() };
        assert_eq!(s.to_string(), "\\x. x");
    }

    #[test]
    fn applicative_context_shapes() {
        assert_eq!(applicative_context(vec![]), Context::hole());
        let n = Term::var("n");
        let c = applicative_context(vec![
            Bag::new(vec![n.clone()], FormalSum::single(Term::var("p"))),
            Bag::banged(Term::var("q")),
        ]);
        assert_eq!(c.to_string(), "⟦.⟧ [n; p!] [q!]");
    }

    #[test]
    fn hole_count_is_checked() {
        assert_eq!(Context::from_raw(Raw::Eps), Err(SeparationError::HoleCount(0)));
        let two = Raw::Par(
            Box::new(Raw::Tau(Box::new(Raw::Var(Name::new(HOLE))))),
            Box::new(Raw::Tau(Box::new(Raw::Var(Name::new(HOLE))))),
        );
        assert_eq!(Context::from_raw(two), Err(SeparationError::HoleCount(2)));
    }

    #[test]
    fn open_terms_are_rejected() {
        let r = probe_preorder(&Term::var("x"), &identity(), &[], 10, &DivergenceRegistry::default());
        assert!(matches!(r, Err(SeparationError::OpenTerm(_))));
    }

    #[test]
    fn unknown_never_separates() {
        // without certificates the A side of the test probe is only Unknown
        let r = probe_preorder(&identity(), &term_a(), &[Context::tau_eps0()], 200, &DivergenceRegistry::default())
            .unwrap();
        assert_eq!(r.probes[0].right, ProbeVerdict::Unknown);
        assert!(r.separated_by.is_none());
    }

    #[test]
    fn reflexivity() {
        let ctxs = lemma4_corpus(3, 20);
        let r = probe_preorder(&identity(), &identity(), &ctxs, 200, &DivergenceRegistry::default()).unwrap();
        assert_eq!(r.verdict(), "NotSeparatedWithinBudget");
    }

    #[test]
    fn corpus_is_banged_only_and_closed() {
        let ctxs = lemma4_corpus(0, 50);
        assert_eq!(ctxs, lemma4_corpus(0, 50));
        for c in &ctxs {
            let Normal::Terms(s) = plug(c, &identity()) else { panic!() };
            let t = &s.items()[0];
            assert!(t.is_closed());
            let (_, bags) = t.spine();
            assert!((1..=4).contains(&bags.len()));
            assert!(bags.iter().all(|b| b.linear().is_empty() && b.banged_sum().len() == 1));
        }
    }

    #[test]
    fn zero_outcome_is_no() {
        let c = Context::from_raw(Raw::from(&Test::tau(Term::app(
            Term::var(HOLE),
            Bag::new(vec![identity()], FormalSum::zero()),
        ))))
        .unwrap();
        let v = probe(&c, &parse_term("\\x. \\y. y").unwrap(), 10, &DivergenceRegistry::default());
        assert_eq!(v, ProbeVerdict::No);
    }
}
