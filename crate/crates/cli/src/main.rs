use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resource_lambda::combinators::{named, DivergenceRegistry};
use resource_lambda::minf::{derivable, interp, render_multiset, separating_element, Derivability, Elem, Env, Universe};
use resource_lambda::relsem::check_laws;
use resource_lambda::rewriting::{reduce_traced, Outcome, Reducible, Reduction, Substitute};
use resource_lambda::separation::{
    counterexample_report, separation_sexp, stage_sampling, stage_test_separation, stage_unfolding, ReportConfig, Stage,
};
use resource_lambda::sexp::{Sexp, ToSexp};
use resource_lambda::syntax::{parse_normal, Bag, Expr, FormalSum, Name, Node, Normal, Term};

const EXIT_FAILED_CHECK: u8 = 3;
const EXIT_NO_WITNESS: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "reslab", version, about = "Resource lambda-calculus with tests: reduction, lemma checks, and bounded semantics")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct RunConfig {
    /// Rewriting step budget.
    #[arg(long, global = true, default_value_t = 1000)]
    fuel: usize,
    /// Depth bound of the element universe.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Multiset-size bound of the element universe.
    #[arg(long, global = true, default_value_t = 2)]
    width: usize,
    /// Number of unfoldings B_1 .. B_n standing for A in the model.
    #[arg(long, global = true, default_value_t = 3)]
    unfold: usize,
    /// Seed of the sampled context corpus and random relations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Print every rewriting step.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Sexp,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a term, test, or sum with the outer-head strategy.
    Reduce {
        /// Expression text; free occurrences of I, A, eps0 and theta denote the built-ins.
        text: Option<String>,
        /// Built-in term (I, A, eps0, theta, A_i:<i>, B_n:<n>) instead of text.
        #[arg(long)]
        term: Option<String>,
        /// Bags to apply, e.g. "[I!]"; built-in names inside are resolved.
        #[arg(long)]
        apply: Vec<String>,
    },
    /// Check the unfolding, sampling, or test-separation properties.
    Check {
        #[arg(value_enum)]
        lemma: Lemma,
        /// Inclusive index range, e.g. 0..4.
        #[arg(long, value_parser = parse_range, default_value = "0..4")]
        range: RangeInclusive<usize>,
    },
    /// Queries on the model over the bounded universe.
    Semantics {
        #[command(subcommand)]
        action: Semantics,
    },
    /// Run the four-stage counter-example pipeline.
    Counterexample,
    /// Check the categorical laws of the finite relational model.
    Laws {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        bang_cap: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lemma {
    Lemma3,
    #[value(name = "lemma4-sample")]
    Lemma4Sample,
    Lemma5,
}

#[derive(Subcommand)]
enum Semantics {
    /// Is the element in the interpretation of a closed term?
    Typecheck {
        text: Option<String>,
        #[arg(long)]
        term: Option<String>,
        /// Element such as "[*]::*"; omitted for tests.
        #[arg(long)]
        elem: Option<String>,
    },
    /// Enumerate the interpretation within the universe.
    Interp {
        text: Option<String>,
        #[arg(long)]
        term: Option<String>,
    },
    /// Find an element in one interpretation and not in the other.
    Separate {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|n| n..=n),
    }
}

/// Error carrying its exit status.
#[derive(Debug)]
struct Fail(u8, String);

fn usage(msg: impl ToString) -> Fail {
    Fail(EXIT_USAGE, msg.to_string())
}

/// Replaces free occurrences of built-in names (I, A, eps0, theta).
fn resolve_builtins<T: Substitute>(e: FormalSum<T>) -> FormalSum<T> {
    let mut e = e;
    for name in ["I", "A", "eps0", "theta"] {
        let x = Name::new(name);
        if e.free_vars().contains(&x) {
            let value = FormalSum::single(named(name).expect("built-in"));
            e = e.flat_map(|t| t.subst(&x, &value));
        }
    }
    e
}

/// A built-in name, or expression text whose free built-in names are resolved.
fn term_sum(s: &str) -> Result<FormalSum<Term>, Fail> {
    if let Ok(t) = named(s) {
        return Ok(FormalSum::single(t));
    }
    match parse_normal(s).map_err(usage)? {
        Normal::Terms(t) => Ok(resolve_builtins(t)),
        Normal::Tests(_) => Err(usage(format!("expected a term, found a test: {s}"))),
    }
}

fn single_term(s: &str) -> Result<Term, Fail> {
    let sum = term_sum(s)?;
    match sum.items() {
        [t] => Ok(t.clone()),
        _ => Err(usage(format!("expected a single term: {s}"))),
    }
}

fn pick<'a>(text: &'a Option<String>, term: &'a Option<String>) -> Result<&'a str, Fail> {
    match (text, term) {
        (Some(t), None) | (None, Some(t)) => Ok(t),
        (Some(_), Some(_)) => Err(usage("give either an expression or --term, not both")),
        (None, None) => Err(usage("missing expression (positional text or --term)")),
    }
}

fn parse_bag(s: &str) -> Result<Bag, Fail> {
    let probe = "__reslab_head";
    let t = match parse_normal(&format!("{probe} {s}")).map_err(usage)? {
        Normal::Terms(t) if t.len() == 1 => t.into_items().pop().expect("one summand"),
        _ => return Err(usage(format!("not a bag: {s}"))),
    };
    match t {
        Term::App(f, bag) if matches!(&*f, Term::Var(x) if x.as_str() == probe) => {
            let resolved = resolve_builtins(FormalSum::single(Term::App(f, bag)));
            match resolved.into_items().pop() {
                Some(Term::App(_, bag)) => Ok(*bag),
                _ => Err(usage(format!("not a bag: {s}"))),
            }
        }
        _ => Err(usage(format!("not a single bag: {s}"))),
    }
}

struct Output {
    text: String,
    code: u8,
}

fn config_sexp(c: &RunConfig) -> Sexp {
    let n = |k: &str, v: usize| Sexp::field(k, Sexp::int(v as i128));
    Sexp::tagged(
        "config",
        [
            n("fuel", c.fuel),
            n("depth", c.depth),
            n("width", c.width),
            n("unfold", c.unfold),
            Sexp::field("seed", Sexp::int(c.seed)),
        ],
    )
}

fn report_config(c: &RunConfig, max_i: usize) -> ReportConfig {
    ReportConfig {
        fuel: c.fuel,
        seed: c.seed,
        depth: c.depth,
        width: c.width,
        unfold: c.unfold,
        max_i,
        ..ReportConfig::default()
    }
}

fn reduce_output<T: Reducible>(c: &RunConfig, input: &FormalSum<T>) -> Output
where
    FormalSum<T>: ToSexp + std::fmt::Display,
{
    let r: Reduction<T> = reduce_traced(input, c.fuel, c.trace);
    let code = match r.outcome {
        Outcome::Converged { .. } => 0,
        Outcome::Zero { .. } => 1,
        Outcome::FuelExhausted { .. } => 2,
    };
    let text = match c.format {
        Format::Sexp => {
            let mut items = vec![
                config_sexp(c),
                Sexp::field("input", input.to_sexp()),
                Sexp::field("outcome", r.outcome.to_sexp()),
            ];
            if c.trace {
                items.push(Sexp::tagged("trace", r.trace.iter().map(ToSexp::to_sexp)));
            }
            let mut s = Sexp::tagged("reduce", items).pretty();
            s.push('\n');
            s
        }
        Format::Human => {
            let mut s = String::new();
            if c.trace {
                for line in r.trace_lines() {
                    let _ = writeln!(s, "{line}");
                }
            }
            let _ = writeln!(s, "input:   {input}");
            match &r.outcome {
                Outcome::Converged { witness, steps } => {
                    let _ = writeln!(s, "outcome: Converged after {steps} steps (fuel {})", c.fuel);
                    let _ = writeln!(s, "witness: {witness}");
                }
                Outcome::Zero { steps } => {
                    let _ = writeln!(s, "outcome: Zero after {steps} steps (fuel {})", c.fuel);
                }
                Outcome::FuelExhausted { frontier, steps } => {
                    let _ = writeln!(s, "outcome: FuelExhausted after {steps} steps (fuel {})", c.fuel);
                    let _ = writeln!(s, "frontier: {} summands", frontier.len());
                }
            }
            s
        }
    };
    Output { text, code }
}

fn cmd_reduce(c: &RunConfig, text: &Option<String>, term: &Option<String>, apply: &[String]) -> Result<Output, Fail> {
    let normal = match (text, term) {
        (_, Some(name)) if text.is_none() => {
            Normal::Terms(FormalSum::single(named(name).map_err(usage)?))
        }
        _ => match parse_normal(pick(text, term)?).map_err(usage)? {
            Normal::Terms(t) => Normal::Terms(resolve_builtins(t)),
            Normal::Tests(q) => Normal::Tests(resolve_builtins(q)),
        },
    };
    if apply.is_empty() {
        return Ok(match normal {
            Normal::Terms(t) => reduce_output(c, &t),
            Normal::Tests(q) => reduce_output(c, &q),
        });
    }
    let Normal::Terms(head) = normal else {
        return Err(usage("--apply needs a term"));
    };
    let bags = apply.iter().map(|b| parse_bag(b)).collect::<Result<Vec<_>, _>>()?;
    let applied = head.map(|t| bags.iter().fold(t, |f, b| Term::app(f, b.clone())));
    Ok(reduce_output(c, &applied))
}

fn stage_output(c: &RunConfig, tag: &str, stages: &[Stage]) -> Output {
    let passed = stages.iter().all(|s| s.passed);
    let text = match c.format {
        Format::Sexp => {
            let mut items = vec![config_sexp(c), Sexp::field("passed", Sexp::bool(passed))];
            items.extend(stages.iter().map(ToSexp::to_sexp));
            format!("{}\n", Sexp::tagged(tag, items).pretty())
        }
        Format::Human => {
            let mut s = String::new();
            for st in stages {
                for r in &st.rows {
                    let ok = if r.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(s, "{ok}  {:<36} {}", r.check, r.detail);
                }
            }
            let _ = writeln!(s, "{tag}: {}", if passed { "pass" } else { "FAIL" });
            s
        }
    };
    Output {
        text,
        code: if passed { 0 } else { EXIT_FAILED_CHECK },
    }
}

fn cmd_check(c: &RunConfig, lemma: Lemma, range: RangeInclusive<usize>) -> Output {
    let cfg = report_config(c, *range.end());
    match lemma {
        Lemma::Lemma3 => stage_output(c, "lemma3", &[stage_unfolding(&cfg, range)]),
        Lemma::Lemma4Sample => {
            let (registry, _) = DivergenceRegistry::certify(*range.end(), c.fuel);
            stage_output(c, "lemma4-sample", &[stage_sampling(&cfg, &registry)])
        }
        Lemma::Lemma5 => {
            let (registry, certs) = DivergenceRegistry::certify(*range.end(), c.fuel);
            let certs: Vec<_> = certs.into_iter().filter(|r| range.contains(&r.i)).collect();
            stage_output(c, "lemma5", &[stage_test_separation(&cfg, &registry, &certs)])
        }
    }
}

fn universe_sexp(c: &RunConfig, u: &Universe) -> Sexp {
    Sexp::tagged(
        "universe",
        [
            Sexp::field("depth", Sexp::int(c.depth as i128)),
            Sexp::field("width", Sexp::int(c.width as i128)),
            Sexp::field("size", Sexp::int(u.len() as i128)),
        ],
    )
}

/// Node budget of the derivation search, scaled from the step budget.
fn search_fuel(c: &RunConfig) -> usize {
    c.fuel.saturating_mul(100)
}

fn cmd_typecheck(c: &RunConfig, text: &str, elem: &Option<String>) -> Result<Output, Fail> {
    let subject = if let Ok(t) = named(text) {
        Expr::Term(t)
    } else {
        match parse_normal(text).map_err(usage)? {
            Normal::Terms(t) => match resolve_builtins(t).into_items().as_slice() {
                [t] => Expr::Term(t.clone()),
                _ => return Err(usage("typecheck needs a single term")),
            },
            Normal::Tests(q) => match q.into_items().as_slice() {
                [q] => Expr::Test(q.clone()),
                _ => return Err(usage("typecheck needs a single test")),
            },
        }
    };
    if !subject.is_closed() {
        return Err(usage("typecheck needs a closed expression"));
    }
    let target = match (&subject, elem) {
        (Expr::Term(_), Some(e)) => Some(Elem::parse(e).map_err(usage)?),
        (Expr::Term(_), None) => return Err(usage("--elem is required for terms")),
        (Expr::Test(_), Some(_)) => return Err(usage("tests carry no element")),
        (Expr::Test(_), None) => None,
    };
    let u = Universe::enumerate(c.depth, c.width);
    let v = derivable(&Env::empty(), &subject, target.as_ref(), &u, search_fuel(c));
    let text = match c.format {
        Format::Sexp => {
            let mut items = vec![
                universe_sexp(c, &u),
                Sexp::field("subject", Sexp::str(subject.to_string())),
                Sexp::field("verdict", Sexp::atom(v.name())),
            ];
            if let Some(t) = &target {
                items.insert(2, Sexp::field("elem", Sexp::str(t.to_string())));
            }
            if let Derivability::Yes(d) = &v {
                items.push(Sexp::field("derivation", d.to_sexp()));
            }
            format!("{}\n", Sexp::tagged("typecheck", items).pretty())
        }
        Format::Human => {
            let mut s = format!("universe U({},{}) with {} elements\n", c.depth, c.width, u.len());
            let _ = writeln!(s, "verdict: {}", v.name());
            if let Derivability::Yes(d) = &v {
                s.push_str(&d.to_string());
            }
            s
        }
    };
    Ok(Output { text, code: 0 })
}

fn cmd_interp(c: &RunConfig, text: &str) -> Result<Output, Fail> {
    let m = term_sum(text)?;
    let vars: Vec<Name> = m.free_vars().into_iter().collect();
    let u = Universe::enumerate(c.depth, c.width);
    let envs = resource_lambda::minf::multiset_count(u.len(), 0, c.width);
    let tuples = envs.checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if tuples.saturating_mul(u.len() as u128) > 50_000_000 {
        return Err(usage(format!(
            "{} free variables over U({},{}) is too many environments; lower --depth or --width",
            vars.len(),
            c.depth,
            c.width
        )));
    }
    let r = interp(&m, &vars, &u, search_fuel(c));
    let text = match c.format {
        Format::Sexp => {
            let doc = Sexp::tagged(
                "interp",
                [
                    universe_sexp(c, &u),
                    Sexp::field("term", m.to_sexp()),
                    Sexp::field("vars", Sexp::list(vars.iter().map(|v| Sexp::atom(v.as_str())))),
                    r.to_sexp_with(&vars),
                ],
            );
            format!("{}\n", doc.pretty())
        }
        Format::Human => {
            let mut s = format!("universe U({},{}) with {} elements\n", c.depth, c.width, u.len());
            let row = |(env, e): &(Vec<Vec<Elem>>, Elem)| {
                let env: Vec<String> = vars.iter().zip(env).map(|(x, ms)| format!("{x}:{}", render_multiset(ms))).collect();
                if env.is_empty() {
                    e.to_string()
                } else {
                    format!("{} ⊢ {e}", env.join(", "))
                }
            };
            let _ = writeln!(s, "members: {}", r.members.len());
            for m in &r.members {
                let _ = writeln!(s, "  {}", row(m));
            }
            let _ = writeln!(s, "unknown: {}", r.unknown.len());
            for m in &r.unknown {
                let _ = writeln!(s, "  {}", row(m));
            }
            s
        }
    };
    Ok(Output { text, code: 0 })
}

fn cmd_separate(c: &RunConfig, left: &str, right: &str) -> Result<Output, Fail> {
    let (l, r) = (single_term(left)?, single_term(right)?);
    if !l.is_closed() || !r.is_closed() {
        return Err(usage("separate needs closed terms"));
    }
    let u = Universe::enumerate(c.depth, c.width);
    let s = separating_element(&l, &r, &u, search_fuel(c), c.unfold);
    let code = if s.is_some() { 0 } else { EXIT_NO_WITNESS };
    let text = match c.format {
        Format::Sexp => {
            let doc = Sexp::tagged(
                "separate",
                [
                    universe_sexp(c, &u),
                    Sexp::field("unfold", Sexp::int(c.unfold as i128)),
                    Sexp::field("left", Sexp::str(l.to_string())),
                    Sexp::field("right", Sexp::str(r.to_string())),
                    Sexp::field("result", separation_sexp(&s)),
                ],
            );
            format!("{}\n", doc.pretty())
        }
        Format::Human => {
            let mut out = format!(
                "universe U({},{}) with {} elements, unfold {}\n",
                c.depth,
                c.width,
                u.len(),
                c.unfold
            );
            match &s {
                Some(s) => {
                    let _ = writeln!(out, "witness: {}", s.elem);
                    let _ = writeln!(out, "side:    {}", s.side.name());
                }
                None => out.push_str("no separating element within bounds\n"),
            }
            out
        }
    };
    Ok(Output { text, code })
}

fn cmd_counterexample(c: &RunConfig) -> Output {
    let cfg = report_config(c, 4);
    let r = counterexample_report(&cfg);
    let text = match c.format {
        Format::Sexp => format!("{}\n", r.to_sexp().pretty()),
        Format::Human => {
            let mut s = format!(
                "fuel {}  seed {}  corpus {}  universe U({},{})  unfold {}\n",
                cfg.fuel, cfg.seed, cfg.corpus_size, cfg.depth, cfg.width, cfg.unfold
            );
            s.push_str(&r.table());
            s
        }
    };
    Output {
        text,
        code: if r.passed() { 0 } else { EXIT_FAILED_CHECK },
    }
}

fn cmd_laws(c: &RunConfig, max_size: usize, bang_cap: usize) -> Output {
    let r = check_laws(max_size, bang_cap, c.seed);
    let text = match c.format {
        Format::Sexp => {
            let doc = Sexp::tagged(
                "law-report",
                [
                    Sexp::field("max-size", Sexp::int(max_size as i128)),
                    Sexp::field("bang-cap", Sexp::int(bang_cap as i128)),
                    Sexp::field("seed", Sexp::int(c.seed)),
                    r.to_sexp(),
                ],
            );
            format!("{}\n", doc.pretty())
        }
        Format::Human => {
            let mut s = format!("objects of size 1..={max_size}, multisets capped at {bang_cap}\n");
            s.push_str(&r.table());
            for f in r.failures() {
                let _ = writeln!(s, "FAIL {}", f.to_sexp());
            }
            s
        }
    };
    Output {
        text,
        code: if r.all_hold_or_inconclusive() { 0 } else { EXIT_FAILED_CHECK },
    }
}

fn run(cli: &Cli) -> Result<Output, Fail> {
    let c = &cli.config;
    match &cli.command {
        Command::Reduce { text, term, apply } => cmd_reduce(c, text, term, apply),
        Command::Check { lemma, range } => Ok(cmd_check(c, *lemma, range.clone())),
        Command::Semantics { action } => match action {
            Semantics::Typecheck { text, term, elem } => cmd_typecheck(c, pick(text, term)?, elem),
            Semantics::Interp { text, term } => cmd_interp(c, pick(text, term)?),
            Semantics::Separate { left, right } => cmd_separate(c, left, right),
        },
        Command::Counterexample => Ok(cmd_counterexample(c)),
        Command::Laws { max_size, bang_cap } => Ok(cmd_laws(c, *max_size, *bang_cap)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use resource_lambda::combinators::{identity, probe_with_eps0, term_a};

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..4").unwrap(), 0..=4);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("x..1").is_err());
    }

    #[test]
    fn bags_resolve_builtins() {
        let b = parse_bag("[I!]").unwrap();
        assert_eq!(b.banged_sum().items()[0].key(), identity().key());
        assert!(parse_bag("x").is_err());
    }

    #[test]
    fn builtin_probe_matches_library() {
        let q = parse_normal("tau(A [eps0!])").unwrap();
        let Normal::Tests(q) = q else { panic!() };
        let q = resolve_builtins(q);
        assert_eq!(q.items()[0].key(), probe_with_eps0(term_a()).key());
    }
}
