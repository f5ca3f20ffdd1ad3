use std::fmt::{self, Write};

use super::raw::{Raw, RawBag};
use super::term::{Bag, Expr, FormalSum, Normal, Term, Test};

/// Where an expression is being printed; decides parenthesization.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Delimited on the right: top level, abstraction body, bag slot, `tau(..)`.
    Closed,
    SumItem,
    ParLeft,
    ParRight,
    Fun,
}

fn write_raw(r: &Raw, ctx: Ctx, out: &mut String) {
    match r {
        Raw::Var(x) => out.push_str(x.as_str()),
        Raw::Eps => out.push_str("eps"),
        Raw::Sum(items) if items.is_empty() => out.push('0'),
        Raw::Sum(items) if items.len() == 1 => write_raw(&items[0], ctx, out),
        Raw::Sum(items) => parens(ctx != Ctx::Closed, out, |out| {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_raw(item, Ctx::SumItem, out);
            }
        }),
        Raw::Par(l, r) => {
            let wrap = matches!(ctx, Ctx::ParRight | Ctx::Fun);
            parens(wrap, out, |out| {
                write_raw(l, Ctx::ParLeft, out);
                out.push_str(" | ");
                write_raw(r, Ctx::ParRight, out);
            })
        }
        Raw::Abs(x, body) => parens(ctx != Ctx::Closed, out, |out| {
            out.push('\\');
            out.push_str(x.as_str());
            out.push_str(". ");
            write_raw(body, Ctx::Closed, out);
        }),
        Raw::App(f, bag) => {
            write_raw(f, Ctx::Fun, out);
            out.push(' ');
            write_bag(bag, out);
        }
        Raw::TauBar(q) => {
            out.push_str("tbar(");
            write_raw(q, Ctx::Closed, out);
            out.push(')');
        }
        Raw::Tau(m) => {
            out.push_str("tau(");
            write_raw(m, Ctx::Closed, out);
            out.push(')');
        }
    }
}

fn write_bag(bag: &RawBag, out: &mut String) {
    out.push('[');
    for (i, item) in bag.linear.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_raw(item, Ctx::Closed, out);
    }
    for (i, item) in bag.banged.iter().enumerate() {
        if i == 0 && !bag.linear.is_empty() {
            out.push_str("; ");
        } else if i > 0 {
            out.push_str(", ");
        }
        write_raw(item, Ctx::Closed, out);
        out.push('!');
    }
    out.push(']');
}

fn parens(wrap: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    body(out);
    if wrap {
        out.push(')');
    }
}

/// Renders a raw tree in the concrete text grammar.
pub fn print_raw(r: &Raw) -> String {
    let mut out = String::new();
    write_raw(r, Ctx::Closed, &mut out);
    out
}

impl fmt::Display for Raw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(&Raw::from(self)))
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(&Raw::from(self)))
    }
}

impl fmt::Display for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_bag(&RawBag::from(self), &mut out);
        f.write_str(&out)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Term(t) => t.fmt(f),
            Expr::Test(q) => q.fmt(f),
        }
    }
}

impl fmt::Display for FormalSum<Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(&Raw::from(self)))
    }
}

impl fmt::Display for FormalSum<Test> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_raw(&Raw::from(self)))
    }
}

impl fmt::Display for FormalSum<Expr> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_char('0');
        }
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match e {
                Expr::Term(t @ Term::Abs(..)) if self.len() > 1 => write!(f, "({t})")?,
                other => write!(f, "{other}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Normal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normal::Terms(s) => s.fmt(f),
            Normal::Tests(s) => s.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_normal;

    #[test]
    fn abstraction() {
        assert_eq!(Term::abs("x", Term::var("x")).to_string(), "\\x. x");
    }

    #[test]
    fn empty_sum_prints_zero() {
        assert_eq!(FormalSum::<Term>::zero().to_string(), "0");
    }

    #[test]
    fn sums_print_independently_of_order() {
        let m = Term::abs("x", Term::var("x"));
        let n = Term::var("y");
        let a = FormalSum::from_vec(vec![m.clone(), n.clone()]);
        let b = FormalSum::from_vec(vec![n, m]);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn layout_examples() {
        for (src, printed) in [
            ("\\x. x [x!]", "\\x. x [x!]"),
            ("(\\x. x) [y, z; w!]", "(\\x. x) [y, z; w!]"),
            ("f [(a + b)!]", "f [a + b!]"),
            ("tau(tbar(eps))", "tau(tbar(eps))"),
            ("eps | (eps | eps)", "eps | (eps | eps)"),
            ("x [y, z; 0!]", "x [y, z; 0!]"),
            ("f [\\x. x!] [g [y!]!]", "f [\\x. x!] [g [y!]!]"),
        ] {
            assert_eq!(parse_normal(src).unwrap().to_string(), printed);
        }
    }

    #[test]
    fn abstractions_in_sums_are_parenthesized() {
        let s = parse_normal("(\\x. x) + y").unwrap();
        let printed = s.to_string();
        assert_eq!(parse_normal(&printed).unwrap().key(), s.key());
        assert!(printed.contains("(\\x. x)"));
    }
}
