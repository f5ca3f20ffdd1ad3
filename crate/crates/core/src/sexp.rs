//! Nested-list tree serialization used for traces and reports.

use std::fmt;

use crate::syntax::{Bag, Expr, FormalSum, Node, Normal, Term, Test};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn str(s: impl Into<String>) -> Sexp {
        Sexp::Str(s.into())
    }

    pub fn int(n: impl Into<i128>) -> Sexp {
        Sexp::Atom(n.into().to_string())
    }

    pub fn bool(b: bool) -> Sexp {
        Sexp::atom(if b { "true" } else { "false" })
    }

    pub fn list(items: impl IntoIterator<Item = Sexp>) -> Sexp {
        Sexp::List(items.into_iter().collect())
    }

    /// `(tag item...)`
    pub fn tagged(tag: &str, items: impl IntoIterator<Item = Sexp>) -> Sexp {
        let mut v = vec![Sexp::atom(tag)];
        v.extend(items);
        Sexp::List(v)
    }

    /// `(key value)`
    pub fn field(key: &str, value: Sexp) -> Sexp {
        Sexp::List(vec![Sexp::atom(key), value])
    }

    /// Multi-line rendering with two-space indentation for long lists.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(0, &mut out);
        out
    }

    fn write_pretty(&self, indent: usize, out: &mut String) {
        let flat = self.to_string();
        if flat.len() + indent <= 100 {
            out.push_str(&flat);
            return;
        }
        match self {
            Sexp::List(items) if !items.is_empty() => {
                out.push('(');
                items[0].write_pretty(indent + 1, out);
                for item in &items[1..] {
                    out.push('\n');
                    out.push_str(&" ".repeat(indent + 2));
                    item.write_pretty(indent + 2, out);
                }
                out.push(')');
            }
            _ => out.push_str(&flat),
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    item.fmt(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Conversion of syntax into the tree serialization.
pub trait ToSexp {
    fn to_sexp(&self) -> Sexp;
}

impl ToSexp for Term {
    fn to_sexp(&self) -> Sexp {
        match self {
            Term::Var(x) => Sexp::tagged("var", [Sexp::atom(x.as_str())]),
            Term::Abs(x, body) => Sexp::tagged("lam", [Sexp::atom(x.as_str()), body.to_sexp()]),
            Term::App(f, bag) => Sexp::tagged("app", [f.to_sexp(), bag.to_sexp()]),
            Term::TauBar(q) => Sexp::tagged("tbar", [q.to_sexp()]),
        }
    }
}

impl ToSexp for Bag {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "bag",
            [
                Sexp::list(self.linear().iter().map(ToSexp::to_sexp)),
                self.banged_sum().to_sexp(),
            ],
        )
    }
}

impl ToSexp for Test {
    fn to_sexp(&self) -> Sexp {
        match self {
            Test::Eps => Sexp::atom("eps"),
            Test::Par(l, r) => Sexp::tagged("par", [l.to_sexp(), r.to_sexp()]),
            Test::Tau(m) => Sexp::tagged("tau", [m.to_sexp()]),
        }
    }
}

impl ToSexp for Expr {
    fn to_sexp(&self) -> Sexp {
        match self {
            Expr::Term(t) => t.to_sexp(),
            Expr::Test(q) => q.to_sexp(),
        }
    }
}

impl<T: Node + ToSexp> ToSexp for FormalSum<T> {
    fn to_sexp(&self) -> Sexp {
        Sexp::tagged("sum", self.iter().map(ToSexp::to_sexp))
    }
}

impl ToSexp for Normal {
    fn to_sexp(&self) -> Sexp {
        match self {
            Normal::Terms(s) => s.to_sexp(),
            Normal::Tests(s) => s.to_sexp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_normal;

    #[test]
    fn term_serialization() {
        let n = parse_normal("\\x. x [y; (a + b)!]").unwrap();
        assert_eq!(
            n.to_sexp().to_string(),
            "(sum (lam x (app (var x) (bag ((var y)) (sum (var a) (var b))))))"
        );
        let n = parse_normal("tau(tbar(eps | eps))").unwrap();
        assert_eq!(n.to_sexp().to_string(), "(sum (tau (tbar (par eps eps))))");
    }

    #[test]
    fn strings_are_escaped() {
        assert_eq!(Sexp::str("a \"b\"\\").to_string(), "\"a \\\"b\\\"\\\\\"");
    }
}
