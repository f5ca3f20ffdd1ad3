//! Syntax of the resource calculus with tests: trees, formal sums,
//! alpha-equivalence, and the concrete text format.

mod parse;
mod print;
mod raw;
mod term;

use thiserror::Error;

pub use parse::parse;
pub use print::print_raw;
pub use raw::{normalize_term, normalize_test, sum_normalize, Raw, RawBag, Sort};
pub use term::{alpha_eq, Bag, Expr, FormalSum, Name, Node, Normal, Term, Test};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed expression: {0}")]
    Structural(String),
}

/// Parses and sum-normalizes in one go.
pub fn parse_normal(text: &str) -> Result<Normal, SyntaxError> {
    sum_normalize(&parse(text)?)
}

/// Parses text that must denote a single sum-free term.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let sum = normalize_term(&parse(text)?)?;
    single(sum.into_items(), "term")
}

/// Parses text that must denote a single sum-free test.
pub fn parse_test(text: &str) -> Result<Test, SyntaxError> {
    let sum = normalize_test(&parse(text)?)?;
    single(sum.into_items(), "test")
}

fn single<T>(mut items: Vec<T>, what: &str) -> Result<T, SyntaxError> {
    if items.len() == 1 {
        Ok(items.pop().expect("length checked"))
    } else {
        Err(SyntaxError::Structural(format!(
            "expected a single {what}, found a sum of {} summands",
            items.len()
        )))
    }
}
