//! Recursive-descent parser for the concrete text grammar.
//!
//! ```text
//! sum  := par ('+' par)*
//! par  := app ('|' app)*
//! app  := '\' ident '.' sum | atom bag*
//! atom := ident | '0' | 'eps' | 'tau' '(' sum ')' | 'tbar' '(' sum ')' | '(' sum ')'
//! bag  := '[' (sum (',' sum)* ';')? sum '!' ']'
//! ```

use super::raw::{Raw, RawBag};
use super::term::Name;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    Lambda,
    Dot,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Semi,
    Bang,
    Plus,
    Bar,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Zero => "`0`".into(),
        Tok::Lambda => "`\\`".into(),
        Tok::Dot => "`.`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let advance = |c: char, line: &mut usize, column: &mut usize| {
            if c == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut line, &mut column);
            continue;
        }
        let tok = if is_ident_start(c) && c != 'λ' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                chars.next();
                advance(c, &mut line, &mut column);
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
            continue;
        } else {
            match c {
                '0' => Tok::Zero,
                '\\' | 'λ' => Tok::Lambda,
                '.' => Tok::Dot,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '!' => Tok::Bang,
                '+' => Tok::Plus,
                '|' => Tok::Bar,
                other => {
                    return Err(SyntaxError::Parse {
                        line: l,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        chars.next();
        advance(c, &mut line, &mut column);
        out.push(Token {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: String) -> SyntaxError {
        let t = &self.tokens[self.pos];
        SyntaxError::Parse {
            line: t.line,
            column: t.column,
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                describe(&want),
                describe(self.peek())
            )))
        }
    }

    fn sum(&mut self) -> Result<Raw, SyntaxError> {
        let first = self.par()?;
        if *self.peek() != Tok::Plus {
            return Ok(first);
        }
        let mut items = vec![first];
        while *self.peek() == Tok::Plus {
            self.next();
            items.push(self.par()?);
        }
        Ok(Raw::Sum(items))
    }

    fn par(&mut self) -> Result<Raw, SyntaxError> {
        let mut acc = self.app()?;
        while *self.peek() == Tok::Bar {
            self.next();
            let rhs = self.app()?;
            acc = Raw::Par(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn app(&mut self) -> Result<Raw, SyntaxError> {
        if *self.peek() == Tok::Lambda {
            self.next();
            let binder = match self.next().tok {
                Tok::Ident(s) if !is_keyword(&s) => Name::new(&s),
                other => {
                    self.pos -= 1;
                    return Err(self.error_here(format!(
                        "expected a binder name, found {}",
                        describe(&other)
                    )));
                }
            };
            self.expect(Tok::Dot)?;
            let body = self.sum()?;
            return Ok(Raw::Abs(binder, Box::new(body)));
        }
        let mut acc = self.atom()?;
        while *self.peek() == Tok::LBrack {
            let bag = self.bag()?;
            acc = Raw::App(Box::new(acc), bag);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Raw, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "eps" => {
                    self.next();
                    Ok(Raw::Eps)
                }
                "tau" | "tbar" => {
                    self.next();
                    self.expect(Tok::LParen)?;
                    let inner = self.sum()?;
                    self.expect(Tok::RParen)?;
                    Ok(if s == "tau" {
                        Raw::Tau(Box::new(inner))
                    } else {
                        Raw::TauBar(Box::new(inner))
                    })
                }
                _ => {
                    self.next();
                    Ok(Raw::Var(Name::new(&s)))
                }
            },
            Tok::Zero => {
                self.next();
                Ok(Raw::Sum(Vec::new()))
            }
            Tok::LParen => {
                self.next();
                let inner = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(self.error_here(format!(
                "expected an expression, found {}",
                describe(&other)
            ))),
        }
    }

    fn bag(&mut self) -> Result<RawBag, SyntaxError> {
        let open = self.pos;
        self.expect(Tok::LBrack)?;
        let mut linear = Vec::new();
        let mut banged = Vec::new();
        let mut saw_semi = false;
        loop {
            let item = self.sum()?;
            let is_banged = *self.peek() == Tok::Bang;
            if is_banged {
                self.next();
                banged.push(item);
            } else {
                linear.push(item);
            }
            match self.peek() {
                Tok::Comma => {
                    if !banged.is_empty() {
                        return Err(self.error_here(
                            "the banged element must be the last element of a bag".into(),
                        ));
                    }
                    self.next();
                }
                Tok::Semi => {
                    if saw_semi || !banged.is_empty() {
                        return Err(self.error_here("unexpected `;` in bag".into()));
                    }
                    saw_semi = true;
                    self.next();
                }
                Tok::RBrack => {
                    self.next();
                    break;
                }
                other => {
                    let other = other.clone();
                    return Err(self.error_here(format!(
                        "expected `,`, `;`, `!` or `]` in bag, found {}",
                        describe(&other)
                    )));
                }
            }
        }
        let bag_err = |message: String| {
            let t = &self.tokens[open];
            SyntaxError::Parse {
                line: t.line,
                column: t.column,
                message,
            }
        };
        if banged.len() != 1 {
            return Err(bag_err(format!(
                "a bag needs exactly one banged element, found {}",
                banged.len()
            )));
        }
        if linear.is_empty() == saw_semi {
            return Err(bag_err(
                "linear elements must be separated from the banged element by `;`".into(),
            ));
        }
        Ok(RawBag { linear, banged })
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "eps" | "tau" | "tbar")
}

/// Parses one expression of the text grammar.
pub fn parse(text: &str) -> Result<Raw, SyntaxError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let raw = p.sum()?;
    if *p.peek() != Tok::Eof {
        let found = describe(p.peek());
        return Err(p.error_here(format!("unexpected {found} after expression")));
    }
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(s: &str) -> Raw {
        Raw::Var(Name::new(s))
    }

    #[test]
    fn abstraction_over_self_application() {
        assert_eq!(
            parse("\\x. x [x!]").unwrap(),
            Raw::Abs(
                Name::new("x"),
                Box::new(Raw::App(
                    Box::new(var("x")),
                    RawBag {
                        linear: vec![],
                        banged: vec![var("x")]
                    }
                ))
            )
        );
    }

    #[test]
    fn test_constructs() {
        assert_eq!(
            parse("tau(tbar(eps))").unwrap(),
            Raw::Tau(Box::new(Raw::TauBar(Box::new(Raw::Eps))))
        );
    }

    #[test]
    fn zero_in_banged_slot() {
        let r = parse("x [y, z; 0!]").unwrap();
        match r {
            Raw::App(_, bag) => {
                assert_eq!(bag.linear.len(), 2);
                assert_eq!(bag.banged, vec![Raw::Sum(vec![])]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bag_banged_count_is_checked() {
        for bad in ["x [y]", "x [y!, z!]", "x [y, z]", "x [y; z]", "x [y!; z]", "x [y, z!]"] {
            assert!(
                matches!(parse(bad), Err(SyntaxError::Parse { .. })),
                "{bad} should be rejected"
            );
        }
    }

    #[test]
    fn error_position() {
        match parse("\\x.\n  x ]") {
            Err(SyntaxError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence() {
        // `+` is loosest, then `|`, and abstraction bodies extend to the right
        assert_eq!(
            parse("a | b + c").unwrap(),
            Raw::Sum(vec![Raw::Par(Box::new(var("a")), Box::new(var("b"))), var("c")])
        );
        assert!(matches!(parse("\\x. a + b").unwrap(), Raw::Abs(..)));
        assert!(matches!(parse("f [a!] [b!]").unwrap(), Raw::App(f, _) if matches!(*f, Raw::App(..))));
    }

    #[test]
    fn unicode_lambda_is_accepted() {
        assert_eq!(parse("λx. x").unwrap(), parse("\\x. x").unwrap());
    }
}
