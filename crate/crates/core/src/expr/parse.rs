//! Recursive-descent parser for user-supplied profile functions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' INT)?
//! base   := NUMBER | 'i' | 'x' | '(' expr ')' | '-' base
//! ```
//!
//! `x` is x₊. A NUMBER immediately followed by `i` is an imaginary literal
//! (`3i`). Exponents are (optionally negative) integer literals.

use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, HalfInteger};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    BadNumber(String),
    NonIntegerExponent,
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {kind:?}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { text: String, imaginary: bool },
    I,
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            'x' => Tok::X,
            'i' => Tok::I,
            c if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    text.push(chars[i]);
                    i += 1;
                }
                // optional exponent: e[+-]digits
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        text.extend(&chars[i..j]);
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            text.push(chars[i]);
                            i += 1;
                        }
                    }
                }
                let imaginary = i < chars.len() && chars[i] == 'i';
                if imaginary {
                    i += 1;
                }
                out.push((start, Tok::Number { text, imaginary }));
                continue;
            }
            other => {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.position(),
            kind,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    factors.push(self.factor()?.recip());
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.position();
        match self.next() {
            Some(Tok::Number {
                text,
                imaginary: false,
            }) if text.chars().all(|c| c.is_ascii_digit()) => {
                let n: i32 = text.parse().map_err(|_| ParseError {
                    position: at,
                    kind: ParseErrorKind::BadNumber(text.clone()),
                })?;
                let n = if negative { -n } else { n };
                Ok(base.pow(HalfInteger::int(n)))
            }
            Some(_) => Err(ParseError {
                position: at,
                kind: ParseErrorKind::NonIntegerExponent,
            }),
            None => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = self.position();
        match self.next() {
            Some(Tok::Number { text, imaginary }) => {
                let v: f64 = text.parse().map_err(|_| ParseError {
                    position: at,
                    kind: ParseErrorKind::BadNumber(text.clone()),
                })?;
                Ok(if imaginary {
                    Expr::constant(Complex64::new(0.0, v))
                } else {
                    Expr::real(v)
                })
            }
            Some(Tok::I) => Ok(Expr::i()),
            Some(Tok::X) => Ok(Expr::x_plus()),
            Some(Tok::Minus) => Ok(-self.base()?),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    Some(t) => Err(ParseError {
                        position: self.toks[self.pos - 1].0,
                        kind: ParseErrorKind::UnexpectedToken(format!("{t:?}")),
                    }),
                    None => Err(ParseError {
                        position: self.end,
                        kind: ParseErrorKind::UnexpectedEnd,
                    }),
                }
            }
            Some(t) => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnexpectedToken(format!("{t:?}")),
            }),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
        }
    }
}

/// Parse a profile function of x₊.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error(ParseErrorKind::TrailingInput));
    }
    Ok(e)
}
