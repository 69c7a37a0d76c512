//! Recursive-descent parser for the canonical polynomial text format:
//! integer literals, ring variables, `+ - *`, `^` with non-negative
//! integer exponents, and parentheses. Errors carry the byte position and
//! what was expected.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Num;

use crate::poly::{ArithOp, IntPoly, VarTable, poly_arith};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.pos, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_token(&mut self) -> Result<(usize, Tok), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::End));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((start, t));
        }
        if c.is_ascii_digit() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            self.pos = end;
            let v = BigInt::from_str_radix(text, 10).unwrap();
            return Ok((start, Tok::Int(v)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
            self.pos = end;
            return Ok((start, Tok::Ident(text)));
        }
        Err(ParseError {
            pos: start,
            expected: "a term, operator or parenthesis".into(),
            found: format!("`{}`", char::from(c)),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    table: &'a Arc<VarTable>,
    current: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, table: &'a Arc<VarTable>) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let current = lexer.next_token()?;
        Ok(Parser {
            lexer,
            table,
            current,
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        self.current = self.lexer.next_token()?;
        Ok(())
    }

    fn err(&self, expected: &str) -> ParseError {
        ParseError {
            pos: self.current.0,
            expected: expected.into(),
            found: self.current.1.describe(),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<IntPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.current.1 {
                Tok::Plus => {
                    self.advance()?;
                    let rhs = self.term()?;
                    acc = poly_arith(ArithOp::Add, &acc, &rhs).unwrap();
                }
                Tok::Minus => {
                    self.advance()?;
                    let rhs = self.term()?;
                    acc = poly_arith(ArithOp::Sub, &acc, &rhs).unwrap();
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<IntPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.current.1 == Tok::Star {
            self.advance()?;
            let rhs = self.factor()?;
            acc = poly_arith(ArithOp::Mul, &acc, &rhs).unwrap();
        }
        Ok(acc)
    }

    // factor := '-' factor | base ('^' uint)?
    fn factor(&mut self) -> Result<IntPoly, ParseError> {
        if self.current.1 == Tok::Minus {
            self.advance()?;
            let inner = self.factor()?;
            return Ok(inner.neg());
        }
        let base = self.base()?;
        if self.current.1 == Tok::Caret {
            self.advance()?;
            match &self.current.1 {
                Tok::Int(e) => {
                    let e: u32 = e.try_into().map_err(|_| ParseError {
                        pos: self.current.0,
                        expected: "a non-negative exponent fitting in 32 bits".into(),
                        found: self.current.1.describe(),
                    })?;
                    self.advance()?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    // base := int | variable | '(' expr ')'
    fn base(&mut self) -> Result<IntPoly, ParseError> {
        match self.current.1.clone() {
            Tok::Int(v) => {
                self.advance()?;
                Ok(IntPoly::constant(self.table, v))
            }
            Tok::Ident(name) => {
                let pos = self.current.0;
                match self.table.index_of(&name) {
                    Some(i) => {
                        self.advance()?;
                        Ok(IntPoly::var(self.table, i))
                    }
                    None => Err(ParseError {
                        pos,
                        expected: format!(
                            "one of the ring variables [{}]",
                            (0..self.table.len())
                                .map(|i| self.table.name(i).to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                        found: format!("identifier `{name}`"),
                    }),
                }
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.current.1 != Tok::RParen {
                    return Err(self.err("`)`"));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.err("an integer, variable or `(`")),
        }
    }
}

/// Parse an expression in the canonical format against a variable table.
pub fn parse_poly(src: &str, table: &Arc<VarTable>) -> Result<IntPoly, ParseError> {
    let mut p = Parser::new(src, table)?;
    let result = p.expr()?;
    if p.current.1 != Tok::End {
        return Err(p.err("end of input or an operator"));
    }
    Ok(result)
}
