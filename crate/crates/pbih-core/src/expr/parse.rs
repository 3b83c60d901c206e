//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := base ('^' factor)?          -- right-associative
//! base   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` parses as `-(x^2)`.
//! Function names: `sin cos sinh cosh exp ln sqrt`. Numbers are decimal
//! literals with optional fraction and exponent. A `-` directly in front of a
//! bare number literal folds into a negative constant so canonical emission
//! round-trips.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use super::{BinaryOp, Expr, UnaryOp};

/// Syntax error with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.position, self.message)
    }
}

impl core::error::Error for ParseError {}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = raw_binary(BinaryOp::Add, lhs, rhs);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = raw_binary(BinaryOp::Sub, lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = raw_binary(BinaryOp::Mul, lhs, rhs);
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = raw_binary(BinaryOp::Div, lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            // Fold a negated constant so "-2.5" is a single literal.
            if let Some(c) = inner.as_const() {
                return Ok(Expr::constant(-c));
            }
            return Ok(raw_unary(UnaryOp::Neg, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let exponent = self.factor()?;
            return Ok(raw_binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if self.pos == start || (self.pos == start + 1 && self.src[start] == b'.') {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all; "2e" could start an identifier
                // in some grammars, not in this one — back off.
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError {
            position: start,
            message: format!("invalid number literal '{text}'"),
        })?;
        self.skip_ws();
        Ok(Expr::constant(value))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.skip_ws();
        if self.eat(b'(') {
            let op = match name.as_str() {
                "sin" => UnaryOp::Sin,
                "cos" => UnaryOp::Cos,
                "sinh" => UnaryOp::Sinh,
                "cosh" => UnaryOp::Cosh,
                "exp" => UnaryOp::Exp,
                "ln" => UnaryOp::Ln,
                "sqrt" => UnaryOp::Sqrt,
                _ => {
                    return Err(ParseError {
                        position: start,
                        message: format!("unknown function '{name}'"),
                    })
                }
            };
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(raw_unary(op, arg));
        }
        Ok(Expr::var(&name))
    }
}

// The parser preserves input structure: no folding beyond negative literals,
// so "2 + 3" stays a sum and the parse mirrors the documented precedence.
fn raw_unary(op: UnaryOp, inner: Expr) -> Expr {
    Expr::raw_unary(op, inner)
}

fn raw_binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::raw_binary(op, lhs, rhs)
}
