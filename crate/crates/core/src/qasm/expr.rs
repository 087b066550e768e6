//! Constant arithmetic for gate parameters: literals, `pi`, `+ - * /`,
//! unary minus and parentheses with the usual precedence.

use std::f64::consts::PI;

use super::lexer::{describe, lex, Tok};
use super::parser::Cursor;
use super::ParseDiagnostic;
use crate::error::{Error, Result};

impl Cursor<'_> {
    pub(crate) fn expr(&mut self) -> Result<f64, ParseDiagnostic> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseDiagnostic> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc *= self.unary()?;
                }
                Tok::Slash => {
                    let slash = self.bump();
                    let rhs = self.unary()?;
                    if rhs == 0.0 {
                        return Err(ParseDiagnostic::error("division by zero", self.span_of(slash)));
                    }
                    acc /= rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseDiagnostic> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<f64, ParseDiagnostic> {
        let tok = self.peek().clone();
        match tok {
            Tok::Number { value, .. } => {
                self.bump();
                Ok(value)
            }
            Tok::Ident(ref name) if name == "pi" => {
                self.bump();
                Ok(PI)
            }
            Tok::LParen => {
                self.bump();
                let v = self.expr()?;
                self.expect(&Tok::RParen, "to close the parenthesis")?;
                Ok(v)
            }
            other => Err(ParseDiagnostic::error(
                format!("expected an expression, found {}", describe(&other)),
                self.span_here(),
            )),
        }
    }
}

/// Evaluates a standalone parameter expression such as `3*pi/4 + 0.5`.
pub fn parse_expr(text: &str) -> Result<f64> {
    let (tokens, mut diags) = lex(text);
    if !diags.is_empty() {
        return Err(Error::Parse(diags));
    }
    let mut cur = Cursor::new(text, &tokens);
    let value = cur.expr().and_then(|v| match cur.peek() {
        Tok::Eof => Ok(v),
        other => Err(ParseDiagnostic::error(
            format!("unexpected {} after expression", describe(other)),
            cur.span_here(),
        )),
    });
    value.map_err(|d| {
        diags.push(d);
        Error::Parse(diags)
    })
}
