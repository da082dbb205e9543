//! Canonical text form for polynomials and derived systems.
//!
//! Printing orders terms leading-first (descending graded lexicographic),
//! writes coefficients as reduced fractions, and separates factors with
//! `*`. The parser accepts exactly the printed grammar, so print followed
//! by parse is the identity on polynomials.

use super::{Monomial, Polynomial, PolyVectorField, SymbolicError, VarTable};
use num::rational::BigRational;
use num::traits::{One, Signed};
use num::BigInt;
use std::str::FromStr;

/// Renders a polynomial canonically against a variable table.
pub fn polynomial_to_text(p: &Polynomial, vars: &VarTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mono, coeff)) in p.terms().rev().enumerate() {
        let negative = coeff.is_negative();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let magnitude = coeff.abs();
        let unit_mono = mono.factors().is_empty();
        if !magnitude.is_one() || unit_mono {
            out.push_str(&magnitude.to_string());
            if !unit_mono {
                out.push('*');
            }
        }
        for (j, &(v, e)) in mono.factors().iter().enumerate() {
            if j > 0 {
                out.push('*');
            }
            out.push_str(vars.name(v as usize));
            if e > 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
    out
}

/// Renders a vector field as one `dxj/dt = ...` line per coordinate.
pub fn vector_field_to_text(f: &PolyVectorField, vars: &VarTable) -> String {
    f.components()
        .iter()
        .enumerate()
        .map(|(j, c)| format!("dx{}/dt = {}", j + 1, polynomial_to_text(c, vars)))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(String),
    Name(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, SymbolicError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            '/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                tokens.push((start, Token::Int(text[start..i].to_string())));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Name(text[start..i].to_string())));
            }
            _ => {
                return Err(SymbolicError::Parse {
                    pos: i,
                    message: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    vars: &'a VarTable,
    text_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.text_len, |(offset, _)| *offset)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SymbolicError> {
        Err(SymbolicError::Parse {
            pos: self.here(),
            message: message.into(),
        })
    }

    fn parse_uint(&mut self) -> Result<BigInt, SymbolicError> {
        match self.advance() {
            Some(Token::Int(digits)) => Ok(BigInt::from_str(&digits).expect("digits parse")),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.fail("expected an integer")
            }
        }
    }

    /// factor := int [ '/' int ] | name [ '^' int ]
    fn parse_factor(&mut self) -> Result<Polynomial, SymbolicError> {
        match self.advance() {
            Some(Token::Int(digits)) => {
                let numer = BigInt::from_str(&digits).expect("digits parse");
                let denom = if self.peek() == Some(&Token::Slash) {
                    self.advance();
                    let d = self.parse_uint()?;
                    if d == BigInt::from(0) {
                        return self.fail("zero denominator");
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                Ok(Polynomial::constant(BigRational::new(numer, denom)))
            }
            Some(Token::Name(name)) => {
                let Some(index) = self.vars.index_of(&name) else {
                    return Err(SymbolicError::UnknownVariable(name));
                };
                let exp = if self.peek() == Some(&Token::Caret) {
                    self.advance();
                    let e = self.parse_uint()?;
                    u32::try_from(e).map_err(|_| SymbolicError::Parse {
                        pos: self.here(),
                        message: "exponent too large".into(),
                    })?
                } else {
                    1
                };
                let mut mono = Monomial::unit();
                for _ in 0..exp {
                    mono = mono.product(&Monomial::var(index));
                }
                let mut p = Polynomial::zero();
                p.add_term(mono, BigRational::one());
                Ok(p)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.fail("expected a coefficient or variable")
            }
        }
    }

    /// term := factor ( '*' factor )*
    fn parse_term(&mut self) -> Result<Polynomial, SymbolicError> {
        let mut p = self.parse_factor()?;
        while self.peek() == Some(&Token::Star) {
            self.advance();
            let f = self.parse_factor()?;
            p = &p * &f;
        }
        Ok(p)
    }

    /// poly := [ '-' ] term ( ('+' | '-') term )*
    fn parse_poly(&mut self) -> Result<Polynomial, SymbolicError> {
        let mut negate = false;
        if self.peek() == Some(&Token::Minus) {
            self.advance();
            negate = true;
        }
        let mut total = self.parse_term()?;
        if negate {
            total = -&total;
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    let t = self.parse_term()?;
                    total = &total + &t;
                }
                Some(Token::Minus) => {
                    self.advance();
                    let t = self.parse_term()?;
                    total = &total - &t;
                }
                None => return Ok(total),
                Some(_) => return self.fail("expected + or - between terms"),
            }
        }
    }
}

/// Parses a polynomial in the canonical grammar against a variable table.
pub fn parse_polynomial(text: &str, vars: &VarTable) -> Result<Polynomial, SymbolicError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(SymbolicError::Parse {
            pos: 0,
            message: "empty input".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
        text_len: text.len(),
    };
    if parser.peek() == Some(&Token::Int("0".to_string())) && parser.tokens.len() == 1 {
        return Ok(Polynomial::zero());
    }
    parser.parse_poly()
}
