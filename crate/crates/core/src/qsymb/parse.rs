//! Operator-expression parser.
//!
//! ```text
//! sum     := term (('+' | '-') term)*
//! term    := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= integer | '(' integer ')'
//! primary := number | identifier | '(' sum ')'
//! ```
//!
//! Identifiers: `i`, `q`, `sqrtq` (`q^{1/2}`), `hbar`, generator names
//! (`x p L Linv a adag y xt yt Lt Sx Sy Sz`) and any parameters declared in
//! the [`ParseContext`]. Division is only by single-term scalars.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::coeff::QCoefficient;
use super::poly::{Generator, QPolynomial};
use super::SymbError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseContext {
    params: BTreeSet<String>,
}

const RESERVED: [&str; 4] = ["i", "q", "sqrtq", "hbar"];

impl ParseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_params<S: AsRef<str>>(names: &[S]) -> Self {
        Self { params: names.iter().map(|s| s.as_ref().to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SymbError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' | '.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &text[start..i];
                let mut frac_part = "";
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_part = &text[fstart..i];
                }
                if int_part.is_empty() && frac_part.is_empty() {
                    return Err(SymbError::Syntax { pos: start, msg: "malformed number".into() });
                }
                let digits = format!("{int_part}{frac_part}");
                let numer: BigInt = digits.parse().map_err(|_| SymbError::Syntax {
                    pos: start,
                    msg: "malformed number".into(),
                })?;
                let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
                out.push((start, Tok::Num(BigRational::new(numer, denom))));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(SymbError::Syntax { pos: start, msg: format!("unexpected character '{other}'") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ctx: &'a ParseContext,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, SymbError> {
        Err(SymbError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn sum(&mut self) -> Result<QPolynomial, SymbError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::LParen))
    }

    fn term(&mut self) -> Result<QPolynomial, SymbError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    let divisor = self.unary()?;
                    let inv = scalar_inverse(&divisor).ok_or(SymbError::InvalidDivisor { pos: at })?;
                    acc = acc.scale(&inv);
                }
                _ if self.starts_primary() => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<QPolynomial, SymbError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<QPolynomial, SymbError> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let parenthesized = matches!(self.peek(), Some(Tok::LParen));
            if parenthesized {
                self.bump();
            }
            let exp = match self.bump() {
                Some(Tok::Num(n)) if n.is_integer() => n.to_integer(),
                _ => {
                    self.pos -= 1;
                    return self.syntax("exponent must be a nonnegative integer");
                }
            };
            if parenthesized {
                match self.bump() {
                    Some(Tok::RParen) => {}
                    _ => {
                        self.pos -= 1;
                        return self.syntax("expected ')'");
                    }
                }
            }
            let exp: u32 = match exp.try_into() {
                Ok(e) => e,
                Err(_) => return self.syntax("exponent out of range"),
            };
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<QPolynomial, SymbError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(QPolynomial::scalar(QCoefficient::constant(Complex::new(n, BigRational::zero())))),
            Some(Tok::LParen) => {
                let inner = self.sum()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        self.syntax("expected ')'")
                    }
                }
            }
            Some(Tok::Ident(name)) => self.identifier(&name, at),
            Some(_) => {
                self.pos -= 1;
                self.syntax("expected a number, symbol or '('")
            }
            None => self.syntax("unexpected end of input"),
        }
    }

    fn identifier(&self, name: &str, at: usize) -> Result<QPolynomial, SymbError> {
        let scalar = |c| Ok(QPolynomial::scalar(c));
        match name {
            "i" => scalar(QCoefficient::imag()),
            "q" => scalar(QCoefficient::q_pow(1)),
            "sqrtq" => scalar(QCoefficient::sqrt_q_pow(1)),
            "hbar" => scalar(QCoefficient::hbar()),
            _ => {
                if let Some(g) = Generator::from_name(name) {
                    Ok(QPolynomial::generator(g))
                } else if self.ctx.params.contains(name) && !RESERVED.contains(&name) {
                    scalar(QCoefficient::param(name))
                } else {
                    Err(SymbError::UnknownSymbol { pos: at, name: name.to_string() })
                }
            }
        }
    }
}

fn scalar_inverse(p: &QPolynomial) -> Option<QCoefficient> {
    if p.len() != 1 {
        return None;
    }
    let (w, c) = p.terms().next()?;
    if !w.is_empty() {
        return None;
    }
    c.inverse()
}

pub fn parse(text: &str) -> Result<QPolynomial, SymbError> {
    parse_with(text, &ParseContext::default())
}

pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<QPolynomial, SymbError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(SymbError::Syntax { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), ctx };
    let out = p.sum()?;
    if p.pos < p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}
