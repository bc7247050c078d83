//! Metric component expressions: parsing, printing and Taylor expansion.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('+' | '-') factor | atom ('^' ['-'] integer)?
//! atom   := number | 'x' index | func '(' expr ')' | '(' expr ')'
//! func   := exp | sin | cos          (float mode only)
//! ```

mod metric;

pub use metric::{AmbiguitySpec, MetricSpec, Mode};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use malachite_base::num::arithmetic::traits::Pow;
use malachite_base::num::basic::traits::Zero;
use malachite_nz::natural::Natural;
use malachite_q::Rational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{JetSpace, MultiJet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Expression tree. Variables are 0-based (`x1` is `Var(0)`).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str, dim: usize) -> Result<Expr> {
        let mut p = Parser { src, chars: src.char_indices().collect(), pos: 0, dim };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Base coordinates the expression depends on.
    pub fn variables(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.variables(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }

    pub fn uses_transcendental(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Call(..) => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_transcendental(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.uses_transcendental() || b.uses_transcendental()
            }
        }
    }

    /// Taylor expansion at `base` (one value per base coordinate).
    pub fn to_jet<S: Scalar>(&self, space: &Arc<JetSpace<S>>, base: &[S]) -> Result<MultiJet<S>> {
        Ok(match self {
            Expr::Num(q) => MultiJet::constant(space, S::from_rational(space.ctx(), q)),
            Expr::Var(i) => {
                let x0 = base
                    .get(*i)
                    .cloned()
                    .ok_or_else(|| Error::UnknownIdentifier(format!("x{}", i + 1)))?;
                MultiJet::coordinate(space, *i, x0)
            }
            Expr::Neg(a) => a.to_jet(space, base)?.neg(),
            Expr::Add(a, b) => a.to_jet(space, base)?.add(&b.to_jet(space, base)?),
            Expr::Sub(a, b) => a.to_jet(space, base)?.sub(&b.to_jet(space, base)?),
            Expr::Mul(a, b) => a.to_jet(space, base)?.mul(&b.to_jet(space, base)?),
            Expr::Div(a, b) => {
                let d = b.to_jet(space, base)?;
                let inv = d.inverse().map_err(|_| {
                    Error::Domain(format!("division by `{b}`, which vanishes at the base point"))
                })?;
                a.to_jet(space, base)?.mul(&inv)
            }
            Expr::Pow(a, k) => {
                let j = a.to_jet(space, base)?;
                j.pow(*k).map_err(|_| {
                    Error::Domain(format!("negative power of `{a}`, which vanishes at the base point"))
                })?
            }
            Expr::Call(f, a) => a.to_jet(space, base)?.transcendental(f.name())?,
        })
    }

    /// Exact value when the expression is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        match self {
            Expr::Num(q) => Some(q.clone()),
            Expr::Var(_) | Expr::Call(..) => None,
            Expr::Neg(a) => Some(-a.constant_value()?),
            Expr::Add(a, b) => Some(a.constant_value()? + b.constant_value()?),
            Expr::Sub(a, b) => Some(a.constant_value()? - b.constant_value()?),
            Expr::Mul(a, b) => Some(a.constant_value()? * b.constant_value()?),
            Expr::Div(a, b) => {
                let d = b.constant_value()?;
                if d == Rational::ZERO {
                    None
                } else {
                    Some(a.constant_value()? / d)
                }
            }
            Expr::Pow(a, k) => {
                let v = a.constant_value()?;
                if *k < 0 && v == Rational::ZERO {
                    None
                } else {
                    Some((&v).pow(*k))
                }
            }
        }
    }
}

fn decimal_string(q: &Rational) -> Option<String> {
    let (num, den) = q.to_numerator_and_denominator();
    let mut d = den.clone();
    let (two, five) = (Natural::from(2u32), Natural::from(5u32));
    let mut scale = 0u64;
    let mut mult = Natural::from(1u32);
    while d != Natural::from(1u32) {
        if &d % &two == Natural::ZERO {
            d /= &two;
            mult *= &five;
        } else if &d % &five == Natural::ZERO {
            d /= &five;
            mult *= &two;
        } else {
            return None;
        }
        scale += 1;
    }
    let scaled = (num * mult).to_string();
    if scale == 0 {
        return Some(scaled);
    }
    let width = scale as usize + 1;
    let padded = format!("{:0>width$}", scaled);
    let (int, frac) = padded.split_at(padded.len() - scale as usize);
    Some(format!("{int}.{frac}"))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => {
                if *q < Rational::ZERO {
                    write!(f, "({q})")
                } else if let Some(s) = decimal_string(q) {
                    write!(f, "{s}")
                } else {
                    write!(f, "({q})")
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        let offset = self.chars.get(self.pos).map(|c| c.0).unwrap_or(self.src.len());
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        Error::Parse { line, col, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        if self.eat('+') {
            return self.factor();
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.err("exponent must be an integer"));
            }
            if self.peek() == Some('.') {
                return Err(self.err("exponent must be an integer"));
            }
            let k: i64 = digits.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let int = self.digits();
                let mut frac = String::new();
                if self.peek() == Some('.') {
                    self.pos += 1;
                    frac = self.digits();
                }
                if int.is_empty() && frac.is_empty() {
                    return Err(self.err("malformed number"));
                }
                let all = format!("{int}{frac}");
                let num: Natural = all.parse().map_err(|_| self.err("malformed number"))?;
                let den = Natural::from(10u32).pow(frac.len() as u64);
                Ok(Expr::Num(Rational::from_naturals(num, den)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let mut name = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    name.push(c);
                    self.pos += 1;
                }
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(func) = func {
                    if !self.eat('(') {
                        return Err(self.err("expected `(` after function name"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.err("expected `)`"));
                    }
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(idx) = name.strip_prefix('x') {
                    if let Ok(i) = idx.parse::<usize>() {
                        if i >= 1 && i <= self.dim && !idx.starts_with('0') {
                            return Ok(Expr::Var(i - 1));
                        }
                    }
                }
                self.pos = start;
                Err(Error::UnknownIdentifier(name))
            }
            Some(c) => Err(self.err(&format!("unexpected character `{c}`"))),
        }
    }
}
