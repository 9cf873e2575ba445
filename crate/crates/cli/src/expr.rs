//! Generator token expressions: rationals, square roots and the symbol `R`.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | power`, `power := atom ('^' integer)?`,
//! `atom := number | 'R' | 'sqrtN' | 'sqrt' '(' expr ')' | '(' expr ')'`.

use std::collections::BTreeMap;
use std::fmt;

use lattice_ext::scalar::{squarefree_part, Rational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character {0:?} at {1}")]
    Unexpected(char, usize),
    #[error("unexpected end of expression")]
    Eof,
    #[error("trailing input at {0}")]
    Trailing(usize),
    #[error("bad number {0:?}")]
    Number(String),
    #[error("symbol R used but r_squared is not declared")]
    NoR,
    #[error("square root of a non-rational or negative value")]
    BadSqrt,
    #[error("division by zero")]
    DivZero,
    #[error("division by a sum of distinct radicals")]
    DivRadicalSum,
    #[error("exponent must be an integer")]
    BadExponent,
    #[error("arithmetic overflow")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    R,
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn skip(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        loop {
            if self.eat(b'+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat(b'-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.unary()?;
        loop {
            if self.eat(b'*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.eat(b'+');
        let a = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let txt = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
            let k: i32 = txt.parse().map_err(|_| ExprError::BadExponent)?;
            return Ok(Expr::Pow(Box::new(a), if neg { -k } else { k }));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(ExprError::Eof),
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.unexpected());
                }
                Ok(e)
            }
            Some(b'R') => {
                self.i += 1;
                Ok(Expr::R)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) if self.s[self.i..].starts_with(b"sqrt") => {
                self.i += 4;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    Ok(Expr::Sqrt(Box::new(self.number()?)))
                } else if self.eat(b'(') {
                    let e = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.unexpected());
                    }
                    Ok(Expr::Sqrt(Box::new(e)))
                } else {
                    Err(self.unexpected())
                }
            }
            Some(_) => Err(self.unexpected()),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        self.skip();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
            self.i += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
        parse_decimal(txt).map(Expr::Num).ok_or_else(|| ExprError::Number(txt.into()))
    }

    fn unexpected(&mut self) -> ExprError {
        match self.s.get(self.i) {
            Some(&c) => ExprError::Unexpected(c as char, self.i),
            None => ExprError::Eof,
        }
    }
}

fn parse_decimal(txt: &str) -> Option<Rational> {
    let (int, frac) = txt.split_once('.').unwrap_or((txt, ""));
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: i128 = digits.parse().ok()?;
    let d = 10i128.checked_pow(frac.len() as u32)?;
    Some(Rational::new(n, d))
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { s: src.as_bytes(), i: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(ExprError::Trailing(p.i));
    }
    Ok(e)
}

impl Expr {
    pub fn eval_f64(&self, r: Option<f64>) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(q) => q.to_f64().ok_or(ExprError::Overflow)?,
            Expr::R => r.ok_or(ExprError::NoR)?,
            Expr::Sqrt(a) => {
                let v = a.eval_f64(r)?;
                if v < 0.0 {
                    return Err(ExprError::BadSqrt);
                }
                v.sqrt()
            }
            Expr::Neg(a) => -a.eval_f64(r)?,
            Expr::Add(a, b) => a.eval_f64(r)? + b.eval_f64(r)?,
            Expr::Sub(a, b) => a.eval_f64(r)? - b.eval_f64(r)?,
            Expr::Mul(a, b) => a.eval_f64(r)? * b.eval_f64(r)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(r)?;
                if d == 0.0 {
                    return Err(ExprError::DivZero);
                }
                a.eval_f64(r)? / d
            }
            Expr::Pow(a, k) => a.eval_f64(r)?.powi(*k),
        })
    }

    /// Exact value; `r` is `R` as a radical when declared.
    pub fn eval_exact(&self, r: Option<&Radical>) -> Result<Radical, ExprError> {
        Ok(match self {
            Expr::Num(q) => Radical::rational(*q),
            Expr::R => r.cloned().ok_or(ExprError::NoR)?,
            Expr::Sqrt(a) => {
                let v = a.eval_exact(r)?;
                Radical::sqrt(&v.as_rational().ok_or(ExprError::BadSqrt)?)?
            }
            Expr::Neg(a) => a.eval_exact(r)?.neg(),
            Expr::Add(a, b) => a.eval_exact(r)?.add(&b.eval_exact(r)?),
            Expr::Sub(a, b) => a.eval_exact(r)?.add(&b.eval_exact(r)?.neg()),
            Expr::Mul(a, b) => a.eval_exact(r)?.mul(&b.eval_exact(r)?)?,
            Expr::Div(a, b) => a.eval_exact(r)?.mul(&b.eval_exact(r)?.inv()?)?,
            Expr::Pow(a, k) => {
                let base = a.eval_exact(r)?;
                let base = if *k < 0 { base.inv()? } else { base };
                let mut acc = Radical::rational(Rational::one());
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        })
    }
}

/// `Σ c_n √n` over squarefree `n >= 1`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Radical {
    pub terms: BTreeMap<i128, Rational>,
}

impl Radical {
    pub fn rational(q: Rational) -> Self {
        let mut r = Radical::default();
        if !q.is_zero() {
            r.terms.insert(1, q);
        }
        r
    }

    /// `√q` for a nonnegative rational, as `(1/b)·√(ab)` with `q = a/b`.
    pub fn sqrt(q: &Rational) -> Result<Self, ExprError> {
        if q.is_negative() {
            return Err(ExprError::BadSqrt);
        }
        if q.is_zero() {
            return Ok(Radical::default());
        }
        let n = q.numer().checked_mul(*q.denom()).ok_or(ExprError::Overflow)?;
        let s = squarefree_part(n);
        let root = isqrt(n / s);
        let mut r = Radical::default();
        r.terms.insert(s, Rational::new(root, *q.denom()));
        Ok(r)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in &o.terms {
            let v = out.terms.get(n).copied().unwrap_or_default() + c;
            if v.is_zero() {
                out.terms.remove(n);
            } else {
                out.terms.insert(*n, v);
            }
        }
        out
    }

    fn neg(&self) -> Self {
        Radical { terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect() }
    }

    fn mul(&self, o: &Self) -> Result<Self, ExprError> {
        let mut out = Radical::default();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                // √a √b = g √(ab/g²) with g = gcd(a, b) for squarefree a, b
                let g = num_integer::Integer::gcd(a, b);
                let n = (a / g).checked_mul(b / g).ok_or(ExprError::Overflow)?;
                let c = x * y * Rational::from_integer(g);
                let mut t = Radical::default();
                t.terms.insert(n, c);
                out = out.add(&t);
            }
        }
        Ok(out)
    }

    fn inv(&self) -> Result<Self, ExprError> {
        if self.terms.is_empty() {
            return Err(ExprError::DivZero);
        }
        if self.terms.len() > 1 {
            return Err(ExprError::DivRadicalSum);
        }
        let (n, c) = self.terms.iter().next().expect("one term");
        // 1/(c√n) = √n/(c n)
        let mut t = Radical::default();
        t.terms.insert(*n, Rational::one() / (c * Rational::from_integer(*n)));
        Ok(t)
    }

    /// The squarefree radicands other than 1 that occur.
    pub fn radicands(&self) -> Vec<i128> {
        self.terms.keys().copied().filter(|&n| n != 1).collect()
    }

    pub fn part(&self, n: i128) -> Rational {
        self.terms.get(&n).copied().unwrap_or_default()
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(n, c)| if *n == 1 { c.to_string() } else { format!("{c}*sqrt{n}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn isqrt(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
