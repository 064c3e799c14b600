//! Rational expression trees over Q(zeta_7) in named symbols, with a text
//! parser and evaluation into any target algebra.
//!
//! The grammar accepts `r` or `rho` for the root of unity, rational literals
//! like `2/3`, `+ - * / ^` with the usual precedence, and unary minus.

use std::collections::BTreeMap;
use std::fmt;

use crate::cyclotomic::{CycScalar, GaloisElem, Rat};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub enum Expr {
    Const(CycScalar),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn constant(c: CycScalar) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(CycScalar::from_i64(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, k: u32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }

    pub fn parse(input: &str) -> Result<Expr> {
        Parser::new(input)?.parse_full()
    }

    /// Substitute variables by expressions; unmapped variables stay.
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(v) => map.get(v).cloned().unwrap_or_else(|| Expr::Var(v.clone())),
            Expr::Add(a, b) => Expr::add(a.substitute(map), b.substitute(map)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(map), b.substitute(map)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(map), b.substitute(map)),
            Expr::Div(a, b) => Expr::div(a.substitute(map), b.substitute(map)),
            Expr::Neg(a) => Expr::neg(a.substitute(map)),
            Expr::Pow(a, k) => Expr::pow(a.substitute(map), *k),
        }
    }

    /// Apply a Galois element to every constant; variables untouched.
    pub fn galois_twist(&self, g: GaloisElem) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.galois(g)),
            Expr::Var(v) => Expr::Var(v.clone()),
            Expr::Add(a, b) => Expr::add(a.galois_twist(g), b.galois_twist(g)),
            Expr::Sub(a, b) => Expr::sub(a.galois_twist(g), b.galois_twist(g)),
            Expr::Mul(a, b) => Expr::mul(a.galois_twist(g), b.galois_twist(g)),
            Expr::Div(a, b) => Expr::div(a.galois_twist(g), b.galois_twist(g)),
            Expr::Neg(a) => Expr::neg(a.galois_twist(g)),
            Expr::Pow(a, k) => Expr::pow(a.galois_twist(g), *k),
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
        }
    }

    pub fn eval<C: EvalContext>(&self, ctx: &C) -> Result<C::Value> {
        match self {
            Expr::Const(c) => ctx.constant(c),
            Expr::Var(v) => ctx.var(v),
            Expr::Add(a, b) => ctx.add(&a.eval(ctx)?, &b.eval(ctx)?),
            Expr::Sub(a, b) => ctx.sub(&a.eval(ctx)?, &b.eval(ctx)?),
            Expr::Mul(a, b) => ctx.mul(&a.eval(ctx)?, &b.eval(ctx)?),
            Expr::Div(a, b) => ctx.div(&a.eval(ctx)?, &b.eval(ctx)?),
            Expr::Neg(a) => {
                let minus_one = ctx.constant(&CycScalar::from_i64(-1))?;
                ctx.mul(&minus_one, &a.eval(ctx)?)
            }
            Expr::Pow(a, k) => {
                let base = a.eval(ctx)?;
                ctx.pow(&base, *k)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Add(..) | Expr::Sub(..) => 1,
                Expr::Mul(..) | Expr::Div(..) => 2,
                Expr::Neg(..) => 1,
                Expr::Pow(..) => 3,
                Expr::Const(..) | Expr::Var(..) => 4,
            }
        }
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if prec(e) < min {
                write!(f, "({})", e)
            } else {
                write!(f, "{}", e)
            }
        }
        match self {
            Expr::Const(c) => {
                let txt = c.to_text();
                if txt.contains(' ') || txt.contains('-') || txt.contains('/') {
                    write!(f, "({})", txt.replace('r', "rho"))
                } else {
                    write!(f, "{}", txt.replace('r', "rho"))
                }
            }
            Expr::Var(v) => write!(f, "{}", v),
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Expr::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "/")?;
                wrap(f, b, 4)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 2)
            }
            Expr::Pow(a, k) => {
                wrap(f, a, 4)?;
                write!(f, "^{}", k)
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Target algebra for expression evaluation.
pub trait EvalContext {
    type Value: Clone;
    fn constant(&self, c: &CycScalar) -> Result<Self::Value>;
    fn var(&self, name: &str) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;

    fn pow(&self, a: &Self::Value, mut k: u32) -> Result<Self::Value> {
        let one = self.constant(&CycScalar::one())?;
        let mut acc = one;
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }
}

/// Evaluation with scalar bindings.
pub struct ScalarEval<'a> {
    pub bindings: &'a BTreeMap<String, CycScalar>,
}

impl<'a> EvalContext for ScalarEval<'a> {
    type Value = CycScalar;

    fn constant(&self, c: &CycScalar) -> Result<CycScalar> {
        Ok(c.clone())
    }

    fn var(&self, name: &str) -> Result<CycScalar> {
        self.bindings
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVar(name.to_string()))
    }

    fn add(&self, a: &CycScalar, b: &CycScalar) -> Result<CycScalar> {
        Ok(a + b)
    }

    fn sub(&self, a: &CycScalar, b: &CycScalar) -> Result<CycScalar> {
        Ok(a - b)
    }

    fn mul(&self, a: &CycScalar, b: &CycScalar) -> Result<CycScalar> {
        Ok(a * b)
    }

    fn div(&self, a: &CycScalar, b: &CycScalar) -> Result<CycScalar> {
        a.div_ref(b)
    }
}

/// Parse a scalar constant (no variables except `r`/`rho`).
pub fn parse_scalar(input: &str) -> Result<CycScalar> {
    let e = Expr::parse(input)?;
    let empty = BTreeMap::new();
    e.eval(&ScalarEval { bindings: &empty })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let bytes: Vec<char> = input.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let ch = bytes[i];
            match ch {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1;
                }
                '-' | '\u{2212}' => {
                    tokens.push(Token::Minus);
                    i += 1;
                }
                '*' | '\u{22c5}' | '\u{00b7}' => {
                    tokens.push(Token::Star);
                    i += 1;
                }
                '/' => {
                    tokens.push(Token::Slash);
                    i += 1;
                }
                '^' => {
                    tokens.push(Token::Caret);
                    i += 1;
                }
                '(' => {
                    tokens.push(Token::LParen);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::RParen);
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = bytes[start..i].iter().collect();
                    let n = text
                        .parse::<num::BigInt>()
                        .map_err(|e| Error::Parse(format!("bad integer `{}`: {}", text, e)))?;
                    tokens.push(Token::Num(Rat::from_integer(n)));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_')
                    {
                        i += 1;
                    }
                    let text: String = bytes[start..i].iter().collect();
                    tokens.push(Token::Ident(text));
                }
                c => return Err(Error::Parse(format!("unexpected character `{}`", c))),
            }
        }
        Ok(Parser { tokens, pos: 0 })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_full(&mut self) -> Result<Expr> {
        let e = self.parse_sum()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Parse(format!(
                "trailing tokens at position {}",
                self.pos
            )));
        }
        Ok(e)
    }

    fn parse_sum(&mut self) -> Result<Expr> {
        let mut acc = self.parse_product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    let rhs = self.parse_product()?;
                    acc = Expr::add(acc, rhs);
                }
                Some(Token::Minus) => {
                    self.next();
                    let rhs = self.parse_product()?;
                    acc = Expr::sub(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<Expr> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    let rhs = self.parse_unary()?;
                    acc = Expr::mul(acc, rhs);
                }
                Some(Token::Slash) => {
                    self.next();
                    let rhs = self.parse_unary()?;
                    acc = Expr::div(acc, rhs);
                }
                // Implicit multiplication: `3rho`, `(x-1)(x-2)`, `2t1`.
                Some(Token::Ident(_)) | Some(Token::LParen) | Some(Token::Num(_)) => {
                    let rhs = self.parse_unary()?;
                    acc = Expr::mul(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.next();
                Ok(Expr::neg(self.parse_unary()?))
            }
            Some(Token::Plus) => {
                self.next();
                self.parse_unary()
            }
            _ => self.parse_power(),
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.next();
            let exp = match self.next() {
                Some(Token::Num(n)) => n,
                other => {
                    return Err(Error::Parse(format!(
                        "expected integer exponent, found {:?}",
                        other
                    )))
                }
            };
            if !exp.is_integer() {
                return Err(Error::Parse("exponent must be an integer".into()));
            }
            let k: u32 = exp
                .to_integer()
                .try_into()
                .map_err(|_| Error::Parse("exponent out of range".into()))?;
            return Ok(Expr::pow(base, k));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(n)) => Ok(Expr::Const(CycScalar::from_rat(n))),
            Some(Token::Ident(name)) => {
                if name == "r" || name == "rho" {
                    Ok(Expr::Const(CycScalar::rho()))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Token::LParen) => {
                let e = self.parse_sum()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    other => Err(Error::Parse(format!(
                        "expected `)`, found {:?}",
                        other
                    ))),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rat_frac;

    #[test]
    fn parse_scalar_text() {
        let a = parse_scalar("1/2 - 3*r^2").unwrap();
        assert_eq!(*a.coeff(0), rat_frac(1, 2));
        assert_eq!(*a.coeff(2), rat_frac(-3, 1));
        // rho alias and power reduction beyond 6
        let b = parse_scalar("rho^8").unwrap();
        assert_eq!(b, CycScalar::rho());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_scalar("1 +").is_err());
        assert!(parse_scalar("@").is_err());
    }

    #[test]
    fn scalar_round_trip() {
        let a = parse_scalar("2/3 + r - 5*r^4").unwrap();
        let b = parse_scalar(&a.to_text()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eval_with_bindings() {
        let e = Expr::parse("(x - rho)*(x + rho)").unwrap();
        let mut env = BTreeMap::new();
        env.insert("x".to_string(), CycScalar::rho());
        let v = e.eval(&ScalarEval { bindings: &env }).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn implicit_multiplication() {
        let e = Expr::parse("3rho^2 x").unwrap();
        let mut env = BTreeMap::new();
        env.insert("x".to_string(), CycScalar::from_i64(2));
        let v = e.eval(&ScalarEval { bindings: &env }).unwrap();
        assert_eq!(v, CycScalar::rho_pow(2).scale(&rat_frac(6, 1)));
    }

    #[test]
    fn division_by_zero_reported() {
        let e = Expr::parse("1/(rho - rho)").unwrap();
        let env = BTreeMap::new();
        assert!(e.eval(&ScalarEval { bindings: &env }).is_err());
    }
}
