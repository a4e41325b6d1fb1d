//! Small expression grammar shared by scalars, tower elements and difference polynomials.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' int)?
//! atom   := int | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//! `sigma(e)`, `s(e)`, `σ(e)` and `sigma^k(e)` apply the endomorphism.

use crate::error::{Error, Result};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Sigma(u32, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                // allow negative index suffix: t_-1
                i += 1;
                if i + 1 < cs.len() && cs[i - 1] == '_' && cs[i] == '-' && cs[i + 1].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Input(format!("unexpected character '{c}' in expression \"{s}\"")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    src: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::Input(format!("{what} in expression \"{}\"", self.src)))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Op('(')) | Some(Tok::Ident(_))) {
                // implicit multiplication: 2t, 3(a+b)
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                u32::try_from(n).or_else(|_| self.err("exponent too large"))
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let a = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(a), e));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if matches!(name.as_str(), "sigma" | "s" | "σ") {
                    let mut k = 1;
                    let save = self.pos;
                    if self.eat('^') {
                        k = self.exponent()?;
                    }
                    if self.eat('(') {
                        let inner = self.expr()?;
                        if !self.eat(')') {
                            return self.err("missing ')'");
                        }
                        return Ok(Expr::Sigma(k, Box::new(inner)));
                    }
                    self.pos = save;
                }
                Ok(Expr::Sym(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("missing ')'");
                }
                Ok(e)
            }
            _ => self.err("unexpected token"),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(s)?, pos: 0, src: s.to_string() };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Split an identifier like `t3`, `t_3`, `t_-1`, `y0` into (stem, index).
pub fn split_index(ident: &str) -> (String, Option<i64>) {
    if let Some(pos) = ident.rfind('_') {
        if let Ok(i) = ident[pos + 1..].parse::<i64>() {
            return (ident[..pos].to_string(), Some(i));
        }
    }
    let stem_end = ident.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if stem_end < ident.len() && stem_end > 0 {
        let idx = ident[stem_end..].parse::<i64>().ok();
        return (ident[..stem_end].to_string(), idx);
    }
    (ident.to_string(), None)
}

/// Interpretation of expressions in a concrete ring.
pub trait Target {
    type V: Clone;
    fn int(&self, n: &BigInt) -> Result<Self::V>;
    fn sym(&self, name: &str) -> Result<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn neg(&self, a: &Self::V) -> Result<Self::V>;
    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn sigma(&self, _k: u32, _a: &Self::V) -> Result<Self::V> {
        Err(Error::Input("sigma not available in this context".into()))
    }
    fn pow(&self, a: &Self::V, e: u32) -> Result<Self::V> {
        let mut r = self.int(&BigInt::from(1))?;
        for _ in 0..e {
            r = self.mul(&r, a)?;
        }
        Ok(r)
    }
}

pub fn eval<T: Target>(t: &T, e: &Expr) -> Result<T::V> {
    match e {
        Expr::Num(n) => t.int(n),
        Expr::Sym(s) => t.sym(s),
        Expr::Add(a, b) => t.add(&eval(t, a)?, &eval(t, b)?),
        Expr::Sub(a, b) => t.sub(&eval(t, a)?, &eval(t, b)?),
        Expr::Mul(a, b) => t.mul(&eval(t, a)?, &eval(t, b)?),
        Expr::Div(a, b) => t.div(&eval(t, a)?, &eval(t, b)?),
        Expr::Neg(a) => t.neg(&eval(t, a)?),
        Expr::Pow(a, k) => t.pow(&eval(t, a)?, *k),
        Expr::Sigma(k, a) => t.sigma(*k, &eval(t, a)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence() {
        let e = parse("y0^2-1").unwrap();
        assert!(matches!(e, Expr::Sub(_, _)));
        assert!(parse("sigma^2(y)+t_-1").is_ok());
        assert!(parse("(a+").is_err());
    }

    #[test]
    fn splits_indices() {
        assert_eq!(split_index("t3"), ("t".into(), Some(3)));
        assert_eq!(split_index("t_-1"), ("t".into(), Some(-1)));
        assert_eq!(split_index("a"), ("a".into(), None));
        assert_eq!(split_index("b_2"), ("b".into(), Some(2)));
    }
}
