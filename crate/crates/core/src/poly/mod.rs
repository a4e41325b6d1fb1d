//! Dense univariate polynomials over a DifferenceField.

pub mod factor;

use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, Scalar};
use num_bigint::BigUint;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub field: DifferenceField,
    /// Low degree first, no trailing zeros.
    pub c: Vec<Scalar>,
}

pub use factor::{factor_over_finite_field, FactorList};

impl Poly {
    pub fn new(k: &DifferenceField, mut c: Vec<Scalar>) -> Self {
        while c.last().map_or(false, |x| k.is_zero(x)) {
            c.pop();
        }
        Poly { field: k.clone(), c }
    }

    pub fn zero(k: &DifferenceField) -> Self {
        Poly { field: k.clone(), c: vec![] }
    }

    pub fn constant(k: &DifferenceField, a: Scalar) -> Self {
        Poly::new(k, vec![a])
    }

    pub fn one(k: &DifferenceField) -> Self {
        Poly::constant(k, k.one())
    }

    pub fn x(k: &DifferenceField) -> Self {
        Poly::new(k, vec![k.zero(), k.one()])
    }

    /// Parse an expression in `x` (field symbols as in `DifferenceField::parse`).
    pub fn parse(k: &DifferenceField, s: &str) -> Result<Self> {
        let e = crate::expr::parse(s)?;
        crate::expr::eval(&PolyTarget(k), &e)
    }

    pub fn from_ints(k: &DifferenceField, c: &[i64]) -> Self {
        Poly::new(k, c.iter().map(|&v| k.from_i64(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn degree(&self) -> usize {
        self.deg().unwrap_or(0)
    }

    pub fn lc(&self) -> Option<&Scalar> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn check(&self, o: &Poly) -> Result<()> {
        if self.field != o.field {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let k = &self.field;
        let n = self.c.len().max(o.c.len());
        Poly::new(k, (0..n).map(|i| k.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let k = &self.field;
        let n = self.c.len().max(o.c.len());
        Poly::new(k, (0..n).map(|i| k.sub(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| self.field.neg(x)).collect())
    }

    pub fn scale(&self, a: &Scalar) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| self.field.mul(x, a)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let k = &self.field;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(k);
        }
        let mut r = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !k.is_zero(b) {
                    r[i + j] = k.add(&r[i + j], &k.mul(a, b));
                }
            }
        }
        Poly::new(k, r)
    }

    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => self.clone(),
            Some(l) => self.scale(&self.field.inv(l).unwrap()),
        }
    }

    pub fn divmod(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.check(d)?;
        let k = &self.field;
        let dd = d.deg().ok_or_else(|| Error::Domain("division by zero polynomial".into()))?;
        let li = k.inv(d.lc().unwrap())?;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(k), self.clone()));
        }
        let mut q = vec![k.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if k.is_zero(&r[i]) {
                continue;
            }
            let f = k.mul(&r[i], &li);
            for (j, dj) in d.c.iter().enumerate() {
                r[i - dd + j] = k.sub(&r[i - dd + j], &k.mul(&f, dj));
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        Ok((Poly::new(k, q), Poly::new(k, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divmod(d)?.1)
    }

    pub fn derivative(&self) -> Poly {
        let k = &self.field;
        Poly::new(k, self.c.iter().enumerate().skip(1).map(|(i, a)| k.mul(a, &k.from_u64(i as u64))).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let k = &self.field;
        let mut r = k.zero();
        for a in self.c.iter().rev() {
            r = k.add(&k.mul(&r, x), a);
        }
        r
    }

    /// self^e mod m.
    pub fn pow_mod(&self, e: &BigUint, m: &Poly) -> Result<Poly> {
        let mut r = Poly::one(&self.field).rem(m)?;
        let b = self.rem(m)?;
        for i in (0..e.bits()).rev() {
            r = r.mul(&r).rem(m)?;
            if e.bit(i) {
                r = r.mul(&b).rem(m)?;
            }
        }
        Ok(r)
    }

    /// Apply sigma to every coefficient.
    pub fn sigma_twist(&self) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| self.field.sigma(x)).collect())
    }

    pub fn is_separable(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Domain("zero polynomial".into()));
        }
        Ok(poly_gcd(self, &self.derivative())?.degree() == 0)
    }
}

/// Monic gcd.
pub fn poly_gcd(f: &Poly, g: &Poly) -> Result<Poly> {
    f.check(g)?;
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// (g, s, t) with s f + t h = g monic.
pub fn poly_gcdext(f: &Poly, h: &Poly) -> Result<(Poly, Poly, Poly)> {
    f.check(h)?;
    let k = &f.field;
    let (mut r0, mut r1) = (f.clone(), h.clone());
    let (mut s0, mut s1) = (Poly::one(k), Poly::zero(k));
    let (mut t0, mut t1) = (Poly::zero(k), Poly::one(k));
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1)?;
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match r0.lc().cloned() {
        None => Ok((r0, s0, t0)),
        Some(l) => {
            let li = k.inv(&l)?;
            Ok((r0.scale(&li), s0.scale(&li), t0.scale(&li)))
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.field;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if k.is_zero(a) {
                continue;
            }
            let s = k.format(a);
            let simple = !s[1..].contains(['+', '-', '/']);
            let coeff = if simple { s.clone() } else { format!("({s})") };
            let (neg, body) = if simple && s.starts_with('-') { (true, coeff[1..].to_string()) } else { (false, coeff) };
            if !first {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            match (i, body.as_str()) {
                (0, b) => write!(f, "{b}")?,
                (_, "1") => write!(f, "{mono}")?,
                (_, b) => write!(f, "{b}*{mono}")?,
            }
        }
        Ok(())
    }
}

struct PolyTarget<'a>(&'a DifferenceField);

impl crate::expr::Target for PolyTarget<'_> {
    type V = Poly;
    fn int(&self, n: &num_bigint::BigInt) -> Result<Poly> {
        Ok(Poly::constant(self.0, self.0.from_bigint(n)))
    }
    fn sym(&self, name: &str) -> Result<Poly> {
        if name == "x" {
            return Ok(Poly::x(self.0));
        }
        Ok(Poly::constant(self.0, self.0.parse(name)?))
    }
    fn add(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(a.add(b))
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(a.sub(b))
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(a.mul(b))
    }
    fn neg(&self, a: &Poly) -> Result<Poly> {
        Ok(a.neg())
    }
    fn div(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        match b.deg() {
            Some(0) => Ok(a.scale(&self.0.inv(&b.c[0])?)),
            _ => Err(Error::Input("division by a non-constant polynomial".into())),
        }
    }
    fn sigma(&self, k: u32, a: &Poly) -> Result<Poly> {
        let mut r = a.clone();
        for _ in 0..k {
            r = r.sigma_twist();
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_examples() {
        let q = DifferenceField::rationals();
        let g = poly_gcd(&Poly::from_ints(&q, &[-1, 0, 1]), &Poly::from_ints(&q, &[-1, 1])).unwrap();
        assert_eq!(g, Poly::from_ints(&q, &[-1, 1]));
        let f2 = DifferenceField::prime(2, 1).unwrap();
        let g = poly_gcd(&Poly::from_ints(&f2, &[1, 0, 1, 0, 1]), &Poly::from_ints(&f2, &[1, 1, 1])).unwrap();
        assert_eq!(g, Poly::from_ints(&f2, &[1, 1, 1]));
        let f = Poly::from_ints(&q, &[2, 0, 4]);
        assert_eq!(poly_gcd(&f, &Poly::zero(&q)).unwrap(), f.monic());
    }

    #[test]
    fn separability_examples() {
        let f5 = DifferenceField::prime(5, 1).unwrap();
        assert!(Poly::from_ints(&f5, &[-1, 0, 1]).is_separable().unwrap());
        let f2 = DifferenceField::prime(2, 1).unwrap();
        assert!(Poly::from_ints(&f2, &[1, 1, 1]).is_separable().unwrap());
        let k = DifferenceField::shift(&f5).unwrap();
        let f = Poly::parse(&k, "x^5-t0").unwrap();
        assert!(!f.is_separable().unwrap());
        assert!(Poly::zero(&f5).is_separable().is_err());
    }

    #[test]
    fn twist_over_qt() {
        let q = DifferenceField::rationals();
        let k = DifferenceField::rational_function(&q, vec![q.zero(), q.zero(), q.one()], vec![q.one()]).unwrap();
        let f = Poly::parse(&k, "x^2-t").unwrap();
        assert_eq!(f.sigma_twist(), Poly::parse(&k, "x^2-t^2").unwrap());
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Poly::x(&DifferenceField::prime(2, 0).unwrap());
        let b = Poly::x(&DifferenceField::prime(3, 0).unwrap());
        assert_eq!(poly_gcd(&a, &b).unwrap_err(), Error::MixedFields);
    }
}
