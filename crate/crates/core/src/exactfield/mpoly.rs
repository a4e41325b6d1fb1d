//! Sparse multivariate polynomials over a constant field, with exact division and gcd.

use super::{DifferenceField, Scalar};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Monomial as sorted (variable, exponent) pairs, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub Vec<(i32, u32)>);

impl Ord for Mono {
    /// Lexicographic with higher variable indices more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter().rev();
        let mut b = other.0.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        return va.cmp(&vb);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: i32, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut r = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            if j == o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                r.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || o.0[j].0 < self.0[i].0 {
                r.push(o.0[j]);
                j += 1;
            } else {
                r.push((self.0[i].0, self.0[i].1 + o.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Mono(r)
    }

    /// self / o if o divides self.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut r = Vec::new();
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == v {
                let f = o.0[j].1;
                j += 1;
                if f > e {
                    return None;
                }
                if f < e {
                    r.push((v, e - f));
                }
            } else {
                r.push((v, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Mono(r))
    }

    pub fn exp(&self, v: i32) -> u32 {
        self.0.iter().find(|x| x.0 == v).map(|x| x.1).unwrap_or(0)
    }

    pub fn without(&self, v: i32) -> Mono {
        Mono(self.0.iter().copied().filter(|x| x.0 != v).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|x| x.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    pub terms: BTreeMap<Mono, Scalar>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Scalar, k: &DifferenceField) -> Self {
        let mut p = MPoly::zero();
        if !k.is_zero(&c) {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn one(k: &DifferenceField) -> Self {
        MPoly::constant(k.one(), k)
    }

    pub fn var(v: i32, k: &DifferenceField) -> Self {
        let mut p = MPoly::zero();
        p.terms.insert(Mono::var(v, 1), k.one());
        p
    }

    pub fn monomial(m: Mono, c: Scalar, k: &DifferenceField) -> Self {
        let mut p = MPoly::zero();
        if !k.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::one()))
    }

    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, o: &MPoly, k: &DifferenceField) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            add_term(&mut r.terms, m.clone(), c.clone(), k);
        }
        r
    }

    pub fn sub(&self, o: &MPoly, k: &DifferenceField) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            add_term(&mut r.terms, m.clone(), k.neg(c), k);
        }
        r
    }

    pub fn neg(&self, k: &DifferenceField) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), k.neg(c))).collect() }
    }

    pub fn scale(&self, c: &Scalar, k: &DifferenceField) -> MPoly {
        if k.is_zero(c) {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), k.mul(x, c))).collect() }
    }

    pub fn mul_term(&self, mono: &Mono, c: &Scalar, k: &DifferenceField) -> MPoly {
        if k.is_zero(c) {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, x)| (m.mul(mono), k.mul(x, c))).collect() }
    }

    pub fn mul(&self, o: &MPoly, k: &DifferenceField) -> MPoly {
        let mut r = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                add_term(&mut r, m1.mul(m2), k.mul(c1, c2), k);
            }
        }
        MPoly { terms: r }
    }

    pub fn pow(&self, e: u32, k: &DifferenceField) -> MPoly {
        let mut r = MPoly::one(k);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, k);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, k);
            }
        }
        r
    }

    pub fn vars(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().flat_map(|m| m.0.iter().map(|x| x.0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_var(&self) -> Option<i32> {
        self.terms.keys().filter_map(|m| m.0.last().map(|x| x.0)).max()
    }

    pub fn min_var(&self) -> Option<i32> {
        self.terms.keys().filter_map(|m| m.0.first().map(|x| x.0)).min()
    }

    pub fn degree_in(&self, v: i32) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Coefficient of v^d, as a polynomial not involving v.
    pub fn coeff_in(&self, v: i32, d: u32) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == d)
                .map(|(m, c)| (m.without(v), c.clone()))
                .collect(),
        }
    }

    pub fn coeffs_in(&self, v: i32) -> Vec<MPoly> {
        let d = self.degree_in(v);
        let mut out = vec![MPoly::zero(); d as usize + 1];
        for (m, c) in &self.terms {
            out[m.exp(v) as usize].terms.insert(m.without(v), c.clone());
        }
        out
    }

    pub fn map_vars(&self, f: impl Fn(i32) -> i32) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut v: Vec<(i32, u32)> = m.0.iter().map(|&(x, e)| (f(x), e)).collect();
                    v.sort_unstable();
                    (Mono(v), c.clone())
                })
                .collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar, k: &DifferenceField) -> MPoly {
        let mut r = BTreeMap::new();
        for (m, c) in &self.terms {
            add_term(&mut r, m.clone(), f(c), k);
        }
        MPoly { terms: r }
    }

    /// Substitute scalars for some variables.
    pub fn eval_vars(&self, vals: &dyn Fn(i32) -> Option<Scalar>, k: &DifferenceField) -> MPoly {
        let mut r = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match vals(v) {
                    Some(x) => coeff = k.mul(&coeff, &k.pow(&x, e as u64)),
                    None => rest.push((v, e)),
                }
            }
            add_term(&mut r, Mono(rest), coeff, k);
        }
        MPoly { terms: r }
    }

    /// Exact quotient, or None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly, k: &DifferenceField) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        let dci = k.inv(dc).ok()?;
        if let Some(c) = d.as_constant() {
            let ci = k.inv(&c).ok()?;
            return Some(self.scale(&ci, k));
        }
        let mut r = self.clone();
        let mut q = MPoly::zero();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(dm)?;
            let c = k.mul(rc, &dci);
            r = r.sub(&d.mul_term(&m, &c, k), k);
            add_term(&mut q.terms, m, c, k);
        }
        Some(q)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self, k: &DifferenceField) -> MPoly {
        match self.leading() {
            None => MPoly::zero(),
            Some((_, c)) => {
                let ci = k.inv(c).expect("nonzero");
                self.scale(&ci, k)
            }
        }
    }

    /// Monic gcd.
    pub fn gcd(a: &MPoly, b: &MPoly, k: &DifferenceField) -> MPoly {
        if a.is_zero() {
            return b.monic(k);
        }
        if b.is_zero() {
            return a.monic(k);
        }
        if a.is_constant() || b.is_constant() {
            return MPoly::one(k);
        }
        let v = a.max_var().max(b.max_var()).expect("nonconstant");
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 {
            return MPoly::gcd(a, &b.content_in(v, k), k);
        }
        if db == 0 {
            return MPoly::gcd(&a.content_in(v, k), b, k);
        }
        let ca = a.content_in(v, k);
        let cb = b.content_in(v, k);
        let c = MPoly::gcd(&ca, &cb, k);
        let mut x = a.div_exact(&ca, k).expect("content divides");
        let mut y = b.div_exact(&cb, k).expect("content divides");
        if x.degree_in(v) < y.degree_in(v) {
            std::mem::swap(&mut x, &mut y);
        }
        loop {
            let r = prem(&x, &y, v, k);
            if r.is_zero() {
                break;
            }
            if r.degree_in(v) == 0 {
                return c.monic(k);
            }
            x = y;
            y = r.primitive_in(v, k);
        }
        c.mul(&y.primitive_in(v, k), k).monic(k)
    }

    pub fn content_in(&self, v: i32, k: &DifferenceField) -> MPoly {
        let mut g = MPoly::zero();
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = MPoly::gcd(&g, &c, k);
            if g.is_constant() {
                return MPoly::one(k);
            }
        }
        g
    }

    pub fn primitive_in(&self, v: i32, k: &DifferenceField) -> MPoly {
        let c = self.content_in(v, k);
        self.div_exact(&c, k).expect("content divides")
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: i32, k: &DifferenceField) -> MPoly {
        let mut r = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut mm: Vec<(i32, u32)> = m.0.clone();
            for x in mm.iter_mut() {
                if x.0 == v {
                    x.1 -= 1;
                }
            }
            mm.retain(|x| x.1 > 0);
            add_term(&mut r, Mono(mm), k.mul(c, &k.from_i64(e as i64)), k);
        }
        MPoly { terms: r }
    }
}

fn add_term(t: &mut BTreeMap<Mono, Scalar>, m: Mono, c: Scalar, k: &DifferenceField) {
    if k.is_zero(&c) {
        return;
    }
    match t.get_mut(&m) {
        Some(x) => {
            let s = k.add(x, &c);
            if k.is_zero(&s) {
                t.remove(&m);
            } else {
                *x = s;
            }
        }
        None => {
            t.insert(m, c);
        }
    }
}

/// Pseudo-remainder of a by b with respect to v.
fn prem(a: &MPoly, b: &MPoly, v: i32, k: &DifferenceField) -> MPoly {
    let db = b.degree_in(v);
    let lb = b.coeff_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeff_in(v, dr);
        let shift = MPoly::monomial(Mono::var(v, dr - db), k.one(), k);
        r = r.mul(&lb, k).sub(&lr.mul(&shift, k).mul(b, k), k);
    }
    r
}
