//! Factorization over finite fields: squarefree, distinct-degree, equal-degree splitting.

use super::{poly_gcd, Poly};
use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, Scalar};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq)]
pub struct FactorList {
    pub unit: Scalar,
    /// Monic irreducible factors with multiplicities, sorted by degree then coefficients.
    pub factors: Vec<(Poly, usize)>,
}

impl FactorList {
    pub fn expand(&self, k: &DifferenceField) -> Poly {
        let mut r = Poly::constant(k, self.unit.clone());
        for (f, m) in &self.factors {
            for _ in 0..*m {
                r = r.mul(f);
            }
        }
        r
    }
}

pub fn factor_over_finite_field(f: &Poly) -> Result<FactorList> {
    factor_with_seed(f, DEFAULT_SEED)
}

pub fn factor_with_seed(f: &Poly, seed: u64) -> Result<FactorList> {
    let k = &f.field;
    if !k.is_finite() {
        return Err(Error::Unsupported(format!("factorization over {}", k.name())));
    }
    let unit = f.lc().cloned().ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    let m = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (s, mult) in squarefree(&m)? {
        for (g, d) in distinct_degree(&s)? {
            for h in equal_degree(&g, d, &mut rng)? {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
    Ok(FactorList { unit, factors: out })
}

/// Roots in the base field, without multiplicity.
pub fn roots(f: &Poly) -> Result<Vec<Scalar>> {
    let fl = factor_over_finite_field(f)?;
    let k = &f.field;
    Ok(fl.factors.iter().filter(|(g, _)| g.degree() == 1).map(|(g, _)| k.neg(&g.c[0])).collect())
}

pub fn is_irreducible(f: &Poly) -> Result<bool> {
    if f.degree() == 0 {
        return Ok(false);
    }
    let fl = factor_over_finite_field(f)?;
    Ok(fl.factors.len() == 1 && fl.factors[0].1 == 1)
}

fn q_of(k: &DifferenceField) -> BigUint {
    let ff = k.finite_field().unwrap();
    BigUint::from(ff.p).pow(ff.n as u32)
}

fn pth_root(f: &Poly) -> Poly {
    let k = &f.field;
    let ff = k.finite_field().unwrap();
    let p = ff.p as usize;
    let e = BigUint::from(ff.p).pow(ff.n as u32 - 1);
    let c = (0..=f.degree() / p).map(|i| k.pow_big(&f.coeff(i * p), &e)).collect();
    Poly::new(k, c)
}

fn squarefree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let k = &f.field;
    let p = k.characteristic() as usize;
    let mut out = Vec::new();
    if f.degree() == 0 {
        return Ok(out);
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree(&pth_root(f))? {
            out.push((g, m * p));
        }
        return Ok(out);
    }
    let mut c = poly_gcd(f, &d)?;
    let mut w = f.divmod(&c)?.0;
    let mut i = 1;
    while w.degree() > 0 {
        let y = poly_gcd(&w, &c)?;
        let z = w.divmod(&y)?.0;
        if z.degree() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divmod(&w)?.0;
    }
    if c.degree() > 0 {
        for (g, m) in squarefree(&pth_root(&c.monic()))? {
            out.push((g, m * p));
        }
    }
    Ok(out)
}

fn distinct_degree(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let k = &f.field;
    let q = q_of(k);
    let x = Poly::x(k);
    let mut out = Vec::new();
    let mut g = f.clone();
    let mut h = x.rem(&g)?;
    let mut i = 1;
    while g.degree() >= 2 * i {
        h = h.pow_mod(&q, &g)?;
        let c = poly_gcd(&h.sub(&x), &g)?;
        if c.degree() > 0 {
            out.push((c.clone(), i));
            g = g.divmod(&c)?.0;
            h = h.rem(&g)?;
        }
        i += 1;
    }
    if g.degree() > 0 {
        let d = g.degree();
        out.push((g.monic(), d));
    }
    Ok(out)
}

fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let k = &f.field;
    let n = f.degree();
    if n == d {
        return Ok(vec![f.monic()]);
    }
    let q = q_of(k);
    let ff = k.finite_field().unwrap();
    loop {
        let a = Poly::new(k, (0..n).map(|_| k.random(rng)).collect());
        if a.degree() == 0 {
            continue;
        }
        let b = if ff.p == 2 {
            // absolute trace to F_2
            let mut t = a.rem(f)?;
            let mut s = t.clone();
            for _ in 1..(ff.n * d) {
                t = t.mul(&t).rem(f)?;
                s = s.add(&t);
            }
            s
        } else {
            let e = (q.pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f)?.sub(&Poly::one(k))
        };
        let g = poly_gcd(&b, f)?;
        if g.degree() > 0 && g.degree() < n {
            let h = f.divmod(&g)?.0;
            let mut out = equal_degree(&g, d, rng)?;
            out.extend(equal_degree(&h.monic(), d, rng)?);
            return Ok(out);
        }
    }
}

/// Smallest (in lexicographic coefficient order) monic irreducible of degree n over F_p.
pub fn irreducible_of_degree(p: u64, n: usize) -> Result<Vec<u64>> {
    let fp = DifferenceField::prime(p, 0)?;
    if n == 1 {
        return Ok(vec![0, 1]);
    }
    let total = (p as u128).pow(n as u32);
    for idx in 0..total {
        let mut c = Vec::with_capacity(n + 1);
        let mut t = idx;
        for _ in 0..n {
            c.push((t % p as u128) as u64);
            t /= p as u128;
        }
        if c[0] == 0 {
            continue;
        }
        c.push(1);
        let f = Poly::new(&fp, c.iter().map(|&v| fp.from_u64(v)).collect());
        if is_irreducible(&f)? {
            return Ok(c);
        }
    }
    Err(Error::Invariant(format!("no irreducible of degree {n} over F_{p}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_x4_minus_1_over_f5() {
        let k = DifferenceField::prime(5, 0).unwrap();
        let f = Poly::from_ints(&k, &[-1, 0, 0, 0, 1]);
        let fl = factor_over_finite_field(&f).unwrap();
        assert_eq!(fl.factors.len(), 4);
        assert!(fl.factors.iter().all(|(g, m)| g.degree() == 1 && *m == 1));
        assert_eq!(fl.expand(&k), f);
    }

    #[test]
    fn irreducible_quadratic_over_f2() {
        let k = DifferenceField::prime(2, 0).unwrap();
        assert!(is_irreducible(&Poly::from_ints(&k, &[1, 1, 1])).unwrap());
    }

    #[test]
    fn repeated_factors() {
        let k = DifferenceField::prime(3, 0).unwrap();
        // (x+1)^3 (x^2+1)^2 x
        let a = Poly::from_ints(&k, &[1, 1]);
        let b = Poly::from_ints(&k, &[1, 0, 1]);
        let f = a.mul(&a).mul(&a).mul(&b).mul(&b).mul(&Poly::x(&k)).scale(&k.from_i64(2));
        let fl = factor_over_finite_field(&f).unwrap();
        assert_eq!(fl.expand(&k), f);
        assert_eq!(fl.factors.iter().map(|x| x.1).sum::<usize>(), 6);
    }

    #[test]
    fn factors_over_f4() {
        let f4 = DifferenceField::finite(2, vec![1, 1, 1], 1).unwrap();
        let f = Poly::from_ints(&f4, &[1, 1, 1]);
        let fl = factor_over_finite_field(&f).unwrap();
        assert_eq!(fl.factors.len(), 2);
        assert_eq!(fl.expand(&f4), f);
    }
}
