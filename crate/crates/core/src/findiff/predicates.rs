//! Sigma-reducedness, sigma-separability, etaleness and periodicity.

use super::{Elem, FinSigmaAlgebra, SigmaAlgebraMorphism};
use crate::error::Result;
use crate::exactfield::{DifferenceField, MPoly, Scalar};
use crate::linalg::{self, Mat};
use crate::poly::{poly_gcdext, Poly};
use std::collections::HashMap;

/// Independence of sigma(e_1), ..., sigma(e_n) over the base.
pub fn is_sigma_separable(a: &FinSigmaAlgebra) -> bool {
    linalg::rank(&a.base, &a.sigma_matrix) == a.dim
}

/// Injectivity of the sigma-semilinear map x -> S sigma_base(x).
///
/// Over an inversive base this is rank(S) = n. Otherwise the kernel is trivial iff no nonzero
/// vector of sigma(k)^n is killed by S; S is rewritten over sigma(k) using a basis of k|sigma(k).
pub fn is_sigma_reduced(a: &FinSigmaAlgebra) -> bool {
    let k = &a.base;
    let n = a.dim;
    if let Some(ff) = k.finite_field() {
        // restriction of scalars to F_p
        let fp = DifferenceField::prime(ff.p, 0).unwrap();
        let deg = ff.n;
        let w = k.generator().unwrap();
        let mut vecs = Vec::with_capacity(n * deg);
        for j in 0..n {
            for l in 0..deg {
                let mut x = a.zero();
                x[j] = k.pow(&w, l as u64);
                let y = a.sigma(&x);
                let flat: Vec<Scalar> = y.iter().flat_map(|c| k.ff_coeffs(c).iter().map(|&v| fp.from_u64(v)).collect::<Vec<_>>()).collect();
                vecs.push(flat);
            }
        }
        return linalg::rank(&fp, &vecs) == n * deg;
    }
    if k.is_inversive() {
        return linalg::rank(k, &a.sigma_matrix) == n;
    }
    if k.is_shift() {
        return shift_rank(a) == n;
    }
    univariate_rank(a) == n
}

fn shift_rank(a: &FinSigmaAlgebra) -> usize {
    let k = &a.base;
    let k0 = k.constants();
    let m = k.min_index().unwrap();
    let mut rows: Mat = Vec::new();
    for row in &a.sigma_matrix {
        // common denominator of the row
        let mut den = MPoly::one(&k0);
        for x in row {
            let r = k.ratfunc(x);
            let g = MPoly::gcd(&den, &r.den, &k0);
            den = den.mul(&r.den.div_exact(&g, &k0).unwrap(), &k0);
        }
        let polys: Vec<MPoly> = row
            .iter()
            .map(|x| {
                let r = k.ratfunc(x);
                r.num.mul(&den.div_exact(&r.den, &k0).unwrap(), &k0)
            })
            .collect();
        let top = polys.iter().map(|p| p.degree_in(m)).max().unwrap_or(0);
        for l in 0..=top {
            rows.push(polys.iter().map(|p| k.from_poly(p.coeff_in(m, l), MPoly::one(&k0))).collect());
        }
    }
    linalg::rank(k, &rows)
}

fn univariate_rank(a: &FinSigmaAlgebra) -> usize {
    let k = &a.base;
    let k0 = k.constants();
    let (gn, gd, d) = k.sigma_t().unwrap();
    // K' = k0(s); t is a root of gn(X) - s gd(X) over K'
    let kp = DifferenceField::rational_function(&k0, vec![k0.zero(), k0.one()], vec![k0.one()]).unwrap();
    let s = kp.var(0).unwrap();
    let up = |p: &MPoly| -> Poly {
        let c = (0..=p.degree_in(0)).map(|i| kp.lift(&p.coeff_in(0, i).as_constant().unwrap_or_else(|| k0.zero()))).collect();
        Poly::new(&kp, c)
    };
    let minp = up(&gn).sub(&up(&gd).scale(&s));
    let mut rows: Mat = Vec::new();
    for row in &a.sigma_matrix {
        let decomp: Vec<Vec<Scalar>> = row
            .iter()
            .map(|x| {
                let r = k.ratfunc(x);
                let (g, sinv, _) = poly_gcdext(&up(&r.den), &minp).unwrap();
                debug_assert_eq!(g.degree(), 0);
                let v = up(&r.num).mul(&sinv).rem(&minp).unwrap();
                (0..d as usize).map(|l| v.coeff(l)).collect()
            })
            .collect();
        for l in 0..d as usize {
            rows.push(decomp.iter().map(|c| c[l].clone()).collect());
        }
    }
    linalg::rank(&kp, &rows)
}

/// Trace-form criterion.
pub fn is_etale(a: &FinSigmaAlgebra) -> bool {
    let k = &a.base;
    let n = a.dim;
    let tau: Vec<Scalar> = (0..n)
        .map(|i| {
            let mut s = k.zero();
            for l in 0..n {
                s = k.add(&s, &a.struct_consts[i][l][l]);
            }
            s
        })
        .collect();
    let gram: Mat = (0..n)
        .map(|i| (0..n).map(|j| linalg::dot(k, &a.struct_consts[i][j], &tau)).collect())
        .collect();
    !k.is_zero(&linalg::det(k, &gram))
}

pub fn is_strongly_sigma_etale(a: &FinSigmaAlgebra) -> bool {
    is_etale(a) && is_sigma_separable(a)
}

/// The twisted algebra: structure constants, unit and sigma matrix re-read through sigma_base.
pub fn twisted(a: &FinSigmaAlgebra) -> FinSigmaAlgebra {
    let k = &a.base;
    let tw = |x: &Scalar| k.sigma(x);
    FinSigmaAlgebra {
        base: k.clone(),
        dim: a.dim,
        struct_consts: a.struct_consts.iter().map(|r| r.iter().map(|c| c.iter().map(tw).collect()).collect()).collect(),
        unit: a.unit.iter().map(tw).collect(),
        sigma_matrix: a.sigma_matrix.iter().map(|r| r.iter().map(tw).collect()).collect(),
        splitting: None,
    }
}

/// (^sigma A, psi) with psi(e_j (x) 1) = sigma(e_j).
pub fn twist_and_psi(a: &FinSigmaAlgebra) -> Result<(FinSigmaAlgebra, SigmaAlgebraMorphism)> {
    let t = twisted(a);
    let psi = SigmaAlgebraMorphism::new(t.clone(), a.clone(), a.sigma_matrix.clone())?;
    Ok((t, psi))
}

/// Kernel of psi.
pub fn psi_kernel(psi: &SigmaAlgebraMorphism) -> Vec<Elem> {
    linalg::kernel(&psi.target.base, &psi.matrix, psi.source.dim)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Periodicity {
    Periodic(usize),
    /// sigma^n(e) = 0
    HitsZero(usize),
    /// orbit enters a cycle (start, length) that does not contain e
    CycleWithout { start: usize, length: usize },
    Unknown(usize),
}

impl Periodicity {
    pub fn is_periodic(&self) -> Option<bool> {
        match self {
            Periodicity::Periodic(_) => Some(true),
            Periodicity::Unknown(_) => None,
            _ => Some(false),
        }
    }
}

pub fn default_horizon(n: usize) -> usize {
    (1..=n).try_fold(1usize, |acc, i| acc.checked_mul(i)).unwrap_or(10_000).clamp(1, 10_000)
}

pub fn is_periodic(a: &FinSigmaAlgebra, e: &[Scalar], horizon: usize) -> Periodicity {
    let mut seen: HashMap<Elem, usize> = HashMap::new();
    let mut x = e.to_vec();
    seen.insert(x.clone(), 0);
    for i in 1..=horizon {
        x = a.sigma(&x);
        if x == e {
            return Periodicity::Periodic(i);
        }
        if a.is_zero(&x) {
            return Periodicity::HitsZero(i);
        }
        if let Some(&j) = seen.get(&x) {
            return Periodicity::CycleWithout { start: j, length: i - j };
        }
        seen.insert(x.clone(), i);
    }
    Periodicity::Unknown(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r1(k: &DifferenceField) -> FinSigmaAlgebra {
        // basis e1, e2 with sigma(e1) = 1, sigma(e2) = 0
        let e = |v| k.from_i64(v);
        let a = FinSigmaAlgebra::split(k, &[0, 1]);
        FinSigmaAlgebra { sigma_matrix: vec![vec![e(1), e(0)], vec![e(1), e(0)]], ..a }
    }

    #[test]
    fn example_r1_predicates() {
        let k = DifferenceField::prime(5, 1).unwrap();
        let a = r1(&k);
        assert!(a.validate().ok());
        assert!(!is_sigma_reduced(&a));
        assert!(!is_sigma_separable(&a));
        assert!(is_etale(&a));
        assert!(!is_strongly_sigma_etale(&a));
        let (_, psi) = twist_and_psi(&a).unwrap();
        assert!(psi.validate().ok());
        let ker = psi_kernel(&psi);
        assert_eq!(ker.len(), 1);
        assert_eq!(is_periodic(&a, &a.basis(1), 10), Periodicity::HitsZero(1));
    }

    #[test]
    fn swap_and_nilpotent() {
        let k = DifferenceField::prime(3, 0).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        assert!(is_strongly_sigma_etale(&s));
        assert!(is_sigma_reduced(&s));
        assert_eq!(is_periodic(&s, &s.basis(0), 10), Periodicity::Periodic(2));
        let f = Poly::from_ints(&k, &[0, 0, 1]);
        let d = FinSigmaAlgebra::monogenic(&f, &Poly::x(&k)).unwrap();
        assert!(!is_etale(&d));
    }

    #[test]
    fn etale_examples() {
        let f5 = DifferenceField::prime(5, 0).unwrap();
        let a = FinSigmaAlgebra::monogenic(&Poly::from_ints(&f5, &[-1, 0, 1]), &Poly::x(&f5)).unwrap();
        assert!(is_etale(&a));
        let f2 = DifferenceField::prime(2, 1).unwrap();
        let f4 = FinSigmaAlgebra::monogenic(&Poly::from_ints(&f2, &[1, 1, 1]), &Poly::from_ints(&f2, &[1, 1])).unwrap();
        assert!(f4.validate().ok());
        assert!(is_etale(&f4));
    }

    #[test]
    fn non_inversive_bases() {
        let f5 = DifferenceField::prime(5, 1).unwrap();
        let k = DifferenceField::shift(&f5).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        assert!(is_sigma_reduced(&s));
        let a = r1(&k);
        assert!(!is_sigma_reduced(&a));
        let q = DifferenceField::rationals();
        let qt = DifferenceField::rational_function(&q, vec![q.zero(), q.zero(), q.one()], vec![q.one()]).unwrap();
        assert!(is_sigma_reduced(&FinSigmaAlgebra::split(&qt, &[1, 0])));
        assert!(!is_sigma_reduced(&r1(&qt)));
        // K(sqrt t) with sigma(sqrt t) = t: a field, so reduced, but 1 and t are dependent
        let a = FinSigmaAlgebra::monogenic(&Poly::parse(&qt, "x^2-t").unwrap(), &Poly::parse(&qt, "t").unwrap()).unwrap();
        assert!(a.validate().ok());
        assert!(is_sigma_reduced(&a));
        assert!(!is_sigma_separable(&a));
    }
}
