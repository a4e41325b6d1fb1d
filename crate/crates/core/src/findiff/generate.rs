//! Seeded random instances: algebras, strongly sigma-etale algebras and morphisms.

use super::constructions::{
    diagonal, direct_product, quotient_by_sigma_ideal, sigma_subalgebra_generated, swap_product, tensor_left_inclusion,
    tensor_product,
};
use super::predicates::is_strongly_sigma_etale;
use super::{Elem, FinSigmaAlgebra, SigmaAlgebraMorphism};
use crate::error::Result;
use crate::exactfield::DifferenceField;
use crate::linalg;
use crate::poly::{factor, Poly};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Generator {
    pub rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// One of F_2, F_3, F_5.
    pub fn prime_base(&mut self) -> DifferenceField {
        let p = *[2u64, 3, 5].choose(&mut self.rng).unwrap();
        DifferenceField::prime(p, 0).unwrap()
    }

    /// A finite field of degree <= max_deg over F_p, with a random Frobenius power.
    pub fn finite_base(&mut self, p: u64, max_deg: usize) -> DifferenceField {
        let d = self.rng.gen_range(1..=max_deg);
        let m = self.rng.gen_range(0..d.max(1)) as u32;
        DifferenceField::finite(p, factor::irreducible_of_degree(p, d).unwrap(), m).unwrap()
    }

    fn random_monic(&mut self, k: &DifferenceField, d: usize) -> Poly {
        let mut c: Vec<_> = (0..d).map(|_| k.random(&mut self.rng)).collect();
        c.push(k.one());
        Poly::new(k, c)
    }

    fn random_elem(&mut self, a: &FinSigmaAlgebra) -> Elem {
        (0..a.dim).map(|_| a.base.random(&mut self.rng)).collect()
    }

    /// k[y]/(f) with sigma(y) = y^{p^{m + a j}}, a Frobenius-type endomorphism.
    fn frobenius_monogenic(&mut self, k: &DifferenceField, d: usize, separable: bool) -> FinSigmaAlgebra {
        let f = loop {
            let f = self.random_monic(k, d);
            if !separable || f.is_separable().unwrap() {
                break f;
            }
        };
        let ff = k.finite_field().unwrap();
        let m = k.frobenius_power().unwrap() as usize;
        let j = self.rng.gen_range(0..3usize);
        let e = BigUint::from(ff.p).pow((m + ff.n * j) as u32);
        let h = Poly::x(k).pow_mod(&e, &f).unwrap();
        FinSigmaAlgebra::monogenic(&f, &h).unwrap()
    }

    /// k[y]/(y^d) with sigma(y) in the maximal ideal.
    fn local_nilpotent(&mut self, k: &DifferenceField, d: usize) -> FinSigmaAlgebra {
        let mut f = vec![k.zero(); d + 1];
        f[d] = k.one();
        let mut h: Vec<_> = (0..d).map(|_| k.random(&mut self.rng)).collect();
        h[0] = k.zero();
        FinSigmaAlgebra::monogenic(&Poly::new(k, f), &Poly::new(k, h)).unwrap()
    }

    fn random_map(&mut self, n: usize, bijective: bool) -> Vec<usize> {
        if bijective {
            let mut g: Vec<usize> = (0..n).collect();
            g.shuffle(&mut self.rng);
            g
        } else {
            (0..n).map(|_| self.rng.gen_range(0..n)).collect()
        }
    }

    /// Re-present A in a random basis: e'_j = sum_i P_ij e_i.
    pub fn basis_change(&mut self, a: &FinSigmaAlgebra) -> FinSigmaAlgebra {
        let k = &a.base;
        let n = a.dim;
        let (p, pinv) = loop {
            let p: linalg::Mat = (0..n).map(|_| (0..n).map(|_| k.random(&mut self.rng)).collect()).collect();
            if let Some(pi) = linalg::inverse(k, &p) {
                break (p, pi);
            }
        };
        let col = |j: usize| -> Elem { (0..n).map(|i| p[i][j].clone()).collect() };
        let to_new = |x: &Elem| linalg::mat_vec(k, &pinv, x);
        let cols: Vec<Elem> = (0..n).map(col).collect();
        let sc = (0..n)
            .map(|i| (0..n).map(|j| to_new(&a.mul(&cols[i], &cols[j]))).collect())
            .collect();
        let sp: linalg::Mat = p.iter().map(|r| r.iter().map(|x| k.sigma(x)).collect()).collect();
        let s = linalg::mat_mul(k, &pinv, &linalg::mat_mul(k, &a.sigma_matrix, &sp));
        let mut out = FinSigmaAlgebra::new(k, sc, to_new(&a.unit), s).unwrap();
        out.splitting = a.splitting.as_ref().map(|es| es.iter().map(to_new).collect());
        out
    }

    /// A random valid algebra of dimension <= max_dim over a finite base.
    pub fn algebra(&mut self, k: &DifferenceField, max_dim: usize) -> FinSigmaAlgebra {
        let a = self.algebra_raw(k, max_dim, 2);
        if self.rng.gen_bool(0.5) {
            self.basis_change(&a)
        } else {
            a
        }
    }

    fn algebra_raw(&mut self, k: &DifferenceField, max_dim: usize, depth: usize) -> FinSigmaAlgebra {
        let d = self.rng.gen_range(1..=max_dim.max(1));
        let choice = if depth == 0 || max_dim < 2 { self.rng.gen_range(0..4) } else { self.rng.gen_range(0..7) };
        match choice {
            0 => {
                let bij = self.rng.gen_bool(0.5);
                let g = self.random_map(d, bij);
                FinSigmaAlgebra::from_map(k, &g)
            }
            1 => {
                let sep = self.rng.gen_bool(0.5);
                self.frobenius_monogenic(k, d, sep)
            }
            2 => self.local_nilpotent(k, d),
            3 => FinSigmaAlgebra::base_algebra(k),
            4 => {
                let d1 = self.rng.gen_range(1..max_dim);
                let a = self.algebra_raw(k, d1, depth - 1);
                let b = self.algebra_raw(k, max_dim - a.dim, depth - 1);
                direct_product(&a, &b).unwrap()
            }
            5 => {
                let a = self.algebra_raw(k, max_dim / 2, depth - 1);
                swap_product(&a).unwrap()
            }
            _ => {
                let d1 = self.rng.gen_range(1..=(max_dim / 2).max(1));
                let a = self.algebra_raw(k, d1, depth - 1);
                let b = self.algebra_raw(k, (max_dim / a.dim).max(1), depth - 1);
                tensor_product(&a, &b).unwrap()
            }
        }
    }

    /// A strongly sigma-etale algebra of dimension <= max_dim, built from closed constructions.
    pub fn strongly_etale(&mut self, k: &DifferenceField, max_dim: usize) -> FinSigmaAlgebra {
        let a = self.sse_raw(k, max_dim, 2);
        debug_assert!(is_strongly_sigma_etale(&a));
        if self.rng.gen_bool(0.5) {
            self.basis_change(&a)
        } else {
            a
        }
    }

    fn sse_raw(&mut self, k: &DifferenceField, max_dim: usize, depth: usize) -> FinSigmaAlgebra {
        let d = self.rng.gen_range(1..=max_dim.max(1));
        let choice = if depth == 0 || max_dim < 2 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..5) };
        match choice {
            0 => {
                let g = self.random_map(d, true);
                FinSigmaAlgebra::from_map(k, &g)
            }
            1 => self.frobenius_monogenic(k, d, true),
            2 => {
                let d1 = self.rng.gen_range(1..max_dim);
                let a = self.sse_raw(k, d1, depth - 1);
                let b = self.sse_raw(k, max_dim - a.dim, depth - 1);
                direct_product(&a, &b).unwrap()
            }
            3 => {
                let a = self.sse_raw(k, max_dim / 2, depth - 1);
                swap_product(&a).unwrap()
            }
            _ => {
                let d1 = self.rng.gen_range(1..=(max_dim / 2).max(1));
                let a = self.sse_raw(k, d1, depth - 1);
                let b = self.sse_raw(k, (max_dim / a.dim).max(1), depth - 1);
                tensor_product(&a, &b).unwrap()
            }
        }
    }

    /// Random element of A.
    pub fn element(&mut self, a: &FinSigmaAlgebra) -> Elem {
        self.random_elem(a)
    }

    /// A random sigma-morphism out of A.
    pub fn morphism(&mut self, a: &FinSigmaAlgebra, max_dim: usize) -> Result<SigmaAlgebraMorphism> {
        let k = a.base.clone();
        loop {
            match self.rng.gen_range(0..5) {
                0 => {
                    // inclusion of A into a larger algebra containing it
                    let b = self.algebra_raw(&k, (max_dim / a.dim).max(1), 1);
                    return tensor_left_inclusion(a, &b);
                }
                1 => {
                    let swap = self.rng.gen_bool(0.5);
                    return diagonal(a, swap);
                }
                2 => {
                    let x = self.random_elem(a);
                    if let Ok((_, p)) = quotient_by_sigma_ideal(a, &[x]) {
                        return Ok(p);
                    }
                }
                3 => {
                    // sigma itself, when it is k-linear
                    if a.base.frobenius_power() == Some(0) {
                        let cols: Vec<Elem> = (0..a.dim).map(|j| a.sigma(&a.basis(j))).collect();
                        return SigmaAlgebraMorphism::new(a.clone(), a.clone(), linalg::from_columns(&k, &cols, a.dim));
                    }
                }
                _ => {
                    let f = self.morphism(a, max_dim)?;
                    let g = self.morphism(&f.target, max_dim * 2)?;
                    return g.compose(&f);
                }
            }
        }
    }

    /// A random morphism into A: the inclusion of a sigma-subalgebra.
    pub fn subalgebra_inclusion(&mut self, a: &FinSigmaAlgebra) -> Result<SigmaAlgebraMorphism> {
        let x = self.random_elem(a);
        Ok(sigma_subalgebra_generated(a, &[x])?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_are_valid() {
        let mut g = Generator::new(7);
        for _ in 0..40 {
            let k = g.prime_base();
            let a = g.algebra(&k, 5);
            assert!(a.validate().ok(), "{:?}", a.validate());
            assert!(a.dim <= 5);
            let s = g.strongly_etale(&k, 4);
            assert!(is_strongly_sigma_etale(&s));
            let f = g.morphism(&s, 4).unwrap();
            assert!(f.validate().ok());
        }
    }

    #[test]
    fn finite_bases() {
        let mut g = Generator::new(3);
        for _ in 0..10 {
            let k = g.finite_base(2, 3);
            let s = g.strongly_etale(&k, 3);
            assert!(s.validate().ok() && is_strongly_sigma_etale(&s));
        }
    }
}
