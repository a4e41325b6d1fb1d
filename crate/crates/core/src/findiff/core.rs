//! The strong core: span of periodic idempotents after splitting, descended to the base.

use super::constructions::{base_change, sigma_subalgebra_generated, subalgebra_on, FieldEmbedding};
use super::idempotents::{check_splitting, is_split_diagonal, primitive_idempotents, residue_degrees};
use super::predicates::{default_horizon, is_periodic};
use super::{Elem, FinSigmaAlgebra, SigmaAlgebraMorphism};
use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, Scalar};
use crate::linalg::{self, Subspace};
use num_integer::Integer;

#[derive(Clone, Debug)]
pub struct StrongCore {
    /// Canonical echelon basis inside A.
    pub subspace: Subspace,
    pub algebra: FinSigmaAlgebra,
    pub inclusion: SigmaAlgebraMorphism,
    /// False when only a lower bound could be certified.
    pub complete: bool,
    /// Degree of the splitting extension used (1 when none was needed).
    pub splitting_degree: usize,
    /// Number of sigma-periodic atoms (primitive idempotents of the core after splitting).
    pub atoms: usize,
}

impl StrongCore {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// For each primitive f', the unique primitive f with f' <= sigma(f).
pub fn pullback_map(a: &FinSigmaAlgebra, prims: &[Elem]) -> Result<Vec<usize>> {
    let sig: Vec<Elem> = prims.iter().map(|f| a.sigma(f)).collect();
    prims
        .iter()
        .map(|fp| {
            sig.iter()
                .position(|sf| &a.mul(fp, sf) == fp)
                .ok_or_else(|| Error::Invariant("primitive idempotent under no sigma(f)".into()))
        })
        .collect()
}

/// Sums of the fibres of g^M over cyclic points, M a multiple of every cycle length exceeding every tail.
pub fn periodic_atoms(a: &FinSigmaAlgebra, prims: &[Elem]) -> Result<Vec<Elem>> {
    let g = pullback_map(a, prims)?;
    let r = g.len();
    let cyclic: Vec<Option<usize>> = (0..r)
        .map(|f| {
            let mut x = g[f];
            for len in 1..=r {
                if x == f {
                    return Some(len);
                }
                x = g[x];
            }
            None
        })
        .collect();
    let mut target = vec![0usize; r];
    for f in 0..r {
        let (mut x, mut t) = (f, 0usize);
        while cyclic[x].is_none() {
            x = g[x];
            t += 1;
        }
        let len = cyclic[x].unwrap();
        for _ in 0..(len - t % len) % len {
            x = g[x];
        }
        target[f] = x;
    }
    let mut atoms = Vec::new();
    for c in (0..r).filter(|&c| cyclic[c].is_some()) {
        let mut e = a.zero();
        for f in (0..r).filter(|&f| target[f] == c) {
            e = a.add(&e, &prims[f]);
        }
        atoms.push(e);
    }
    Ok(atoms)
}

/// A intersected with the K-subspace V of A (x) K, by an F_p-linear system.
fn descend(k: &DifferenceField, emb: &FieldEmbedding, v: &Subspace) -> Result<Subspace> {
    let n = v.n;
    let big = &emb.big;
    let ann = linalg::kernel(big, &v.rows, n);
    if ann.is_empty() {
        return Ok(Subspace::full(k, n));
    }
    let ff = k.finite_field().unwrap();
    let a = ff.n;
    let fp = DifferenceField::prime(ff.p, 0)?;
    let w = k.generator()?;
    let wimg: Vec<Scalar> = (0..a).map(|l| emb.map(&k.pow(&w, l as u64))).collect();
    let nbig = big.finite_field().unwrap().n;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for u in &ann {
        let cols: Vec<Vec<u64>> = (0..n * a)
            .map(|idx| big.ff_coeffs(&big.mul(&u[idx / a], &wimg[idx % a])).to_vec())
            .collect();
        for s in 0..nbig {
            rows.push(cols.iter().map(|c| fp.from_u64(c[s])).collect());
        }
    }
    let ker = linalg::kernel(&fp, &rows, n * a);
    let vs: Vec<Elem> = ker
        .iter()
        .map(|c| {
            (0..n)
                .map(|j| {
                    let coeffs: Vec<u64> = (0..a).map(|l| fp.ff_coeffs(&c[j * a + l])[0]).collect();
                    Scalar::F(coeffs)
                })
                .collect()
        })
        .collect();
    Ok(Subspace::span(k, n, &vs))
}

fn finish(a: &FinSigmaAlgebra, v: Subspace, complete: bool, splitting_degree: usize, atoms: usize) -> Result<StrongCore> {
    let (algebra, inclusion) = subalgebra_on(a, &v)?;
    Ok(StrongCore { subspace: v, algebra, inclusion, complete, splitting_degree, atoms })
}

pub fn strong_core(a: &FinSigmaAlgebra) -> Result<StrongCore> {
    let k = &a.base;
    if k.is_finite() {
        let prims: Vec<Elem> = primitive_idempotents(a)?.into_iter().map(|i| i.coords).collect();
        let n = residue_degrees(a, &prims).into_iter().fold(1usize, |acc, d| acc.lcm(&d));
        if n == 1 {
            let atoms = periodic_atoms(a, &prims)?;
            let cnt = atoms.len();
            return finish(a, Subspace::span(k, a.dim, &atoms), true, 1, cnt);
        }
        let emb = FieldEmbedding::finite_extension(k, n)?;
        let ak = base_change(a, &emb)?;
        let prims_k: Vec<Elem> = primitive_idempotents(&ak)?.into_iter().map(|i| i.coords).collect();
        let atoms = periodic_atoms(&ak, &prims_k)?;
        let cnt = atoms.len();
        let vk = Subspace::span(&emb.big, a.dim, &atoms);
        return finish(a, descend(k, &emb, &vk)?, true, n, cnt);
    }
    if is_split_diagonal(a) {
        let prims: Vec<Elem> = (0..a.dim).map(|i| a.basis(i)).collect();
        let atoms = periodic_atoms(a, &prims)?;
        let cnt = atoms.len();
        return finish(a, Subspace::span(k, a.dim, &atoms), true, 1, cnt);
    }
    if let Some(es) = &a.splitting {
        check_splitting(a, es)?;
        if es.len() == a.dim {
            let atoms = periodic_atoms(a, es)?;
            let cnt = atoms.len();
            return finish(a, Subspace::span(k, a.dim, &atoms), true, 1, cnt);
        }
        // lower bound: sigma-closure of the supplied idempotents that are periodic
        let h = default_horizon(a.dim);
        let per: Vec<Elem> = es.iter().filter(|e| is_periodic(a, e, h).is_periodic() == Some(true)).cloned().collect();
        let (_, incl) = sigma_subalgebra_generated(a, &per)?;
        let cols: Vec<Elem> = (0..incl.source.dim).map(|j| incl.apply(&incl.source.basis(j))).collect();
        let cnt = per.len();
        return finish(a, Subspace::span(k, a.dim, &cols), false, 1, cnt);
    }
    finish(a, Subspace::span(k, a.dim, &[a.one()]), false, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::findiff::constructions::tensor_product;
    use crate::findiff::predicates::is_strongly_sigma_etale;
    use crate::poly::Poly;

    #[test]
    fn swap_core_is_everything() {
        let k = DifferenceField::prime(5, 0).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        let c = strong_core(&s).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.complete);
    }

    #[test]
    fn r1_core_is_base() {
        let k = DifferenceField::prime(5, 0).unwrap();
        let r1 = FinSigmaAlgebra::from_map(&k, &[0, 0]);
        let c = strong_core(&r1).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.subspace.contains(&k, &r1.one()));
    }

    #[test]
    fn field_extension_core() {
        let k = DifferenceField::prime(3, 0).unwrap();
        let f9 = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[1, 0, 1]), &Poly::parse(&k, "x^3").unwrap()).unwrap();
        assert!(is_strongly_sigma_etale(&f9));
        let c = strong_core(&f9).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.splitting_degree, 2);
        let t = tensor_product(&f9, &f9).unwrap();
        assert_eq!(strong_core(&t).unwrap().dim(), 4);
    }

    #[test]
    fn nonsplit_nonperiodic_part_descends() {
        // F9 x (R1 over F3): core = F9 x k
        let k = DifferenceField::prime(3, 0).unwrap();
        let f9 = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[1, 0, 1]), &Poly::parse(&k, "x^3").unwrap()).unwrap();
        let r1 = FinSigmaAlgebra::from_map(&k, &[0, 0]);
        let p = crate::findiff::constructions::direct_product(&f9, &r1).unwrap();
        let c = strong_core(&p).unwrap();
        assert_eq!(c.dim(), 3);
        assert!(is_strongly_sigma_etale(&c.algebra));
    }

    #[test]
    fn lower_bound_over_q() {
        let q = DifferenceField::rationals();
        let a = FinSigmaAlgebra::monogenic(&Poly::from_ints(&q, &[-1, 0, 1]), &Poly::x(&q)).unwrap();
        let c = strong_core(&a).unwrap();
        assert!(!c.complete);
        assert_eq!(c.dim(), 1);
        let two = q.from_i64(2);
        let half = q.inv(&two).unwrap();
        let e1 = vec![half.clone(), half.clone()];
        let e2 = vec![half.clone(), q.neg(&half)];
        let c = strong_core(&a.with_splitting(vec![e1, e2])).unwrap();
        assert!(c.complete);
        assert_eq!(c.dim(), 2);
    }
}
