//! Subalgebras, quotients, products, tensor products and base change.

use super::idempotents::is_split_diagonal;
use super::{Elem, FinSigmaAlgebra, SigmaAlgebraMorphism};
use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, Scalar};
use crate::linalg::{self, Subspace};
use crate::poly::{factor, factor::irreducible_of_degree, Poly};

/// Embedding of finite fields k -> K, determined by the image of the generator of k.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldEmbedding {
    pub small: DifferenceField,
    pub big: DifferenceField,
    pub image_gen: Scalar,
}

impl FieldEmbedding {
    pub fn identity(k: &DifferenceField) -> Self {
        let image_gen = k.generator().unwrap_or_else(|_| k.one());
        FieldEmbedding { small: k.clone(), big: k.clone(), image_gen }
    }

    /// k = F_{p^a} into F_{p^{aN}}, with sigma = Frobenius^m on both sides.
    pub fn finite_extension(k: &DifferenceField, n: usize) -> Result<Self> {
        let ff = k
            .finite_field()
            .ok_or_else(|| Error::Unsupported(format!("finite extension of {}", k.name())))?;
        if n == 1 {
            return Ok(Self::identity(k));
        }
        let d = ff.n * n;
        let m = k.frobenius_power().unwrap();
        let big = DifferenceField::finite(ff.p, irreducible_of_degree(ff.p, d)?, m)?;
        let f = Poly::new(&big, ff.defpoly.iter().map(|&c| big.from_u64(c)).collect());
        let mut roots = factor::roots(&f)?;
        roots.sort_by_key(|r| big.ff_coeffs(r).to_vec());
        let image_gen = roots.into_iter().next().ok_or_else(|| Error::Invariant("defining polynomial has no root".into()))?;
        Ok(FieldEmbedding { small: k.clone(), big, image_gen })
    }

    pub fn map(&self, x: &Scalar) -> Scalar {
        if self.small == self.big {
            return x.clone();
        }
        let k = &self.big;
        let mut r = k.zero();
        let mut pw = k.one();
        for &c in self.small.ff_coeffs(x) {
            if c != 0 {
                r = k.add(&r, &k.mul(&pw, &k.from_u64(c)));
            }
            pw = k.mul(&pw, &self.image_gen);
        }
        r
    }

    /// sigma_K restricted to k equals sigma_k.
    pub fn is_compatible(&self) -> bool {
        if self.small == self.big {
            return true;
        }
        match self.small.generator() {
            Ok(w) => self.big.sigma(&self.image_gen) == self.map(&self.small.sigma(&w)),
            Err(_) => false,
        }
    }
}

/// A read over K: same structure constants, entries mapped through the embedding.
pub fn base_change(a: &FinSigmaAlgebra, emb: &FieldEmbedding) -> Result<FinSigmaAlgebra> {
    if a.base != emb.small {
        return Err(Error::MixedFields);
    }
    if !emb.is_compatible() {
        return Err(Error::Compatibility(format!(
            "sigma on {} does not restrict to sigma on {}",
            emb.big.name(),
            emb.small.name()
        )));
    }
    let m = |x: &Scalar| emb.map(x);
    let mv = |v: &Elem| v.iter().map(m).collect::<Elem>();
    Ok(FinSigmaAlgebra {
        base: emb.big.clone(),
        dim: a.dim,
        struct_consts: a.struct_consts.iter().map(|r| r.iter().map(mv).collect()).collect(),
        unit: mv(&a.unit),
        sigma_matrix: a.sigma_matrix.iter().map(mv).collect(),
        splitting: a.splitting.as_ref().map(|s| s.iter().map(mv).collect()),
    })
}

/// Algebra structure on a subspace closed under product and sigma, with its inclusion.
pub fn subalgebra_on(a: &FinSigmaAlgebra, v: &Subspace) -> Result<(FinSigmaAlgebra, SigmaAlgebraMorphism)> {
    let k = &a.base;
    let b = &v.rows;
    let co = |x: &Elem| v.coords(k, x).ok_or_else(|| Error::Invariant("subspace is not a sigma-subalgebra".into()));
    let mut sc = Vec::with_capacity(b.len());
    for bi in b {
        let mut row = Vec::with_capacity(b.len());
        for bj in b {
            row.push(co(&a.mul(bi, bj))?);
        }
        sc.push(row);
    }
    let unit = co(&a.unit)?;
    let cols = b.iter().map(|bj| co(&a.sigma(bj))).collect::<Result<Vec<_>>>()?;
    let s = linalg::from_columns(k, &cols, b.len());
    let mut sub = FinSigmaAlgebra::new(k, sc, unit, s)?;
    if let Some(es) = &a.splitting {
        if let Some(c) = es.iter().map(|e| v.coords(k, e)).collect::<Option<Vec<_>>>() {
            sub.splitting = Some(c);
        }
    }
    let incl = SigmaAlgebraMorphism::new(sub.clone(), a.clone(), linalg::from_columns(k, b, a.dim))?;
    Ok((sub, incl))
}

/// Smallest sigma-stable unital subalgebra containing gens.
pub fn sigma_subalgebra_generated(a: &FinSigmaAlgebra, gens: &[Elem]) -> Result<(FinSigmaAlgebra, SigmaAlgebraMorphism)> {
    let k = &a.base;
    let mut v = Subspace::span(k, a.dim, &[a.one()]);
    for g in gens {
        v.insert(k, g);
    }
    loop {
        let rows = v.rows.clone();
        let mut grew = false;
        for (i, x) in rows.iter().enumerate() {
            grew |= v.insert(k, &a.sigma(x));
            for y in &rows[i..] {
                grew |= v.insert(k, &a.mul(x, y));
            }
        }
        if !grew {
            break;
        }
    }
    subalgebra_on(a, &v)
}

/// Closure of span(gens) under multiplication by A and sigma.
pub fn sigma_ideal_generated(a: &FinSigmaAlgebra, gens: &[Elem]) -> Subspace {
    let k = &a.base;
    let mut v = Subspace::span(k, a.dim, gens);
    loop {
        let rows = v.rows.clone();
        let mut grew = false;
        for x in &rows {
            grew |= v.insert(k, &a.sigma(x));
            for l in 0..a.dim {
                grew |= v.insert(k, &a.mul(x, &a.basis(l)));
            }
        }
        if !grew || v.dim() == a.dim {
            return v;
        }
    }
}

/// A / [gens] on the basis of non-pivot coordinates, with the projection.
pub fn quotient_by_sigma_ideal(a: &FinSigmaAlgebra, gens: &[Elem]) -> Result<(FinSigmaAlgebra, SigmaAlgebraMorphism)> {
    let k = &a.base;
    let ideal = sigma_ideal_generated(a, gens);
    if ideal.dim() == a.dim {
        return Err(Error::ZeroRing);
    }
    let free: Vec<usize> = (0..a.dim).filter(|c| !ideal.pivots.contains(c)).collect();
    let proj = |x: &Elem| -> Elem {
        let r = ideal.reduce(k, x);
        free.iter().map(|&c| r[c].clone()).collect()
    };
    let m = free.len();
    let mut sc = vec![vec![vec![]; m]; m];
    for (i, &ci) in free.iter().enumerate() {
        for (j, &cj) in free.iter().enumerate() {
            sc[i][j] = proj(&a.struct_consts[ci][cj]);
        }
    }
    let unit = proj(&a.unit);
    let cols: Vec<Elem> = free.iter().map(|&c| proj(&a.sigma(&a.basis(c)))).collect();
    let mut q = FinSigmaAlgebra::new(k, sc, unit, linalg::from_columns(k, &cols, m))?;
    if let Some(es) = &a.splitting {
        let imgs: Vec<Elem> = es.iter().map(proj).filter(|e| !q.is_zero(e)).collect();
        q.splitting = Some(imgs);
    }
    let pcols: Vec<Elem> = (0..a.dim).map(|l| proj(&a.basis(l))).collect();
    let pm = SigmaAlgebraMorphism::new(a.clone(), q.clone(), linalg::from_columns(k, &pcols, m))?;
    Ok((q, pm))
}

fn kron_vec(k: &DifferenceField, x: &[Scalar], y: &[Scalar]) -> Elem {
    let mut r = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            r.push(k.mul(a, b));
        }
    }
    r
}

/// A known complete family of orthogonal idempotents, if any.
fn known_splitting(a: &FinSigmaAlgebra) -> Option<Vec<Elem>> {
    if let Some(s) = &a.splitting {
        return Some(s.clone());
    }
    if is_split_diagonal(a) {
        return Some((0..a.dim).map(|i| a.basis(i)).collect());
    }
    None
}

/// A (x) B with basis e_i (x) f_j at index i * dim(B) + j.
pub fn tensor_product(a: &FinSigmaAlgebra, b: &FinSigmaAlgebra) -> Result<FinSigmaAlgebra> {
    if a.base != b.base {
        return Err(Error::MixedFields);
    }
    let k = &a.base;
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut sc = vec![vec![vec![]; n]; n];
    for i in 0..na {
        for j in 0..nb {
            for p in 0..na {
                for q in 0..nb {
                    sc[i * nb + j][p * nb + q] = kron_vec(k, &a.struct_consts[i][p], &b.struct_consts[j][q]);
                }
            }
        }
    }
    let mut s = linalg::zeros(k, n, n);
    for r in 0..na {
        for t in 0..nb {
            for i in 0..na {
                for j in 0..nb {
                    s[r * nb + t][i * nb + j] = k.mul(&a.sigma_matrix[r][i], &b.sigma_matrix[t][j]);
                }
            }
        }
    }
    let mut out = FinSigmaAlgebra::new(k, sc, kron_vec(k, &a.unit, &b.unit), s)?;
    if a.splitting.is_some() || b.splitting.is_some() {
        if let (Some(sa), Some(sb)) = (known_splitting(a), known_splitting(b)) {
            out.splitting = Some(sa.iter().flat_map(|x| sb.iter().map(|y| kron_vec(k, x, y)).collect::<Vec<_>>()).collect());
        }
    }
    Ok(out)
}

/// a |-> a (x) 1.
pub fn tensor_left_inclusion(a: &FinSigmaAlgebra, b: &FinSigmaAlgebra) -> Result<SigmaAlgebraMorphism> {
    let k = &a.base;
    let t = tensor_product(a, b)?;
    let cols: Vec<Elem> = (0..a.dim).map(|i| kron_vec(k, &a.basis(i), &b.unit)).collect();
    SigmaAlgebraMorphism::new(a.clone(), t.clone(), linalg::from_columns(k, &cols, t.dim))
}

fn block(a: &FinSigmaAlgebra, b: &FinSigmaAlgebra, swap: bool) -> Result<FinSigmaAlgebra> {
    if a.base != b.base {
        return Err(Error::MixedFields);
    }
    let k = &a.base;
    let (na, nb) = (a.dim, b.dim);
    let n = na + nb;
    let pad = |x: &Elem, off: usize| -> Elem {
        let mut v = vec![k.zero(); n];
        for (i, c) in x.iter().enumerate() {
            v[off + i] = c.clone();
        }
        v
    };
    let mut sc = vec![vec![vec![k.zero(); n]; n]; n];
    for i in 0..na {
        for j in 0..na {
            sc[i][j] = pad(&a.struct_consts[i][j], 0);
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            sc[na + i][na + j] = pad(&b.struct_consts[i][j], na);
        }
    }
    let mut unit = pad(&a.unit, 0);
    for (i, c) in b.unit.iter().enumerate() {
        unit[na + i] = c.clone();
    }
    let mut s = linalg::zeros(k, n, n);
    for r in 0..na {
        for c in 0..na {
            let (rr, cc) = if swap { (r, na + c) } else { (r, c) };
            s[rr][cc] = a.sigma_matrix[r][c].clone();
        }
    }
    for r in 0..nb {
        for c in 0..nb {
            let (rr, cc) = if swap { (na + r, c) } else { (na + r, na + c) };
            s[rr][cc] = b.sigma_matrix[r][c].clone();
        }
    }
    let mut out = FinSigmaAlgebra::new(k, sc, unit, s)?;
    if a.splitting.is_some() || b.splitting.is_some() {
        if let (Some(sa), Some(sb)) = (known_splitting(a), known_splitting(b)) {
            let mut es: Vec<Elem> = sa.iter().map(|x| pad(x, 0)).collect();
            es.extend(sb.iter().map(|x| pad(x, na)));
            out.splitting = Some(es);
        }
    }
    Ok(out)
}

/// A x B with componentwise sigma.
pub fn direct_product(a: &FinSigmaAlgebra, b: &FinSigmaAlgebra) -> Result<FinSigmaAlgebra> {
    block(a, b, false)
}

/// A x A with sigma(x, y) = (sigma(y), sigma(x)).
pub fn swap_product(a: &FinSigmaAlgebra) -> Result<FinSigmaAlgebra> {
    block(a, a, true)
}

/// a |-> (a, a) into A x A or its swapped form.
pub fn diagonal(a: &FinSigmaAlgebra, swap: bool) -> Result<SigmaAlgebraMorphism> {
    let k = &a.base;
    let t = block(a, a, swap)?;
    let cols: Vec<Elem> = (0..a.dim)
        .map(|i| {
            let mut v = a.basis(i);
            v.extend(a.basis(i));
            v
        })
        .collect();
    SigmaAlgebraMorphism::new(a.clone(), t.clone(), linalg::from_columns(k, &cols, t.dim))
}

/// An algebra over F_{p^d} viewed over F_p, with basis w^l e_i at index i * d + l.
pub fn flatten_to_prime(a: &FinSigmaAlgebra) -> Result<FinSigmaAlgebra> {
    let big = &a.base;
    let ff = big
        .finite_field()
        .ok_or_else(|| Error::Unsupported(format!("flattening over {}", big.name())))?;
    let fp = DifferenceField::prime(ff.p, 0)?;
    let d = ff.n;
    let n = a.dim;
    let w = big.generator()?;
    let sw = big.sigma(&w);
    let wp: Vec<Scalar> = (0..2 * d).map(|l| big.pow(&w, l as u64)).collect();
    let lift = |coeffs: &[Scalar], out: &mut Elem| {
        // coefficients over e_r in K -> flat coordinates over F_p
        for (r, c) in coeffs.iter().enumerate() {
            for (s, &v) in big.ff_coeffs(c).iter().enumerate() {
                out[r * d + s] = fp.from_u64(v);
            }
        }
    };
    let nd = n * d;
    let mut sc = vec![vec![vec![fp.zero(); nd]; nd]; nd];
    for i in 0..n {
        for l in 0..d {
            for j in 0..n {
                for m in 0..d {
                    let coeffs: Elem = a.struct_consts[i][j].iter().map(|c| big.mul(c, &wp[l + m])).collect();
                    lift(&coeffs, &mut sc[i * d + l][j * d + m]);
                }
            }
        }
    }
    let mut unit = vec![fp.zero(); nd];
    lift(&a.unit, &mut unit);
    let mut cols = Vec::with_capacity(nd);
    for j in 0..n {
        for l in 0..d {
            let swl = big.pow(&sw, l as u64);
            let coeffs: Elem = (0..n).map(|i| big.mul(&a.sigma_matrix[i][j], &swl)).collect();
            let mut col = vec![fp.zero(); nd];
            lift(&coeffs, &mut col);
            cols.push(col);
        }
    }
    FinSigmaAlgebra::new(&fp, sc, unit, linalg::from_columns(&fp, &cols, nd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::findiff::predicates::*;

    #[test]
    fn generated_subalgebras() {
        let k = DifferenceField::prime(3, 0).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        assert_eq!(sigma_subalgebra_generated(&s, &[]).unwrap().0.dim, 1);
        let (sub, incl) = sigma_subalgebra_generated(&s, &[s.basis(0)]).unwrap();
        assert_eq!(sub.dim, 2);
        assert!(incl.validate().ok());
    }

    #[test]
    fn quotients() {
        let k = DifferenceField::prime(3, 0).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        assert_eq!(quotient_by_sigma_ideal(&s, &[s.basis(0)]).unwrap_err(), Error::ZeroRing);
        let (q, p) = quotient_by_sigma_ideal(&s, &[]).unwrap();
        assert_eq!(q.dim, 2);
        assert!(p.validate().ok());
        let t = FinSigmaAlgebra::split(&k, &[1, 0, 2]);
        let (q, p) = quotient_by_sigma_ideal(&t, &[t.basis(2)]).unwrap();
        assert_eq!(q.dim, 2);
        assert!(q.validate().ok() && p.validate().ok());
        assert!(is_strongly_sigma_etale(&q));
    }

    #[test]
    fn tensor_of_swaps() {
        let k = DifferenceField::prime(5, 0).unwrap();
        let s = FinSigmaAlgebra::split(&k, &[1, 0]);
        let t = tensor_product(&s, &s).unwrap();
        assert!(t.validate().ok());
        assert_eq!(t.dim, 4);
        for i in 0..4 {
            assert_eq!(is_periodic(&t, &t.basis(i), 10), Periodicity::Periodic(2));
        }
        let one = FinSigmaAlgebra::base_algebra(&k);
        assert_eq!(tensor_product(&one, &s).unwrap(), s);
        assert!(tensor_left_inclusion(&s, &s).unwrap().validate().ok());
    }

    #[test]
    fn base_change_f3_to_f9() {
        let k = DifferenceField::prime(3, 0).unwrap();
        let emb = FieldEmbedding::finite_extension(&k, 2).unwrap();
        let a = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[1, 0, 1]), &Poly::x(&k)).unwrap();
        let b = base_change(&a, &emb).unwrap();
        assert!(b.validate().ok());
        assert_eq!(b.dim, 2);
        assert_eq!(is_etale(&a), is_etale(&b));
        let f9 = DifferenceField::finite(3, vec![1, 0, 1], 1).unwrap();
        let e = FieldEmbedding::finite_extension(&f9, 2).unwrap();
        assert!(e.is_compatible());
        let bad = FieldEmbedding { big: DifferenceField::finite(3, e.big.finite_field().unwrap().defpoly.clone(), 0).unwrap(), ..e };
        assert!(matches!(base_change(&FinSigmaAlgebra::base_algebra(&f9), &bad), Err(Error::Compatibility(_))));
    }

    #[test]
    fn flatten_field_extension() {
        let f4 = DifferenceField::finite(2, vec![1, 1, 1], 1).unwrap();
        let s = FinSigmaAlgebra::split(&f4, &[1, 0]);
        let flat = flatten_to_prime(&s).unwrap();
        assert_eq!(flat.dim, 4);
        assert!(flat.validate().ok());
        assert!(is_strongly_sigma_etale(&flat));
        assert!(is_strongly_sigma_etale(&flatten_to_prime(&FinSigmaAlgebra::base_algebra(&f4)).unwrap()));
    }

    #[test]
    fn products_and_diagonal() {
        let k = DifferenceField::prime(2, 0).unwrap();
        let f4 = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[1, 1, 1]), &Poly::from_ints(&k, &[1, 1])).unwrap();
        let p = direct_product(&f4, &FinSigmaAlgebra::base_algebra(&k)).unwrap();
        assert!(p.validate().ok());
        let sw = swap_product(&f4).unwrap();
        assert!(sw.validate().ok());
        assert!(diagonal(&f4, true).unwrap().validate().ok());
        assert!(diagonal(&f4, false).unwrap().validate().ok());
    }
}
