//! Primitive idempotents by Berlekamp-style splitting over finite bases.

use super::{Elem, FinSigmaAlgebra};
use crate::error::{Error, Result};
use crate::exactfield::Scalar;
use crate::linalg::{self, Mat, Subspace};
use crate::poly::{factor, Poly};
use num_bigint::BigUint;

#[derive(Clone, Debug, PartialEq)]
pub struct Idempotent {
    pub coords: Elem,
    /// Set only when certified primitive.
    pub primitive: bool,
}

fn q_of(a: &FinSigmaAlgebra) -> BigUint {
    let ff = a.base.finite_field().expect("finite base");
    BigUint::from(ff.p).pow(ff.n as u32)
}

/// Matrix of x -> x^q (F_q-linear).
pub fn frobenius_matrix(a: &FinSigmaAlgebra) -> Mat {
    let q = q_of(a);
    let cols: Vec<Elem> = (0..a.dim).map(|j| a.pow(&a.basis(j), &q)).collect();
    linalg::from_columns(&a.base, &cols, a.dim)
}

/// Largest etale subalgebra: the stable image of x -> x^q.
pub fn etale_part(a: &FinSigmaAlgebra) -> Subspace {
    let k = &a.base;
    let f = frobenius_matrix(a);
    let mut cur = Subspace::full(k, a.dim);
    loop {
        let imgs: Vec<Elem> = cur.rows.iter().map(|v| linalg::mat_vec(k, &f, v)).collect();
        let next = Subspace::span(k, a.dim, &imgs);
        if next.dim() == cur.dim() {
            return next;
        }
        cur = next;
    }
}

/// Basis of {x : x^q = x}.
pub fn fixed_space(a: &FinSigmaAlgebra) -> Vec<Elem> {
    let k = &a.base;
    let mut f = frobenius_matrix(a);
    for (i, row) in f.iter_mut().enumerate() {
        row[i] = k.sub(&row[i], &k.one());
    }
    linalg::kernel(k, &f, a.dim)
}

/// Minimal polynomial of x inside the ideal eA, whose unit is e.
fn min_poly_in(a: &FinSigmaAlgebra, e: &[Scalar], x: &[Scalar]) -> Result<Poly> {
    let k = &a.base;
    let mut pows: Vec<Elem> = vec![e.to_vec()];
    loop {
        let next = a.mul(pows.last().unwrap(), x);
        let m = linalg::from_columns(k, &pows, a.dim);
        if let Some(c) = linalg::solve(k, &m, &next) {
            let mut coeffs: Vec<Scalar> = c.iter().map(|v| k.neg(v)).collect();
            coeffs.push(k.one());
            return Ok(Poly::new(k, coeffs));
        }
        pows.push(next);
        if pows.len() > a.dim + 1 {
            return Err(Error::Invariant("minimal polynomial degree exceeds dimension".into()));
        }
    }
}

/// Split e using the Lagrange idempotents of the roots of the minimal polynomial of x = e b.
fn split_by(a: &FinSigmaAlgebra, e: &[Scalar], b: &[Scalar]) -> Result<Vec<Elem>> {
    let k = &a.base;
    let x = a.mul(e, b);
    let mu = min_poly_in(a, e, &x)?;
    if mu.degree() <= 1 {
        return Ok(vec![e.to_vec()]);
    }
    let roots = factor::roots(&mu)?;
    if roots.len() != mu.degree() {
        return Err(Error::Invariant("fixed element with non-split minimal polynomial".into()));
    }
    let mut out = Vec::new();
    for (i, c) in roots.iter().enumerate() {
        let mut acc = e.to_vec();
        for (j, d) in roots.iter().enumerate() {
            if i == j {
                continue;
            }
            let lin = a.sub(&x, &a.scale(d, e));
            let inv = k.inv(&k.sub(c, d))?;
            acc = a.scale(&inv, &a.mul(&acc, &lin));
        }
        out.push(acc);
    }
    Ok(out)
}

fn berlekamp(a: &FinSigmaAlgebra) -> Result<Vec<Elem>> {
    let fix = fixed_space(a);
    let mut idem: Vec<Elem> = vec![a.one()];
    for b in &fix {
        if idem.len() == fix.len() {
            break;
        }
        let mut next = Vec::new();
        for e in &idem {
            next.extend(split_by(a, e, b)?);
        }
        idem = next;
    }
    if idem.len() != fix.len() {
        return Err(Error::Invariant(format!("found {} idempotents, expected {}", idem.len(), fix.len())));
    }
    Ok(idem)
}

/// True when the basis vectors are orthogonal idempotents summing to the unit.
pub fn is_split_diagonal(a: &FinSigmaAlgebra) -> bool {
    let k = &a.base;
    for i in 0..a.dim {
        for j in 0..a.dim {
            let want = if i == j { a.basis(i) } else { a.zero() };
            if a.struct_consts[i][j] != want {
                return false;
            }
        }
    }
    a.unit.iter().all(|c| k.is_one(c))
}

/// Check a supplied family: idempotent, pairwise orthogonal, summing to 1, nonzero.
pub fn check_splitting(a: &FinSigmaAlgebra, es: &[Elem]) -> Result<()> {
    let mut sum = a.zero();
    for (i, e) in es.iter().enumerate() {
        if a.is_zero(e) || !a.is_idempotent(e) {
            return Err(Error::Input(format!("supplied element {i} is not a nonzero idempotent")));
        }
        for f in &es[i + 1..] {
            if !a.is_zero(&a.mul(e, f)) {
                return Err(Error::Input("supplied idempotents are not orthogonal".into()));
            }
        }
        sum = a.add(&sum, e);
    }
    if sum != a.unit {
        return Err(Error::Input("supplied idempotents do not sum to 1".into()));
    }
    Ok(())
}

pub fn primitive_idempotents(a: &FinSigmaAlgebra) -> Result<Vec<Idempotent>> {
    if a.base.is_finite() {
        return Ok(berlekamp(a)?.into_iter().map(|coords| Idempotent { coords, primitive: true }).collect());
    }
    if is_split_diagonal(a) {
        return Ok((0..a.dim).map(|i| Idempotent { coords: a.basis(i), primitive: true }).collect());
    }
    if let Some(es) = &a.splitting {
        check_splitting(a, es)?;
        // a supplied family of dim(A) members is a full splitting of A = k^n
        let full = es.len() == a.dim;
        return Ok(es.iter().map(|e| Idempotent { coords: e.clone(), primitive: full }).collect());
    }
    Err(Error::RestrictedAutomation(format!(
        "primitive idempotents over {} need a finite base, a split-diagonal basis, or a supplied splitting",
        a.base.name()
    )))
}

/// Residue degree [eA/rad : k] of each primitive idempotent.
pub fn residue_degrees(a: &FinSigmaAlgebra, idem: &[Elem]) -> Vec<usize> {
    let k = &a.base;
    let e = etale_part(a);
    idem.iter()
        .map(|f| {
            let vs: Vec<Elem> = e.rows.iter().map(|v| a.mul(f, v)).collect();
            linalg::rank(k, &vs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::DifferenceField;

    #[test]
    fn splits_y2_minus_1_over_f5() {
        let k = DifferenceField::prime(5, 1).unwrap();
        let a = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[-1, 0, 1]), &Poly::x(&k)).unwrap();
        let ids = primitive_idempotents(&a).unwrap();
        assert_eq!(ids.len(), 2);
        let mut got: Vec<Elem> = ids.into_iter().map(|i| i.coords).collect();
        got.sort_by_key(|v| a.format_elem(v));
        // 3(1+y) and 3(1-y)
        let mut want = vec![vec![k.from_i64(3), k.from_i64(3)], vec![k.from_i64(3), k.from_i64(-3)]];
        want.sort_by_key(|v| a.format_elem(v));
        assert_eq!(got, want);
    }

    #[test]
    fn field_has_one_idempotent_and_residue_degree() {
        let k = DifferenceField::prime(2, 1).unwrap();
        let f4 = FinSigmaAlgebra::monogenic(&Poly::from_ints(&k, &[1, 1, 1]), &Poly::from_ints(&k, &[1, 1])).unwrap();
        let ids = primitive_idempotents(&f4).unwrap();
        assert_eq!(ids.len(), 1);
        assert_eq!(residue_degrees(&f4, &[ids[0].coords.clone()]), vec![2]);
    }

    #[test]
    fn nonreduced_algebra() {
        // F2[y]/(y (y+1)^2): two primitive idempotents, etale part of dim 2
        let k = DifferenceField::prime(2, 0).unwrap();
        let f = Poly::from_ints(&k, &[0, 1, 0, 1]);
        let a = FinSigmaAlgebra::monogenic(&f, &Poly::x(&k)).unwrap();
        assert_eq!(primitive_idempotents(&a).unwrap().len(), 2);
        assert_eq!(etale_part(&a).dim(), 2);
    }

    #[test]
    fn restricted_over_q() {
        let q = DifferenceField::rationals();
        let a = FinSigmaAlgebra::monogenic(&Poly::from_ints(&q, &[-1, 0, 1]), &Poly::x(&q)).unwrap();
        assert!(matches!(primitive_idempotents(&a), Err(Error::RestrictedAutomation(_))));
        assert_eq!(primitive_idempotents(&FinSigmaAlgebra::split(&q, &[1, 0])).unwrap().len(), 2);
    }
}
