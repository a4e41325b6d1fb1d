//! Exhaustive oracles over small finite fields, independent of the decision procedures.
#![allow(dead_code)]

use sigma_etale::findiff::{Elem, FinSigmaAlgebra};
use sigma_etale::linalg::Subspace;
use sigma_etale::Scalar;

/// Every element of A, when there are at most `limit` of them.
pub fn elements(a: &FinSigmaAlgebra, limit: usize) -> Option<Vec<Elem>> {
    let els = a.base.elements().ok()?;
    let q = els.len();
    let total = q.checked_pow(a.dim as u32)?;
    if total > limit {
        return None;
    }
    Some(
        (0..total)
            .map(|mut c| {
                (0..a.dim)
                    .map(|_| {
                        let x = els[c % q].clone();
                        c /= q;
                        x
                    })
                    .collect()
            })
            .collect(),
    )
}

/// All solutions of e^2 = e.
pub fn idempotents(a: &FinSigmaAlgebra, limit: usize) -> Option<Vec<Elem>> {
    Some(elements(a, limit)?.into_iter().filter(|x| a.mul(x, x) == *x).collect())
}

/// sigma^n(e) = e for some n <= the number of idempotents.
pub fn is_periodic(a: &FinSigmaAlgebra, e: &[Scalar], bound: usize) -> bool {
    let mut y = a.sigma(e);
    for _ in 0..bound.max(1) {
        if y == e {
            return true;
        }
        y = a.sigma(&y);
    }
    false
}

/// Span of the periodic idempotents and the number of idempotents.
pub fn periodic_idempotent_span(a: &FinSigmaAlgebra, limit: usize) -> Option<(Subspace, usize)> {
    let idem = idempotents(a, limit)?;
    let n = idem.len();
    let per: Vec<Elem> = idem.iter().filter(|e| is_periodic(a, e, n)).cloned().collect();
    Some((Subspace::span(&a.base, a.dim, &per), n))
}

/// No nonzero element is killed by sigma.
pub fn sigma_reduced_by_enumeration(a: &FinSigmaAlgebra, limit: usize) -> Option<bool> {
    Some(elements(a, limit)?.iter().all(|x| a.is_zero(x) || !a.is_zero(&a.sigma(x))))
}
