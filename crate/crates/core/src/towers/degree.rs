//! Subfield closures, limit degrees and benign extensions.

use super::{FamilySpec, LevelCert, TElem, Tower, TowerExtension, TowerSpec};
use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, MPoly, Scalar};
use crate::expr;
use crate::linalg::Subspace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Largest tower dimension for which degrees are recomputed by linear algebra.
pub const LA_LIMIT: usize = 512;

/// The K-subalgebra generated by a subalgebra W and further elements; a subfield when the
/// tower is a field.
pub fn adjoin(t: &Tower, w: &Subspace, gens: &[TElem]) -> Subspace {
    let k = &t.base;
    let mut out = w.clone();
    let mut frontier: Vec<TElem> = w.rows.clone();
    let gens: Vec<TElem> = gens.iter().map(|g| t.pad(g)).collect();
    while let Some(v) = frontier.pop() {
        for g in &gens {
            let p = t.mul(&v, g);
            if out.insert(k, &p) {
                frontier.push(p);
            }
        }
    }
    out
}

/// K itself inside the tower.
pub fn base_subspace(t: &Tower) -> Subspace {
    Subspace::span(&t.base, t.dim(), &[t.one()])
}

/// Re-embed a subspace into a larger materialization of the same tower.
pub fn widen(t: &Tower, w: &Subspace) -> Subspace {
    let rows: Vec<TElem> = w.rows.iter().map(|r| t.pad(r)).collect();
    Subspace::span(&t.base, t.dim(), &rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitDegreeReport {
    pub d_sequence: Vec<usize>,
    /// First index from which the computed sequence is constant.
    pub stabilized_at: usize,
    pub value: usize,
    /// Structural certificate for the eventual value.
    pub certified: bool,
    /// The constant tail is at least `window` long.
    pub observed: bool,
    pub window: usize,
    /// Indices recomputed by exact linear algebra (the rest are structural).
    pub linear_algebra_through: Option<usize>,
}

pub const DEFAULT_WINDOW: usize = 4;

/// d_i = [K(F, ..., sigma^i F) : K(F, ..., sigma^{i-1} F)] for the generating set F made of the
/// explicit generators and the first member of each family.
pub fn limit_degree(ext: &TowerExtension, horizon: usize) -> Result<LimitDegreeReport> {
    let s0 = ext.min_start();
    let structural = structural_degrees(ext, horizon);
    let mut la: Vec<usize> = Vec::new();
    let mut h_la = None;
    for i in 0..=horizon {
        if ext.dim_at(s0 + i as i32) > LA_LIMIT {
            break;
        }
        h_la = Some(i);
    }
    if let Some(hl) = h_la {
        let t = ext.materialize(s0 + hl as i32)?;
        let e = t.explicit;
        let mut cur: Vec<TElem> = (0..e).map(|j| t.gen(j)).collect();
        let mut w = base_subspace(&t);
        let mut prev = 1usize;
        for i in 0..=hl {
            let mut new = cur.clone();
            for f in 0..t.family_names.len() {
                let st = t.family_starts[f];
                if let Some(m) = t.member(f, st + i as i32) {
                    new.push(t.gen(m));
                }
            }
            w = adjoin(&t, &w, &new);
            let d = w.dim();
            if d % prev != 0 {
                return Err(Error::Invariant(format!("degree {d} not a multiple of {prev}: tower is not a field")));
            }
            la.push(d / prev);
            prev = d;
            cur = cur.iter().map(|x| t.sigma(x)).collect::<Result<_>>()?;
        }
    }
    if let Some(st) = &structural {
        for (i, (a, b)) in la.iter().zip(st).enumerate() {
            if a != b {
                return Err(Error::Invariant(format!("d_{i}: linear algebra gives {a}, structure gives {b}")));
            }
        }
    }
    let seq: Vec<usize> = match &structural {
        Some(st) => st.clone(),
        None => la.clone(),
    };
    if seq.is_empty() {
        return Err(Error::Unsupported("tower too large for an uncertified degree computation".into()));
    }
    for i in 1..seq.len() {
        if seq[i] > seq[i - 1] {
            return Err(Error::Invariant(format!("d sequence increases at {i}: {seq:?}")));
        }
    }
    let last = *seq.last().unwrap();
    let mut stab = seq.len() - 1;
    while stab > 0 && seq[stab - 1] == last {
        stab -= 1;
    }
    // a finite tower is sigma-stable once some d_i (i >= 1) equals 1
    let finite_cert = ext.is_finite() && seq.iter().skip(1).any(|&d| d == 1);
    let certified = structural.is_some() || finite_cert;
    Ok(LimitDegreeReport {
        observed: seq.len() - stab >= DEFAULT_WINDOW,
        d_sequence: seq,
        stabilized_at: stab,
        value: last,
        certified,
        window: DEFAULT_WINDOW,
        linear_algebra_through: h_la,
    })
}

/// Degrees read off certified levels: explicit part, then one factor per family and index.
fn structural_degrees(ext: &TowerExtension, horizon: usize) -> Option<Vec<usize>> {
    if !ext.certified() || !ext.certified_through(ext.min_start() + horizon as i32) {
        return None;
    }
    let e = ext.explicit_part();
    if !e.gens.iter().all(|g| g.cert != LevelCert::Uncertified) {
        return None;
    }
    let fam: usize = (0..ext.spec.families.len()).map(|f| ext.family_degree(f)).product();
    if ext.is_finite() {
        // explicit generators only: degrees from the explicit tower need linear algebra
        return None;
    }
    Some((0..=horizon).map(|i| if i == 0 { e.dim() * fam } else { fam }).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BenignKind {
    /// x^r - c t_j over a shift field with the r-th roots of unity in the constants
    Radical,
    /// quadratic g; independence of the discriminant square classes checked by specialization
    Specialization,
}

/// An element of the base, from a polynomial coefficient that involves no tower generator.
fn base_coeff(p: &MPoly) -> Option<Scalar> {
    if p.is_zero() {
        return None;
    }
    p.as_constant()
}

fn count_roots_of_unity(k0: &DifferenceField, r: usize) -> Result<usize> {
    let els = k0.elements()?;
    Ok(els.iter().filter(|x| !k0.is_zero(x) && k0.is_one(&k0.pow(x, r as u64))).count())
}

/// L = K<M> with M = K(b), b a root of g, as a single family.
pub fn benign_make(base: &DifferenceField, g: &str, kind: BenignKind, verify_horizon: usize) -> Result<TowerExtension> {
    if !base.is_shift() {
        return Err(Error::Unsupported(
            "benign constructions need a shift base: over a finite base all transforms of M coincide".into(),
        ));
    }
    let k0 = base.constants();
    if !k0.is_finite() {
        return Err(Error::Unsupported("benign constructions need a finite constant field".into()));
    }
    let p = parse_x_poly(base, g)?;
    let d = p.len() - 1;
    if d <= 1 {
        return Err(Error::Trivial("polynomial of degree <= 1: M = K".into()));
    }
    let coeffs: Vec<Scalar> = p.clone();
    if base.characteristic() % d as u64 == 0 && kind == BenignKind::Radical {
        return Err(Error::Unsupported(format!("x^{d} - u is inseparable in characteristic {}", base.characteristic())));
    }
    // roots in K: only possible to detect directly for constant coefficients
    let all_const: Option<Vec<Scalar>> = coeffs
        .iter()
        .map(|c| {
            let r = base.ratfunc(c);
            let n = if r.num.is_zero() { Some(k0.zero()) } else { r.num.as_constant() };
            n.and_then(|n| r.den.as_constant().and_then(|dd| k0.div(&n, &dd).ok()))
        })
        .collect();
    if let Some(cs) = &all_const {
        let f = crate::poly::Poly::new(&k0, cs.clone());
        if !crate::poly::factor::roots(&f)?.is_empty() {
            return Err(Error::Trivial("g has a root in K, so M = K".into()));
        }
    }
    match kind {
        BenignKind::Radical => {
            if (1..d).any(|e| !base.is_zero(&coeffs[e])) || !base.is_one(&coeffs[d]) {
                return Err(Error::Input("radical kind needs g = x^r - u".into()));
            }
            let mu = count_roots_of_unity(&k0, d)?;
            if mu != d {
                return Err(Error::NotGalois(format!(
                    "only {mu} of the {d} roots of x^{d} - u lie in K(b): the constants lack the {d}-th roots of unity"
                )));
            }
        }
        BenignKind::Specialization => {
            if d != 2 {
                return Err(Error::Unsupported("specialization-verified benign extensions are quadratic".into()));
            }
            if base.characteristic() == 2 {
                return Err(Error::Unsupported("quadratic case needs odd characteristic".into()));
            }
        }
    }
    let spec = TowerSpec {
        base: base.clone(),
        levels: vec![],
        families: vec![FamilySpec { name: "b".into(), minpoly: g.to_string(), start: 0 }],
    };
    let mut ext = TowerExtension::make(spec)?;
    match kind {
        BenignKind::Radical => {
            if !matches!(ext.family_cert(0), LevelCert::RadicalChain { .. }) {
                return Err(Error::Input("radical kind needs g = x^r - c t_j with c a nonzero constant".into()));
            }
        }
        BenignKind::Specialization => {
            let disc = base.sub(&base.mul(&coeffs[1], &coeffs[1]), &base.mul(&base.from_i64(4), &base.mul(&coeffs[0], &coeffs[2])));
            let ds: Vec<Scalar> = (0..=verify_horizon as u32).map(|i| base.sigma_n(&disc, i)).collect();
            if let Some(s) = square_class_dependency(base, &ds, 0x5eed)? {
                return Err(Error::RestrictedAutomation(format!(
                    "discriminant transforms {s:?} multiply to what may be a square: degrees are not certified"
                )));
            }
            ext.set_family_certs(LevelCert::SquareClass, Some(verify_horizon as i32));
        }
    }
    Ok(ext)
}

fn parse_x_poly(base: &DifferenceField, g: &str) -> Result<Vec<Scalar>> {
    struct XT<'a>(&'a DifferenceField);
    impl expr::Target for XT<'_> {
        type V = MPoly;
        fn int(&self, n: &num_bigint::BigInt) -> Result<MPoly> {
            Ok(MPoly::constant(self.0.from_bigint(n), self.0))
        }
        fn sym(&self, name: &str) -> Result<MPoly> {
            if name == "x" {
                Ok(MPoly::var(0, self.0))
            } else {
                Ok(MPoly::constant(self.0.parse(name)?, self.0))
            }
        }
        fn add(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
            Ok(a.add(b, self.0))
        }
        fn sub(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
            Ok(a.sub(b, self.0))
        }
        fn mul(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
            Ok(a.mul(b, self.0))
        }
        fn neg(&self, a: &MPoly) -> Result<MPoly> {
            Ok(a.neg(self.0))
        }
        fn div(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
            let c = base_coeff(b).ok_or_else(|| Error::Input("division by a non-constant".into()))?;
            Ok(a.scale(&self.0.inv(&c)?, self.0))
        }
    }
    let p = expr::eval(&XT(base), &expr::parse(g)?)?;
    let d = p.degree_in(0);
    let lc = p.coeff_in(0, d).as_constant().ok_or_else(|| Error::Input("leading coefficient".into()))?;
    let li = base.inv(&lc)?;
    Ok((0..=d).map(|e| base.mul(&p.coeff_in(0, e).as_constant().unwrap_or_else(|| base.zero()), &li)).collect())
}

/// Evaluate an element of k0(t_i) at a point of the constant field; None at a pole.
fn specialize(base: &DifferenceField, x: &Scalar, point: &dyn Fn(i32) -> Scalar) -> Option<Scalar> {
    let k0 = base.constants();
    let r = base.ratfunc(x);
    let ev = |p: &MPoly| -> Scalar {
        let mut acc = k0.zero();
        for (m, c) in &p.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t = k0.mul(&t, &k0.pow(&point(v), e as u64));
            }
            acc = k0.add(&acc, &t);
        }
        acc
    };
    let d = ev(&r.den);
    if k0.is_zero(&d) {
        return None;
    }
    k0.div(&ev(&r.num), &d).ok()
}

fn is_nonsquare(k0: &DifferenceField, x: &Scalar) -> bool {
    let q = k0.order().unwrap();
    !k0.is_zero(x) && !k0.is_one(&k0.pow(x, ((q - 1) / 2) as u64))
}

/// Some nonempty subset whose product could not be shown to be a non-square, if any.
///
/// A product that specializes to a non-square of the constant field is not a square in K.
pub fn square_class_dependency(base: &DifferenceField, ds: &[Scalar], seed: u64) -> Result<Option<Vec<usize>>> {
    let k0 = base.constants();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ds.len();
    if n > 16 {
        return Err(Error::Unsupported("too many discriminants for the subset check".into()));
    }
    let lo = base.min_index().unwrap_or(0);
    let hi = lo + 64;
    'subsets: for mask in 1u32..(1 << n) {
        let mut prod = base.one();
        for (i, d) in ds.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod = base.mul(&prod, d);
            }
        }
        for _ in 0..64 {
            let pt: Vec<Scalar> = (lo..hi).map(|_| k0.random(&mut rng)).collect();
            let f = |v: i32| pt[(v - lo).clamp(0, hi - lo - 1) as usize].clone();
            if let Some(val) = specialize(base, &prod, &f) {
                if is_nonsquare(&k0, &val) {
                    continue 'subsets;
                }
            }
        }
        return Ok(Some((0..n).filter(|i| mask >> i & 1 == 1).collect()));
    }
    let _ = rng.gen::<u8>();
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::generate::examples;

    #[test]
    fn radical_ld_two() {
        let k = DifferenceField::shift(&DifferenceField::prime(5, 0).unwrap()).unwrap();
        let t = benign_make(&k, "x^2 - t0", BenignKind::Radical, 0).unwrap();
        let r = limit_degree(&t, 6).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.certified);
        assert_eq!(r.d_sequence, vec![2; 7]);
        assert!(r.linear_algebra_through.unwrap() >= 4);
    }

    #[test]
    fn cube_roots_over_f7() {
        let k = DifferenceField::shift(&DifferenceField::prime(7, 0).unwrap()).unwrap();
        let t = benign_make(&k, "x^3 - t0", BenignKind::Radical, 0).unwrap();
        assert_eq!(limit_degree(&t, 4).unwrap().value, 3);
        let k5 = DifferenceField::shift(&DifferenceField::prime(5, 0).unwrap()).unwrap();
        assert!(matches!(benign_make(&k5, "x^3 - t0", BenignKind::Radical, 0), Err(Error::NotGalois(_))));
        assert!(matches!(benign_make(&k, "x^2 - 1", BenignKind::Radical, 0), Err(Error::Trivial(_))));
    }

    #[test]
    fn specialization_kind() {
        let k = DifferenceField::shift(&DifferenceField::prime(5, 0).unwrap()).unwrap();
        let t = benign_make(&k, "x^2 + x + t0", BenignKind::Specialization, 4).unwrap();
        let r = limit_degree(&t, 4).unwrap();
        assert_eq!(r.d_sequence, vec![2; 5]);
        assert!(r.certified);
        // discriminant t0 t1: the product of consecutive transforms is not independent
        assert!(benign_make(&k, "x^2 - t0*t1*t1", BenignKind::Specialization, 3).is_ok());
    }

    #[test]
    fn finite_extension_degrees() {
        let t = examples::f9_over_f3();
        let r = limit_degree(&t, 4).unwrap();
        assert_eq!(r.d_sequence[0], 2);
        assert_eq!(r.value, 1);
        assert!(r.certified);
    }

    #[test]
    fn stacked_multiplicativity() {
        let s = examples::radical_stack();
        let r = limit_degree(&s, 3).unwrap();
        assert_eq!(r.value, 4);
        let a = examples::radical(5, 2);
        assert_eq!(limit_degree(&a, 3).unwrap().value, 2);
    }
}
