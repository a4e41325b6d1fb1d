//! Finite-dimensional commutative difference algebras over a DifferenceField.

pub mod constructions;
pub mod core;
pub mod generate;
pub mod idempotents;
pub mod predicates;

use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, Scalar};
use crate::linalg::{self, Mat};
use num_bigint::BigUint;

pub use self::core::{strong_core, StrongCore};
pub use constructions::{
    base_change, direct_product, quotient_by_sigma_ideal, sigma_subalgebra_generated, subalgebra_on, tensor_product,
    FieldEmbedding,
};
pub use idempotents::{primitive_idempotents, Idempotent};
pub use predicates::{
    is_etale, is_periodic, is_sigma_reduced, is_sigma_separable, is_strongly_sigma_etale, twist_and_psi, Periodicity,
};

pub type Elem = Vec<Scalar>;

/// Basis e_1..e_n, e_i e_j = sum_k c[i][j][k] e_k, sigma(e_j) = sum_i S[i][j] e_i,
/// sigma(lambda x) = sigma_base(lambda) sigma(x).
#[derive(Clone, Debug, PartialEq)]
pub struct FinSigmaAlgebra {
    pub base: DifferenceField,
    pub dim: usize,
    pub struct_consts: Vec<Vec<Vec<Scalar>>>,
    pub unit: Elem,
    pub sigma_matrix: Mat,
    /// Externally supplied complete set of orthogonal idempotents, if any.
    pub splitting: Option<Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, law: &str, witness: String) {
        self.violations.push(Violation { law: law.into(), witness });
    }
}

impl FinSigmaAlgebra {
    pub fn new(base: &DifferenceField, struct_consts: Vec<Vec<Vec<Scalar>>>, unit: Elem, sigma_matrix: Mat) -> Result<Self> {
        let n = unit.len();
        if n == 0 {
            return Err(Error::ZeroRing);
        }
        if struct_consts.len() != n
            || struct_consts.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n))
        {
            return Err(Error::Input(format!("structure tensor must be {n}x{n}x{n}")));
        }
        if sigma_matrix.len() != n || sigma_matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!("sigma matrix must be {n}x{n}")));
        }
        Ok(FinSigmaAlgebra { base: base.clone(), dim: n, struct_consts, unit, sigma_matrix, splitting: None })
    }

    /// The base field itself, as a one-dimensional algebra.
    pub fn base_algebra(k: &DifferenceField) -> Self {
        FinSigmaAlgebra::new(k, vec![vec![vec![k.one()]]], vec![k.one()], vec![vec![k.one()]]).unwrap()
    }

    /// k^n with componentwise product and sigma permuting coordinates: sigma(e_j) = e_{perm[j]}.
    pub fn split(k: &DifferenceField, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut c = vec![vec![vec![k.zero(); n]; n]; n];
        for (i, ci) in c.iter_mut().enumerate() {
            ci[i][i] = k.one();
        }
        let mut s = linalg::zeros(k, n, n);
        for (j, &pj) in perm.iter().enumerate() {
            s[pj][j] = k.one();
        }
        FinSigmaAlgebra::new(k, c, vec![k.one(); n], s).unwrap()
    }

    /// k^n with sigma(e_j) = sum of e_i over g(i) = j, i.e. pullback of functions along g.
    pub fn from_map(k: &DifferenceField, g: &[usize]) -> Self {
        let n = g.len();
        let mut a = Self::split(k, &(0..n).collect::<Vec<_>>());
        a.sigma_matrix = linalg::zeros(k, n, n);
        for (i, &gi) in g.iter().enumerate() {
            a.sigma_matrix[i][gi] = k.one();
        }
        a
    }

    /// k[y]/(f) with sigma(y) = h (h given as a polynomial, reduced mod f).
    pub fn monogenic(f: &crate::poly::Poly, h: &crate::poly::Poly) -> Result<Self> {
        let k = &f.field;
        let d = f.deg().filter(|&d| d > 0).ok_or(Error::ZeroRing)?;
        let f = f.monic();
        let coords = |p: &crate::poly::Poly| -> Result<Elem> {
            let r = p.rem(&f)?;
            Ok((0..d).map(|i| r.coeff(i)).collect())
        };
        let pw = |i: usize| {
            let mut c = vec![k.zero(); i + 1];
            c[i] = k.one();
            crate::poly::Poly::new(k, c)
        };
        let mut sc = vec![vec![vec![]; d]; d];
        for (i, row) in sc.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = coords(&pw(i + j))?;
            }
        }
        let mut unit = vec![k.zero(); d];
        unit[0] = k.one();
        let mut cols = Vec::new();
        let mut cur = crate::poly::Poly::one(k);
        let hr = h.rem(&f)?;
        for _ in 0..d {
            cols.push(coords(&cur)?);
            cur = cur.mul(&hr).rem(&f)?;
        }
        let s = linalg::from_columns(k, &cols, d);
        FinSigmaAlgebra::new(k, sc, unit, s)
    }

    pub fn with_splitting(mut self, idem: Vec<Elem>) -> Self {
        self.splitting = Some(idem);
        self
    }

    pub fn zero(&self) -> Elem {
        vec![self.base.zero(); self.dim]
    }

    pub fn one(&self) -> Elem {
        self.unit.clone()
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut v = self.zero();
        v[i] = self.base.one();
        v
    }

    pub fn is_zero(&self, x: &[Scalar]) -> bool {
        x.iter().all(|c| self.base.is_zero(c))
    }

    pub fn add(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        x.iter().zip(y).map(|(a, b)| self.base.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        x.iter().zip(y).map(|(a, b)| self.base.sub(a, b)).collect()
    }

    pub fn neg(&self, x: &[Scalar]) -> Elem {
        x.iter().map(|a| self.base.neg(a)).collect()
    }

    pub fn scale(&self, c: &Scalar, x: &[Scalar]) -> Elem {
        x.iter().map(|a| self.base.mul(a, c)).collect()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        let k = &self.base;
        let mut r = self.zero();
        for (i, xi) in x.iter().enumerate() {
            if k.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if k.is_zero(yj) {
                    continue;
                }
                let c = k.mul(xi, yj);
                for (t, ct) in self.struct_consts[i][j].iter().enumerate() {
                    if !k.is_zero(ct) {
                        r[t] = k.add(&r[t], &k.mul(&c, ct));
                    }
                }
            }
        }
        r
    }

    pub fn pow(&self, x: &[Scalar], e: &BigUint) -> Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, x);
            }
        }
        r
    }

    pub fn sigma(&self, x: &[Scalar]) -> Elem {
        let sx: Elem = x.iter().map(|a| self.base.sigma(a)).collect();
        linalg::mat_vec(&self.base, &self.sigma_matrix, &sx)
    }

    pub fn sigma_n(&self, x: &[Scalar], n: usize) -> Elem {
        let mut r = x.to_vec();
        for _ in 0..n {
            r = self.sigma(&r);
        }
        r
    }

    pub fn is_idempotent(&self, x: &[Scalar]) -> bool {
        self.mul(x, x) == x
    }

    /// Multiplication-by-x operator (columns x e_j).
    pub fn mult_matrix(&self, x: &[Scalar]) -> Mat {
        let cols: Vec<Elem> = (0..self.dim).map(|j| self.mul(x, &self.basis(j))).collect();
        linalg::from_columns(&self.base, &cols, self.dim)
    }

    pub fn format_elem(&self, x: &[Scalar]) -> String {
        let parts: Vec<String> = x.iter().map(|c| self.base.format(c)).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Check commutativity, associativity, unit law and the sigma endomorphism laws.
    pub fn validate(&self) -> ValidationReport {
        let k = &self.base;
        let n = self.dim;
        let mut rep = ValidationReport::default();
        let canon = |x: &Scalar| k.is_canonical(x);
        let all_canon = self.struct_consts.iter().flatten().flatten().all(canon)
            && self.unit.iter().all(canon)
            && self.sigma_matrix.iter().flatten().all(canon);
        if !all_canon {
            rep.push("canonical form", "non-canonical scalar in input".into());
            return rep;
        }
        for i in 0..n {
            for j in 0..n {
                if self.struct_consts[i][j] != self.struct_consts[j][i] {
                    rep.push("commutativity", format!("e{i}*e{j} != e{j}*e{i}"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let eij = &self.struct_consts[i][j];
                for l in 0..n {
                    let a = self.mul(eij, &self.basis(l));
                    let b = self.mul(&self.basis(i), &self.struct_consts[j][l]);
                    if a != b {
                        rep.push("associativity", format!("(e{i}e{j})e{l} != e{i}(e{j}e{l})"));
                    }
                }
            }
        }
        for i in 0..n {
            if self.mul(&self.unit, &self.basis(i)) != self.basis(i) {
                rep.push("unit", format!("1*e{i} != e{i}"));
            }
        }
        if self.sigma(&self.unit) != self.unit {
            rep.push("sigma(1)=1", format!("sigma(1) = {}", self.format_elem(&self.sigma(&self.unit))));
        }
        let sig: Vec<Elem> = (0..n).map(|j| self.sigma(&self.basis(j))).collect();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.sigma(&self.struct_consts[i][j]);
                let rhs = self.mul(&sig[i], &sig[j]);
                if lhs != rhs {
                    rep.push("sigma multiplicative", format!("sigma(e{i}e{j}) != sigma(e{i})sigma(e{j})"));
                }
            }
        }
        rep
    }
}

/// Matrix of a k-linear map between algebras over the same base (target.dim x source.dim).
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaAlgebraMorphism {
    pub source: FinSigmaAlgebra,
    pub target: FinSigmaAlgebra,
    pub matrix: Mat,
}

impl SigmaAlgebraMorphism {
    pub fn new(source: FinSigmaAlgebra, target: FinSigmaAlgebra, matrix: Mat) -> Result<Self> {
        if source.base != target.base {
            return Err(Error::MixedFields);
        }
        if matrix.len() != target.dim || matrix.iter().any(|r| r.len() != source.dim) {
            return Err(Error::Input("morphism matrix has wrong shape".into()));
        }
        Ok(SigmaAlgebraMorphism { source, target, matrix })
    }

    pub fn apply(&self, x: &[Scalar]) -> Elem {
        linalg::mat_vec(&self.target.base, &self.matrix, x)
    }

    pub fn validate(&self) -> ValidationReport {
        let (a, b) = (&self.source, &self.target);
        let mut rep = ValidationReport::default();
        if self.apply(&a.unit) != b.unit {
            rep.push("unital", "f(1) != 1".into());
        }
        for i in 0..a.dim {
            for j in 0..a.dim {
                let lhs = self.apply(&a.struct_consts[i][j]);
                let rhs = b.mul(&self.apply(&a.basis(i)), &self.apply(&a.basis(j)));
                if lhs != rhs {
                    rep.push("multiplicative", format!("f(e{i}e{j}) != f(e{i})f(e{j})"));
                }
            }
            let lhs = self.apply(&a.sigma(&a.basis(i)));
            let rhs = b.sigma(&self.apply(&a.basis(i)));
            if lhs != rhs {
                rep.push("commutes with sigma", format!("f(sigma(e{i})) != sigma(f(e{i}))"));
            }
        }
        rep
    }

    pub fn image(&self, v: &linalg::Subspace) -> linalg::Subspace {
        let k = &self.target.base;
        let imgs: Vec<Elem> = v.rows.iter().map(|x| self.apply(x)).collect();
        linalg::Subspace::span(k, self.target.dim, &imgs)
    }

    pub fn compose(&self, g: &SigmaAlgebraMorphism) -> Result<SigmaAlgebraMorphism> {
        // self after g
        let m = linalg::mat_mul(&self.target.base, &self.matrix, &g.matrix);
        SigmaAlgebraMorphism::new(g.source.clone(), self.target.clone(), m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_algebra_valid() {
        let k = DifferenceField::prime(5, 1).unwrap();
        let a = FinSigmaAlgebra::split(&k, &[1, 0]);
        assert!(a.validate().ok());
    }

    #[test]
    fn defects_reported() {
        let k = DifferenceField::prime(5, 1).unwrap();
        let mut a = FinSigmaAlgebra::split(&k, &[1, 0]);
        a.struct_consts[0][1][0] = k.one();
        let r = a.validate();
        assert!(r.violations.iter().any(|v| v.law == "commutativity"));
        let mut b = FinSigmaAlgebra::split(&k, &[1, 0]);
        b.sigma_matrix[0][0] = k.one();
        let r = b.validate();
        assert!(r.violations.iter().any(|v| v.law == "sigma(1)=1"));
    }
}
