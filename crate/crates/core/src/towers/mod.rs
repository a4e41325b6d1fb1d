//! Difference field extensions presented as algebraic towers over a base difference field.
//!
//! A tower has finitely many explicit levels, whose sigma-images are given by expressions in
//! the explicit generators, followed by families a_i (i >= start) with sigma(a_i) = a_{i+1},
//! where a_{start} is a root of a given polynomial and a_{i+1} a root of its twist.
//! Families are materialized lazily up to a requested index.

pub mod babbitt;
pub mod compat;
pub mod core;
pub mod degree;
pub mod generate;

use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, MPoly, Scalar};
use crate::expr::{self, Target};
use crate::findiff::idempotents::{etale_part, primitive_idempotents};
use crate::findiff::{Elem, FinSigmaAlgebra};
use crate::linalg;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex};

pub use self::core::{
    core_sradicial_over_strong_core_check, inversive_closure, is_sigma_radicial, strong_core_finite_ext, CoreCertificate,
    RadicialVerdict, Verdict,
};
pub use babbitt::{babbitt_search, babbitt_verify, BabbittChain, BabbittReport};
pub use compat::{compatible, CompatVerdict};
pub use degree::{benign_make, limit_degree, BenignKind, LimitDegreeReport};

pub type TElem = Vec<Scalar>;

const X: i32 = 0;
const FAM: i32 = 1 << 20;
const OFF: i32 = 4096;

fn explicit_id(j: usize) -> i32 {
    1 + j as i32
}

fn family_id(f: usize, i: i32) -> i32 {
    FAM + (i + OFF) * 64 + f as i32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarRef {
    X,
    Explicit(usize),
    Family(usize, i32),
}

fn decode(id: i32) -> VarRef {
    if id == X {
        VarRef::X
    } else if id < FAM {
        VarRef::Explicit((id - 1) as usize)
    } else {
        let r = id - FAM;
        VarRef::Family((r % 64) as usize, r / 64 - OFF)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub name: String,
    /// Polynomial in `x` over the base and earlier generators.
    pub minpoly: String,
    /// Expression for sigma of the generator in terms of explicit generators.
    pub sigma: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    /// Minimal polynomial of the first member, in `x` over the base, explicit generators and
    /// first members of earlier families.
    pub minpoly: String,
    #[serde(default)]
    pub start: i32,
}

#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub base: DifferenceField,
    pub levels: Vec<LevelSpec>,
    pub families: Vec<FamilySpec>,
}

/// How irreducibility of a level's polynomial over everything below it is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LevelCert {
    /// finite base: the algebra up to this level is a field (one idempotent, etale)
    FiniteField,
    /// coefficients are constants: checked as a field over the constant field
    ConstantField,
    /// x^r - c v with v a base variable used by no other radical level
    Eisenstein { var: String },
    /// family member of a single radical chain rooted at a shift variable
    RadicalChain { root: String },
    /// quadratic family with independent square classes of discriminants
    SquareClass,
    Uncertified,
}

impl LevelCert {
    pub fn certified(&self) -> bool {
        *self != LevelCert::Uncertified
    }
}

#[derive(Clone, Debug)]
pub struct Gen {
    pub name: String,
    pub family: Option<(usize, i32)>,
    pub degree: usize,
    /// c_0..c_{d-1} of the monic polynomial, as elements of the tower below this level.
    pub minpoly: Vec<TElem>,
    pub cert: LevelCert,
}

/// Immutable materialization: explicit levels and family members up to some index.
#[derive(Clone, Debug)]
pub struct Tower {
    pub base: DifferenceField,
    pub gens: Vec<Gen>,
    /// prefix[j] = product of the degrees of gens[..j]
    pub prefix: Vec<usize>,
    pub explicit: usize,
    sigma_explicit: Vec<TElem>,
    pub family_names: Vec<String>,
    pub family_starts: Vec<i32>,
    pub horizon: i32,
}

impl Tower {
    fn new_base(base: &DifferenceField) -> Self {
        Tower {
            base: base.clone(),
            gens: Vec::new(),
            prefix: vec![1],
            explicit: 0,
            sigma_explicit: Vec::new(),
            family_names: Vec::new(),
            family_starts: Vec::new(),
            horizon: i32::MIN,
        }
    }

    pub fn dim(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    pub fn zero(&self) -> TElem {
        vec![self.base.zero(); self.dim()]
    }

    pub fn one(&self) -> TElem {
        self.lift(&self.base.one())
    }

    pub fn lift(&self, c: &Scalar) -> TElem {
        let mut v = self.zero();
        v[0] = c.clone();
        v
    }

    pub fn pad(&self, x: &[Scalar]) -> TElem {
        let mut v = x.to_vec();
        v.resize(self.dim(), self.base.zero());
        v
    }

    pub fn gen(&self, j: usize) -> TElem {
        let mut v = self.zero();
        v[self.prefix[j]] = self.base.one();
        v
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        if let Some(j) = self.gens[..self.explicit].iter().position(|g| g.name == name) {
            return Some(j);
        }
        let (stem, idx) = expr::split_index(name);
        let (f, i) = match self.family_names.iter().position(|n| *n == name) {
            Some(f) => (f, self.family_starts[f]),
            None => (self.family_names.iter().position(|n| *n == stem)?, idx? as i32),
        };
        self.member(f, i)
    }

    pub fn member(&self, f: usize, i: i32) -> Option<usize> {
        self.gens.iter().position(|g| g.family == Some((f, i)))
    }

    pub fn is_zero(&self, x: &[Scalar]) -> bool {
        x.iter().all(|c| self.base.is_zero(c))
    }

    pub fn add(&self, x: &[Scalar], y: &[Scalar]) -> TElem {
        x.iter().zip(y).map(|(a, b)| self.base.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[Scalar], y: &[Scalar]) -> TElem {
        x.iter().zip(y).map(|(a, b)| self.base.sub(a, b)).collect()
    }

    pub fn scale(&self, c: &Scalar, x: &[Scalar]) -> TElem {
        x.iter().map(|a| self.base.mul(c, a)).collect()
    }

    /// In the base field: only the constant coordinate is nonzero.
    pub fn in_base(&self, x: &[Scalar]) -> bool {
        x[1..].iter().all(|c| self.base.is_zero(c))
    }

    fn mul_rec(&self, x: &[Scalar], y: &[Scalar], j: usize) -> TElem {
        let k = &self.base;
        if j == 0 {
            return vec![k.mul(&x[0], &y[0])];
        }
        let b = self.prefix[j - 1];
        let d = self.gens[j - 1].degree;
        let zb = |v: &[Scalar]| v.iter().all(|c| k.is_zero(c));
        let xs: Vec<&[Scalar]> = (0..d).map(|e| &x[e * b..(e + 1) * b]).collect();
        let ys: Vec<&[Scalar]> = (0..d).map(|e| &y[e * b..(e + 1) * b]).collect();
        let xz: Vec<bool> = xs.iter().map(|v| zb(v)).collect();
        let yz: Vec<bool> = ys.iter().map(|v| zb(v)).collect();
        let mut z: Vec<Option<TElem>> = vec![None; 2 * d - 1];
        for a in 0..d {
            if xz[a] {
                continue;
            }
            for c in 0..d {
                if yz[c] {
                    continue;
                }
                let p = self.mul_rec(xs[a], ys[c], j - 1);
                z[a + c] = Some(match z[a + c].take() {
                    Some(s) => s.iter().zip(&p).map(|(u, v)| k.add(u, v)).collect(),
                    None => p,
                });
            }
        }
        let mp = &self.gens[j - 1].minpoly;
        for e in (d..2 * d - 1).rev() {
            let Some(top) = z[e].take() else { continue };
            if zb(&top) {
                continue;
            }
            for (l, c) in mp.iter().enumerate() {
                if zb(c) {
                    continue;
                }
                let p = self.mul_rec(&top, c, j - 1);
                let t = &mut z[e - d + l];
                *t = Some(match t.take() {
                    Some(s) => s.iter().zip(&p).map(|(u, v)| k.sub(u, v)).collect(),
                    None => p.iter().map(|v| k.neg(v)).collect(),
                });
            }
        }
        let mut out = Vec::with_capacity(b * d);
        for blk in z.into_iter().take(d) {
            match blk {
                Some(v) => out.extend(v),
                None => out.extend(std::iter::repeat(k.zero()).take(b)),
            }
        }
        out
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> TElem {
        self.mul_rec(&self.pad(x), &self.pad(y), self.gens.len())
    }

    pub fn pow(&self, x: &[Scalar], e: u64) -> TElem {
        let mut r = self.one();
        let mut b = self.pad(x);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }

    fn sigma_gen(&self, j: usize) -> Result<TElem> {
        let g = &self.gens[j];
        match g.family {
            None => Ok(self.pad(&self.sigma_explicit[j])),
            Some((f, i)) => self
                .member(f, i + 1)
                .map(|m| self.gen(m))
                .ok_or_else(|| Error::Domain(format!("sigma({}) needs a deeper materialization", g.name))),
        }
    }

    fn sigma_rec(&self, x: &[Scalar], j: usize, imgs: &[Vec<TElem>]) -> Result<TElem> {
        let k = &self.base;
        if j == 0 {
            return Ok(self.lift(&k.sigma(&x[0])));
        }
        let b = self.prefix[j - 1];
        let d = self.gens[j - 1].degree;
        let mut acc = self.zero();
        for e in 0..d {
            let blk = &x[e * b..(e + 1) * b];
            if blk.iter().all(|c| k.is_zero(c)) {
                continue;
            }
            let s = self.sigma_rec(blk, j - 1, imgs)?;
            let t = if e == 0 { s } else { self.mul(&s, &imgs[j - 1][e]) };
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    fn sigma_powers(&self, upto: usize) -> Result<Vec<Vec<TElem>>> {
        (0..upto)
            .map(|j| {
                let s = self.sigma_gen(j)?;
                let mut v = vec![self.one()];
                for _ in 1..self.gens[j].degree {
                    v.push(self.mul(v.last().unwrap(), &s));
                }
                Ok(v)
            })
            .collect()
    }

    /// sigma of an element; fails when an image lies beyond the materialization.
    pub fn sigma(&self, x: &[Scalar]) -> Result<TElem> {
        let x = self.pad(x);
        // only the generators in the support need images
        let top = self.support_top(&x);
        let imgs = self.sigma_powers(top)?;
        self.sigma_rec(&x[..self.prefix[top]], top, &imgs)
    }

    pub fn sigma_n(&self, x: &[Scalar], n: usize) -> Result<TElem> {
        let mut r = self.pad(x);
        for _ in 0..n {
            r = self.sigma(&r)?;
        }
        Ok(r)
    }

    /// Smallest j with x in the span of the first j generators.
    fn support_top(&self, x: &[Scalar]) -> usize {
        let last = x.iter().rposition(|c| !self.base.is_zero(c)).unwrap_or(0);
        self.prefix.iter().position(|&p| p > last).unwrap_or(self.gens.len())
    }

    pub fn monomial_name(&self, idx: usize) -> String {
        let mut parts = Vec::new();
        let mut r = idx;
        for g in &self.gens {
            let e = r % g.degree;
            r /= g.degree;
            match e {
                0 => {}
                1 => parts.push(g.name.clone()),
                _ => parts.push(format!("{}^{}", g.name, e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn format(&self, x: &[Scalar]) -> String {
        let k = &self.base;
        let terms: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !k.is_zero(c))
            .map(|(i, c)| {
                let m = self.monomial_name(i);
                if m == "1" {
                    format!("({})", k.format(c))
                } else if k.is_one(c) {
                    m
                } else {
                    format!("({})*{}", k.format(c), m)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    fn eval_mpoly(&self, p: &MPoly) -> Result<TElem> {
        let mut acc = self.zero();
        for (m, c) in &p.terms {
            let mut t = self.lift(c);
            for &(id, e) in &m.0 {
                let j = match decode(id) {
                    VarRef::X => return Err(Error::Input("unexpected x in a tower element".into())),
                    VarRef::Explicit(j) => j,
                    VarRef::Family(f, i) => self.member(f, i).ok_or_else(|| {
                        Error::Input(format!("{}_{} is not materialized at this point", self.family_names[f], i))
                    })?,
                };
                t = self.mul(&t, &self.pow(&self.gen(j), e as u64));
            }
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Parse an element from an expression over generator names and base symbols.
    pub fn parse(&self, s: &str) -> Result<TElem> {
        let names = NameTarget::of(self);
        self.eval_mpoly(&expr::eval(&names, &expr::parse(s)?)?)
    }

    /// The K-algebra spanned by the tower, as a FinSigmaAlgebra when sigma maps it into itself.
    pub fn as_algebra(&self) -> Result<FinSigmaAlgebra> {
        let k = &self.base;
        let n = self.dim();
        let basis: Vec<TElem> = (0..n).map(|i| unit_vec(k, n, i)).collect();
        let sc = basis.iter().map(|a| basis.iter().map(|b| self.mul(a, b)).collect()).collect();
        let cols: Vec<TElem> = basis.iter().map(|b| self.sigma(b)).collect::<Result<_>>()?;
        FinSigmaAlgebra::new(k, sc, self.one(), linalg::from_columns(k, &cols, n))
    }

    /// Check that the first j levels form a field over a finite base.
    fn is_field_prefix(&self, j: usize, k: &DifferenceField) -> Result<bool> {
        let n = self.prefix[j];
        let sub = Tower { gens: self.gens[..j].to_vec(), prefix: self.prefix[..=j].to_vec(), ..self.clone() };
        let basis: Vec<TElem> = (0..n).map(|i| unit_vec(k, n, i)).collect();
        let sc = basis.iter().map(|a| basis.iter().map(|b| sub.mul(a, b)).collect()).collect();
        let a = FinSigmaAlgebra::new(k, sc, sub.one(), linalg::identity(k, n))?;
        Ok(primitive_idempotents(&a)?.len() == 1 && etale_part(&a).dim() == n)
    }
}

pub(crate) fn unit_vec(k: &DifferenceField, n: usize, i: usize) -> Elem {
    let mut v = vec![k.zero(); n];
    v[i] = k.one();
    v
}

/// Symbol resolution for tower expressions: x, explicit names, family members, base symbols.
struct NameTarget<'a> {
    base: &'a DifferenceField,
    explicit: Vec<String>,
    families: Vec<String>,
    starts: Vec<i32>,
    allow_x: bool,
}

impl<'a> NameTarget<'a> {
    fn of(t: &'a Tower) -> Self {
        NameTarget {
            base: &t.base,
            explicit: t.gens[..t.explicit].iter().map(|g| g.name.clone()).collect(),
            families: t.family_names.clone(),
            starts: t.family_starts.clone(),
            allow_x: false,
        }
    }
}

impl Target for NameTarget<'_> {
    type V = MPoly;
    fn int(&self, n: &BigInt) -> Result<MPoly> {
        Ok(MPoly::constant(self.base.from_bigint(n), self.base))
    }
    fn sym(&self, name: &str) -> Result<MPoly> {
        let k = self.base;
        if name == "x" && self.allow_x {
            return Ok(MPoly::var(X, k));
        }
        if let Some(j) = self.explicit.iter().position(|n| n == name) {
            return Ok(MPoly::var(explicit_id(j), k));
        }
        if let Some(f) = self.families.iter().position(|n| n == name) {
            return Ok(MPoly::var(family_id(f, self.starts[f]), k));
        }
        if let (stem, Some(i)) = expr::split_index(name) {
            if let Some(f) = self.families.iter().position(|n| *n == stem) {
                return Ok(MPoly::var(family_id(f, i as i32), k));
            }
        }
        Ok(MPoly::constant(k.parse(name)?, k))
    }
    fn add(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.add(b, self.base))
    }
    fn sub(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.sub(b, self.base))
    }
    fn mul(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.mul(b, self.base))
    }
    fn neg(&self, a: &MPoly) -> Result<MPoly> {
        Ok(a.neg(self.base))
    }
    fn div(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        let c = b.as_constant().ok_or_else(|| Error::Input("division by a non-constant".into()))?;
        Ok(a.scale(&self.base.inv(&c)?, self.base))
    }
}

/// A tower with lazily materialized families.
pub struct TowerExtension {
    pub spec: TowerSpec,
    family_polys: Vec<MPoly>,
    family_certs: Vec<LevelCert>,
    cache: Mutex<Arc<Tower>>,
    /// Family certificates hold up to this index (None: for all indices).
    cert_horizon: Option<i32>,
    /// Set for towers built as partial inversive closures.
    pub inversive_depth: Option<u32>,
}

impl std::fmt::Debug for TowerExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TowerExtension({} levels, {} families over {})", self.spec.levels.len(), self.spec.families.len(), self.spec.base.name())
    }
}

fn split_minpoly(k: &DifferenceField, p: &MPoly, what: &str) -> Result<Vec<MPoly>> {
    let d = p.degree_in(X);
    if d == 0 {
        return Err(Error::Input(format!("{what}: polynomial has no positive degree in x")));
    }
    let lc = p
        .coeff_in(X, d)
        .as_constant()
        .ok_or_else(|| Error::Input(format!("{what}: leading coefficient must be a base constant")))?;
    let li = k.inv(&lc)?;
    Ok((0..d).map(|e| p.coeff_in(X, e).scale(&li, k)).collect())
}

fn check_no_x(p: &MPoly, what: &str) -> Result<()> {
    if p.vars().contains(&X) {
        return Err(Error::Input(format!("{what}: x may only appear in minimal polynomials")));
    }
    Ok(())
}

impl TowerExtension {
    pub fn make(spec: TowerSpec) -> Result<Self> {
        let k = spec.base.clone();
        for (i, n) in spec.levels.iter().map(|l| &l.name).chain(spec.families.iter().map(|f| &f.name)).enumerate() {
            if n.is_empty() || !n.chars().all(|c| c.is_alphabetic()) || n == "x" || n == "t" || n == "w" {
                return Err(Error::Input(format!("generator name '{n}' must be alphabetic and not x, t or w")));
            }
            let all: Vec<&String> = spec.levels.iter().map(|l| &l.name).chain(spec.families.iter().map(|f| &f.name)).collect();
            if all[..i].contains(&n) {
                return Err(Error::Input(format!("duplicate generator name '{n}'")));
            }
        }
        let mut names = NameTarget {
            base: &k,
            explicit: spec.levels.iter().map(|l| l.name.clone()).collect(),
            families: spec.families.iter().map(|f| f.name.clone()).collect(),
            starts: spec.families.iter().map(|f| f.start).collect(),
            allow_x: true,
        };
        let parse = |names: &NameTarget, s: &str, what: &str| -> Result<MPoly> {
            expr::eval(names, &expr::parse(s).map_err(|e| Error::Input(format!("{what}: {e}")))?)
                .map_err(|e| Error::Input(format!("{what}: {e}")))
        };
        let mut level_polys = Vec::new();
        let mut rules = Vec::new();
        for (j, l) in spec.levels.iter().enumerate() {
            let what = format!("levels[{j}].minpoly");
            let p = parse(&names, &l.minpoly, &what)?;
            for v in p.vars() {
                match decode(v) {
                    VarRef::X => {}
                    VarRef::Explicit(i) if i < j => {}
                    _ => return Err(Error::Input(format!("{what}: may only refer to earlier explicit levels"))),
                }
            }
            level_polys.push(split_minpoly(&k, &p, &what)?);
            names.allow_x = false;
            let what = format!("levels[{j}].sigma");
            let r = parse(&names, &l.sigma, &what)?;
            names.allow_x = true;
            check_no_x(&r, &what)?;
            if r.vars().iter().any(|&v| !matches!(decode(v), VarRef::Explicit(_))) {
                return Err(Error::Input(format!("{what}: may only refer to explicit levels")));
            }
            rules.push(r);
        }
        let mut family_polys = Vec::new();
        for (f, fs) in spec.families.iter().enumerate() {
            let what = format!("families[{f}].minpoly");
            let p = parse(&names, &fs.minpoly, &what)?;
            for v in p.vars() {
                match decode(v) {
                    VarRef::X | VarRef::Explicit(_) => {}
                    VarRef::Family(g, i) if g < f && i <= fs.start && i >= spec.families[g].start => {}
                    _ => {
                        return Err(Error::Input(format!(
                            "{what}: may only refer to earlier families at indices up to {}",
                            fs.start
                        )))
                    }
                }
            }
            family_polys.push(p);
        }
        if !spec.families.is_empty() && !k.is_shift() {
            return Err(Error::Unsupported("families need a shift base field".into()));
        }
        // explicit part
        let mut t = Tower::new_base(&k);
        t.family_names = spec.families.iter().map(|f| f.name.clone()).collect();
        t.family_starts = spec.families.iter().map(|f| f.start).collect();
        for (j, l) in spec.levels.iter().enumerate() {
            let coeffs: Vec<TElem> = level_polys[j].iter().map(|c| t.eval_mpoly(c)).collect::<Result<_>>()?;
            let degree = coeffs.len();
            t.gens.push(Gen { name: l.name.clone(), family: None, degree, minpoly: coeffs, cert: LevelCert::Uncertified });
            let d = t.dim() * degree;
            t.prefix.push(d);
        }
        t.explicit = spec.levels.len();
        t.sigma_explicit = rules.iter().map(|r| t.eval_mpoly(r)).collect::<Result<_>>()?;
        // sigma applied to the defining relations
        for j in 0..t.explicit {
            let s = t.pad(&t.sigma_explicit[j]);
            let g = &t.gens[j];
            let mut acc = t.pow(&s, g.degree as u64);
            for (e, c) in g.minpoly.iter().enumerate() {
                let sc = t.sigma(&t.pad(c))?;
                acc = t.add(&acc, &t.mul(&sc, &t.pow(&s, e as u64)));
            }
            if !t.is_zero(&acc) {
                return Err(Error::InconsistentDynamics(format!(
                    "sigma-twisted polynomial of {} does not vanish at sigma({}): residue {}",
                    g.name,
                    g.name,
                    t.format(&acc)
                )));
            }
        }
        certify_explicit(&mut t, &level_polys)?;
        let family_certs = certify_families(&spec, &family_polys, &t);
        let inv = None;
        Ok(TowerExtension { spec, family_polys, family_certs, cache: Mutex::new(Arc::new(t)), cert_horizon: None, inversive_depth: inv })
    }

    pub fn base(&self) -> &DifferenceField {
        &self.spec.base
    }

    pub fn is_finite(&self) -> bool {
        self.spec.families.is_empty()
    }

    pub fn family_cert(&self, f: usize) -> &LevelCert {
        &self.family_certs[f]
    }

    /// Certificates valid for every family member of index <= h.
    pub fn certified_through(&self, h: i32) -> bool {
        self.cert_horizon.map_or(true, |c| h <= c)
    }

    pub(crate) fn set_family_certs(&mut self, c: LevelCert, horizon: Option<i32>) {
        self.family_certs = vec![c; self.family_certs.len()];
        self.cert_horizon = horizon;
        let e = self.explicit_part();
        *self.cache.lock().unwrap() = Arc::new(e);
    }

    /// All generators certified irreducible over the levels below them.
    pub fn certified(&self) -> bool {
        self.explicit_part().gens.iter().all(|g| g.cert.certified()) && self.family_certs.iter().all(|c| c.certified())
    }

    /// Explicit levels only.
    pub fn explicit_part(&self) -> Tower {
        let t = self.cache.lock().unwrap().clone();
        let e = t.explicit;
        Tower { gens: t.gens[..e].to_vec(), prefix: t.prefix[..=e].to_vec(), horizon: i32::MIN, ..(*t).clone() }
    }

    /// Materialize every family member of index <= h.
    pub fn materialize(&self, h: i32) -> Result<Arc<Tower>> {
        let mut guard = self.cache.lock().unwrap();
        if self.spec.families.is_empty() || guard.horizon >= h {
            return Ok(guard.clone());
        }
        let mut t = (**guard).clone();
        let lo = self.spec.families.iter().map(|f| f.start).min().unwrap();
        let from = if t.horizon == i32::MIN { lo } else { t.horizon + 1 };
        for i in from..=h {
            for (f, fs) in self.spec.families.iter().enumerate() {
                if i < fs.start {
                    continue;
                }
                let coeffs: Vec<TElem> = if i == fs.start {
                    split_minpoly(&t.base, &self.family_polys[f], "family")?
                        .iter()
                        .map(|c| t.eval_mpoly(c))
                        .collect::<Result<_>>()?
                } else {
                    let prev = t.member(f, i - 1).unwrap();
                    let pc = t.gens[prev].minpoly.clone();
                    pc.iter().map(|c| t.sigma(c)).collect::<Result<_>>()?
                };
                if t.dim() * coeffs.len() > 1 << 22 {
                    return Err(Error::Unsupported("tower materialization exceeds the supported dimension".into()));
                }
                let degree = coeffs.len();
                t.gens.push(Gen {
                    name: format!("{}{}", fs.name, if i < 0 { format!("_{i}") } else { i.to_string() }),
                    family: Some((f, i)),
                    degree,
                    minpoly: coeffs,
                    cert: self.family_certs[f].clone(),
                });
                let d = t.dim() * degree;
                t.prefix.push(d);
            }
            t.horizon = i;
        }
        let t = Arc::new(t);
        *guard = t.clone();
        Ok(t)
    }

    /// Materialization without side effects on the cache, for dimension estimates.
    pub fn dim_at(&self, h: i32) -> usize {
        let e: usize = self.explicit_part().dim();
        let mut d = e;
        for (f, fs) in self.spec.families.iter().enumerate() {
            let deg = self.family_polys[f].degree_in(X) as usize;
            if h >= fs.start {
                d = d.saturating_mul(deg.saturating_pow((h - fs.start + 1) as u32));
            }
        }
        d
    }

    pub fn family_degree(&self, f: usize) -> usize {
        self.family_polys[f].degree_in(X) as usize
    }

    pub fn min_start(&self) -> i32 {
        self.spec.families.iter().map(|f| f.start).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base": crate::io::field_to_json(&self.spec.base),
            "levels": self.spec.levels,
            "families": self.spec.families,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        Self::make(spec_from_json(v)?)
    }
}

pub fn spec_from_json(v: &serde_json::Value) -> Result<TowerSpec> {
    let base = crate::io::field_from_json(v.get("base").ok_or_else(|| Error::Input("tower: missing field 'base'".into()))?)?;
    let levels: Vec<LevelSpec> = match v.get("levels") {
        Some(l) => serde_json::from_value(l.clone()).map_err(|e| Error::Input(format!("tower.levels: {e}")))?,
        None => Vec::new(),
    };
    let families: Vec<FamilySpec> = match v.get("families") {
        Some(l) => serde_json::from_value(l.clone()).map_err(|e| Error::Input(format!("tower.families: {e}")))?,
        None => Vec::new(),
    };
    Ok(TowerSpec { base, levels, families })
}

/// Irreducibility certificates for the explicit levels.
///
/// Over a finite base the prefix algebras are tested to be fields. Otherwise every level must
/// either have constant coefficients (tested as a field over the constant field) or be
/// x^r - c v with v a base variable used by no other level (Eisenstein at v).
fn certify_explicit(t: &mut Tower, level_polys: &[Vec<MPoly>]) -> Result<()> {
    let k = t.base.clone();
    if k.is_finite() {
        for j in 0..t.explicit {
            if !t.is_field_prefix(j + 1, &k)? {
                return Err(Error::Reducible(format!(
                    "minimal polynomial of {} is reducible over the levels below it",
                    t.gens[j].name
                )));
            }
            t.gens[j].cert = LevelCert::FiniteField;
        }
        return Ok(());
    }
    let k0 = k.constants();
    let as_const = |c: &Scalar| -> Option<Scalar> {
        let r = k.ratfunc(c);
        let n = if r.num.is_zero() { k0.zero() } else { r.num.as_constant()? };
        k0.div(&n, &r.den.as_constant()?).ok()
    };
    let mut certs = vec![LevelCert::Uncertified; t.explicit];
    let mut constant = vec![false; t.explicit];
    let mut used: Vec<i32> = Vec::new();
    for j in 0..t.explicit {
        let p = &level_polys[j];
        let refs_const = p.iter().flat_map(|c| c.vars()).all(|v| matches!(decode(v), VarRef::Explicit(i) if constant[i]));
        if refs_const && p.iter().all(|c| c.terms.values().all(|s| as_const(s).is_some())) {
            constant[j] = true;
            continue;
        }
        let r = p.len();
        if r < 2 || k.characteristic() % r as u64 == 0 || p[1..].iter().any(|c| !c.is_zero()) {
            continue;
        }
        let Some(c0) = p[0].as_constant() else { continue };
        let rf = k.ratfunc(&c0);
        if rf.den.as_constant().is_none() || rf.num.terms.len() != 1 {
            continue;
        }
        let (m, _) = rf.num.terms.iter().next().unwrap();
        if m.0.len() == 1 && m.0[0].1 == 1 && !used.contains(&m.0[0].0) {
            let v = m.0[0].0;
            used.push(v);
            let var = if k.is_shift() { format!("t{v}") } else { "t".to_string() };
            certs[j] = LevelCert::Eisenstein { var };
        }
    }
    let idx: Vec<usize> = (0..t.explicit).filter(|&j| constant[j]).collect();
    let constants_certified = if idx.is_empty() {
        true
    } else if !k0.is_finite() {
        false
    } else {
        let mut ct = Tower::new_base(&k0);
        for &j in &idx {
            let pos = |i: usize| idx.iter().position(|&x| x == i).unwrap();
            let mut cs = Vec::new();
            for c in &level_polys[j] {
                let mut acc = ct.zero();
                for (m, s) in &c.terms {
                    let mut term = ct.lift(&as_const(s).unwrap());
                    for &(id, e) in &m.0 {
                        let VarRef::Explicit(i) = decode(id) else { unreachable!() };
                        term = ct.mul(&term, &ct.pow(&ct.gen(pos(i)), e as u64));
                    }
                    acc = ct.add(&acc, &term);
                }
                cs.push(acc);
            }
            let degree = cs.len();
            ct.gens.push(Gen { name: t.gens[j].name.clone(), family: None, degree, minpoly: cs, cert: LevelCert::Uncertified });
            let d = ct.dim() * degree;
            ct.prefix.push(d);
            if !ct.is_field_prefix(ct.gens.len(), &k0)? {
                return Err(Error::Reducible(format!(
                    "minimal polynomial of {} is reducible over the constant levels below it",
                    t.gens[j].name
                )));
            }
        }
        true
    };
    let all = constants_certified && (0..t.explicit).all(|j| constant[j] || certs[j].certified());
    for j in 0..t.explicit {
        t.gens[j].cert = if !all {
            LevelCert::Uncertified
        } else if constant[j] {
            LevelCert::ConstantField
        } else {
            certs[j].clone()
        };
    }
    Ok(())
}

/// Families forming one radical chain x^{r} - c t_j, x^{r'} - c' a, ... over constant explicit levels.
fn certify_families(spec: &TowerSpec, polys: &[MPoly], t: &Tower) -> Vec<LevelCert> {
    let k = &spec.base;
    let n = polys.len();
    let mut out = vec![LevelCert::Uncertified; n];
    if n == 0 {
        return out;
    }
    let explicit_constant = t.gens[..t.explicit].iter().all(|g| g.cert == LevelCert::ConstantField);
    if !explicit_constant {
        return out;
    }
    let starts: Vec<i32> = spec.families.iter().map(|f| f.start).collect();
    if starts.iter().any(|&s| s != starts[0]) {
        return out;
    }
    let mut root: Option<i32> = None;
    let mut prev: Option<usize> = None;
    for (f, p) in polys.iter().enumerate() {
        let d = p.degree_in(X);
        if d < 2 || k.characteristic() % d as u64 == 0 {
            return out;
        }
        // p = lc x^d + c0 with c0 = -c u
        if (1..d).any(|e| !p.coeff_in(X, e).is_zero()) {
            return out;
        }
        let c0 = p.coeff_in(X, 0);
        if c0.terms.len() != 1 {
            return out;
        }
        let (m, c) = c0.terms.iter().next().unwrap();
        let rf = k.ratfunc(c);
        let scalar_ok = rf.den.as_constant().is_some();
        if m.0.is_empty() {
            // c0 is a base element: must be a constant times one shift variable, and only for the first family
            if prev.is_some() || !scalar_ok || rf.num.terms.len() != 1 {
                return out;
            }
            let (mm, _) = rf.num.terms.iter().next().unwrap();
            if mm.0.len() != 1 || mm.0[0].1 != 1 {
                return out;
            }
            root = Some(mm.0[0].0);
        } else {
            // c0 = const * (previous family member at start)
            if m.0.len() != 1 || m.0[0].1 != 1 || rf.num.as_constant().is_none() || !scalar_ok {
                return out;
            }
            match decode(m.0[0].0) {
                VarRef::Family(g, i) if Some(g) == prev && i == starts[0] => {}
                _ => return out,
            }
        }
        prev = Some(f);
    }
    let Some(v) = root else { return out };
    for c in out.iter_mut() {
        *c = LevelCert::RadicalChain { root: format!("t{v}") };
    }
    out
}
