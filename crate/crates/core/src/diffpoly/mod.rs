//! Finitely presented difference algebras k{y_1..y_m}/[gens] as directed systems of
//! finite-dimensional truncations.
//!
//! Supported class: every variable carries a quadratic rule y^2 = alpha y + beta at order 0,
//! and optionally one linear rule sigma^s(y) = P with P a polynomial in variables of order
//! below s that are themselves eventually determined. Normal forms are squarefree monomials
//! in the free variables.

use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, MPoly, Scalar};
use crate::expr::{self, Target};
use crate::findiff::predicates::{is_periodic, Periodicity};
use crate::findiff::{strong_core, Elem, FinSigmaAlgebra};
use crate::linalg::{self, Mat, Subspace};
use num_bigint::BigInt;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

const STRIDE: i32 = 64;

fn var_id(j: usize, i: u32) -> i32 {
    i as i32 * STRIDE + j as i32
}

fn decode(id: i32) -> (usize, u32) {
    ((id % STRIDE) as usize, (id / STRIDE) as u32)
}

/// Difference polynomial: variable y_{j,i} = sigma^i(y_j) is encoded as i * 64 + j.
#[derive(Clone, Debug, PartialEq)]
pub struct DPoly(pub MPoly);

impl DPoly {
    /// sigma^i(y_j).
    pub fn var(j: usize, i: u32, k: &DifferenceField) -> DPoly {
        DPoly(MPoly::var(var_id(j, i), k))
    }

    pub fn constant(c: Scalar, k: &DifferenceField) -> DPoly {
        DPoly(MPoly::constant(c, k))
    }

    /// Highest order sigma^i occurring.
    pub fn max_order(&self) -> u32 {
        self.0.vars().iter().map(|&v| decode(v).1).max().unwrap_or(0)
    }

    /// Rename y_j to y_{j + off}, for tensor powers of a presentation.
    pub fn offset_vars(&self, off: usize) -> DPoly {
        DPoly(self.0.map_vars(|v| v + off as i32))
    }

    /// Substitute images for the variables: y_{j,i} -> sigma^i(imgs[j]).
    pub fn substitute(&self, imgs: &[DPoly], k: &DifferenceField) -> DPoly {
        let mut acc = MPoly::zero();
        for (m, c) in &self.0.terms {
            let mut t = MPoly::constant(c.clone(), k);
            for &(v, e) in &m.0 {
                let (j, i) = decode(v);
                let x = imgs[j].sigma(k, i).0;
                t = t.mul(&x.pow(e, k), k);
            }
            acc = acc.add(&t, k);
        }
        DPoly(acc)
    }

    /// Substitute base elements: y_{j,i} -> sigma^i(vals[j]).
    pub fn evaluate(&self, vals: &[Scalar], k: &DifferenceField) -> Scalar {
        let mut acc = k.zero();
        for (m, c) in &self.0.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let (j, i) = decode(v);
                t = k.mul(&t, &k.pow(&k.sigma_n(&vals[j], i), e as u64));
            }
            acc = k.add(&acc, &t);
        }
        acc
    }

    /// sigma^k: shift orders and twist coefficients.
    pub fn sigma(&self, k: &DifferenceField, n: u32) -> DPoly {
        DPoly(self.0.map_vars(|v| v + n as i32 * STRIDE).map_coeffs(|c| k.sigma_n(c, n), k))
    }
}

#[derive(Clone, Debug)]
pub struct SigmaPolyRing {
    pub base: DifferenceField,
    pub vars: Vec<String>,
}

impl SigmaPolyRing {
    pub fn new(base: &DifferenceField, vars: &[&str]) -> Result<Self> {
        if vars.len() >= STRIDE as usize {
            return Err(Error::Input("too many difference variables".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() || !v.chars().all(|c| c.is_alphabetic()) {
                return Err(Error::Input(format!("variable name '{v}' must be alphabetic")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Input(format!("duplicate variable '{v}'")));
            }
        }
        Ok(SigmaPolyRing { base: base.clone(), vars: vars.iter().map(|s| s.to_string()).collect() })
    }

    /// Parse `y0^2-1`, `y_1 - 1`, `sigma(y) - 1`, `sigma^2(z) + z`.
    pub fn parse(&self, s: &str) -> Result<DPoly> {
        Ok(DPoly(expr::eval(self, &expr::parse(s)?)?))
    }

    pub fn format(&self, p: &DPoly) -> String {
        if p.0.is_zero() {
            return "0".into();
        }
        let k = &self.base;
        let mut parts = Vec::new();
        for (m, c) in p.0.terms.iter().rev() {
            let mut f: Vec<String> = m
                .0
                .iter()
                .map(|&(v, e)| {
                    let (j, i) = decode(v);
                    if e == 1 {
                        format!("{}{}", self.vars[j], i)
                    } else {
                        format!("{}{}^{}", self.vars[j], i, e)
                    }
                })
                .collect();
            if !k.is_one(c) || f.is_empty() {
                f.insert(0, format!("({})", k.format(c)));
            }
            parts.push(f.join("*"));
        }
        parts.join(" + ")
    }
}

impl Target for SigmaPolyRing {
    type V = MPoly;
    fn int(&self, n: &BigInt) -> Result<MPoly> {
        Ok(MPoly::constant(self.base.from_bigint(n), &self.base))
    }
    fn sym(&self, name: &str) -> Result<MPoly> {
        let k = &self.base;
        if let Some(j) = self.vars.iter().position(|v| v == name) {
            return Ok(MPoly::var(var_id(j, 0), k));
        }
        if let (stem, Some(i)) = expr::split_index(name) {
            if let Some(j) = self.vars.iter().position(|v| *v == stem) {
                if i < 0 {
                    return Err(Error::Input(format!("negative order in '{name}'")));
                }
                return Ok(MPoly::var(var_id(j, i as u32), k));
            }
        }
        Ok(MPoly::constant(k.parse(name)?, k))
    }
    fn add(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.add(b, &self.base))
    }
    fn sub(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.sub(b, &self.base))
    }
    fn mul(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        Ok(a.mul(b, &self.base))
    }
    fn neg(&self, a: &MPoly) -> Result<MPoly> {
        Ok(a.neg(&self.base))
    }
    fn div(&self, a: &MPoly, b: &MPoly) -> Result<MPoly> {
        let c = b.as_constant().ok_or_else(|| Error::Input("division by a non-constant".into()))?;
        Ok(a.scale(&self.base.inv(&c)?, &self.base))
    }
    fn sigma(&self, n: u32, a: &MPoly) -> Result<MPoly> {
        Ok(DPoly(a.clone()).sigma(&self.base, n).0)
    }
}

#[derive(Clone, Debug)]
pub struct SigmaIdealPresentation {
    pub ring: SigmaPolyRing,
    pub generators: Vec<DPoly>,
}

impl SigmaIdealPresentation {
    pub fn parse(base: &DifferenceField, vars: &[&str], gens: &[&str]) -> Result<Self> {
        let ring = SigmaPolyRing::new(base, vars)?;
        let generators = gens.iter().map(|g| ring.parse(g)).collect::<Result<Vec<_>>>()?;
        Ok(SigmaIdealPresentation { ring, generators })
    }

    /// `{"vars": ["y"], "gens": [{"poly": "y0^2-1"}, {"poly": "y1-1"}]}`
    pub fn from_json(base: &DifferenceField, v: &serde_json::Value) -> Result<Self> {
        let vars = v
            .get("vars")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Input("presentation: missing array field 'vars'".into()))?;
        let vars: Vec<&str> = vars
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_str().ok_or_else(|| Error::Input(format!("presentation: vars[{i}] is not a string"))))
            .collect::<Result<_>>()?;
        let gens = v
            .get("gens")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Input("presentation: missing array field 'gens'".into()))?;
        let gens: Vec<&str> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                g.get("poly")
                    .and_then(|x| x.as_str())
                    .or_else(|| g.as_str())
                    .ok_or_else(|| Error::Input(format!("presentation: gens[{i}].poly is not a string")))
            })
            .collect::<Result<_>>()?;
        Self::parse(base, &vars, &gens)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vars": self.ring.vars,
            "gens": self.generators.iter().map(|g| serde_json::json!({"poly": self.ring.format(g)})).collect::<Vec<_>>(),
        })
    }

    /// Materialized transforms sigma^i(g) for i <= n.
    pub fn closure(&self, n: u32) -> Vec<DPoly> {
        let k = &self.ring.base;
        (0..=n).flat_map(|i| self.generators.iter().map(move |g| g.sigma(k, i))).collect()
    }
}

/// Per-variable rewriting data.
#[derive(Clone, Debug)]
struct Rules {
    /// y_j^2 = alpha y_j + beta
    quad: Vec<Option<(Scalar, Scalar)>>,
    /// sigma^s(y_j) = P
    lin: Vec<Option<(u32, DPoly)>>,
}

/// Sparse element in normal form: squarefree monomial masks over the global free-variable order.
type SElem = BTreeMap<u64, Scalar>;

/// One truncation level: the algebra on squarefree monomials in the free variables of order <= n.
#[derive(Clone, Debug)]
pub struct Level {
    pub n: u32,
    pub base: DifferenceField,
    /// Free variables (j, i) in global order.
    pub vars: Vec<(usize, u32)>,
    quad: Vec<(Scalar, Scalar)>,
}

impl Level {
    pub fn dim(&self) -> usize {
        1 << self.vars.len()
    }

    fn mono_mul(&self, a: u64, b: u64) -> Vec<(u64, Scalar)> {
        let k = &self.base;
        let common = a & b;
        let rest = a ^ b;
        let mut out = vec![(rest, k.one())];
        let mut bits = common;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (al, be) = &self.quad[v];
            let mut next = Vec::with_capacity(out.len() * 2);
            for (m, c) in out {
                if !k.is_zero(al) {
                    next.push((m | (1 << v), k.mul(&c, al)));
                }
                if !k.is_zero(be) {
                    next.push((m, k.mul(&c, be)));
                }
            }
            out = next;
        }
        out
    }

    fn smul(&self, x: &SElem, y: &SElem) -> SElem {
        let k = &self.base;
        let mut r = SElem::new();
        for (&ma, ca) in x {
            for (&mb, cb) in y {
                let c = k.mul(ca, cb);
                for (m, d) in self.mono_mul(ma, mb) {
                    let e = r.entry(m).or_insert_with(|| k.zero());
                    *e = k.add(e, &k.mul(&c, &d));
                }
            }
        }
        r.retain(|_, c| !k.is_zero(c));
        r
    }

    pub fn to_dense(&self, x: &SElem) -> Elem {
        let mut v = vec![self.base.zero(); self.dim()];
        for (&m, c) in x {
            v[m as usize] = c.clone();
        }
        v
    }

    pub fn to_sparse(&self, x: &[Scalar]) -> SElem {
        x.iter().enumerate().filter(|(_, c)| !self.base.is_zero(c)).map(|(m, c)| (m as u64, c.clone())).collect()
    }

    pub fn one(&self) -> Elem {
        let mut v = vec![self.base.zero(); self.dim()];
        v[0] = self.base.one();
        v
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        self.to_dense(&self.smul(&self.to_sparse(x), &self.to_sparse(y)))
    }

    /// Structure tensor and unit on the monomial basis.
    pub fn struct_consts(&self) -> Vec<Vec<Vec<Scalar>>> {
        let d = self.dim();
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let mut v = vec![self.base.zero(); d];
                        for (m, c) in self.mono_mul(a as u64, b as u64) {
                            v[m as usize] = self.base.add(&v[m as usize], &c);
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    pub fn monomial_name(&self, ring: &SigmaPolyRing, m: usize) -> String {
        if m == 0 {
            return "1".into();
        }
        let parts: Vec<String> = (0..self.vars.len())
            .filter(|&v| m >> v & 1 == 1)
            .map(|v| format!("{}{}", ring.vars[self.vars[v].0], self.vars[v].1))
            .collect();
        parts.join("*")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Periodic(usize),
    /// depends on the free shift variable y_{j,i}; every monomial of sigma^d(x) has order >= i + d
    SupportShift { var: String, min_index: u32 },
    HitsZero(usize),
    CycleWithout { start: usize, length: usize },
    Unknown(usize),
}

impl Classification {
    pub fn is_periodic(&self) -> Option<bool> {
        match self {
            Classification::Periodic(_) => Some(true),
            Classification::Unknown(_) => None,
            _ => Some(false),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedCore {
    pub level: u32,
    /// Subspace of A_n.
    pub subspace: Subspace,
    pub exact: bool,
}

impl TruncatedCore {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// The directed system A_0 -> A_1 -> ... with sigma: A_n -> A_{n+1}.
pub struct TruncatedQuotient {
    pub presentation: SigmaIdealPresentation,
    rules: Rules,
    nf_cache: Mutex<HashMap<(usize, u32), SElem>>,
    order: Mutex<(Vec<(usize, u32)>, i64)>,
    stable: Mutex<Option<Arc<(FinSigmaAlgebra, Vec<(usize, u32)>)>>>,
}

impl TruncatedQuotient {
    pub fn new(presentation: SigmaIdealPresentation) -> Result<Self> {
        let rules = analyse(&presentation)?;
        let tq = TruncatedQuotient {
            presentation,
            rules,
            nf_cache: Mutex::new(HashMap::new()),
            order: Mutex::new((Vec::new(), -1)),
            stable: Mutex::new(None),
        };
        tq.check_consistency()?;
        Ok(tq)
    }

    pub fn base(&self) -> &DifferenceField {
        &self.presentation.ring.base
    }

    pub fn ring(&self) -> &SigmaPolyRing {
        &self.presentation.ring
    }

    fn nvars(&self) -> usize {
        self.rules.quad.len()
    }

    fn is_free(&self, j: usize, i: u32) -> bool {
        match &self.rules.lin[j] {
            Some((s, _)) => i < *s,
            None => true,
        }
    }

    /// True when every variable is eventually determined, so the levels stabilize.
    pub fn stabilizes(&self) -> bool {
        self.rules.lin.iter().all(|l| l.is_some())
    }

    /// First level from which the stable part no longer grows.
    pub fn stable_level(&self) -> u32 {
        self.rules.lin.iter().filter_map(|l| l.as_ref().map(|(s, _)| *s)).max().unwrap_or(0).saturating_sub(1)
    }

    fn free_vars(&self, n: u32) -> Vec<(usize, u32)> {
        let mut guard = self.order.lock().unwrap();
        let (order, built) = &mut *guard;
        while *built < n as i64 {
            *built += 1;
            let i = *built as u32;
            for j in 0..self.nvars() {
                if self.is_free(j, i) {
                    order.push((j, i));
                }
            }
        }
        order.iter().copied().filter(|&(_, i)| i <= n).collect()
    }

    pub fn level(&self, n: u32) -> Level {
        let vars = self.free_vars(n);
        let k = self.base();
        let quad = vars
            .iter()
            .map(|&(j, i)| {
                let (a, b) = self.rules.quad[j].clone().expect("free variables carry a quadratic rule");
                (k.sigma_n(&a, i), k.sigma_n(&b, i))
            })
            .collect();
        Level { n, base: k.clone(), vars, quad }
    }

    fn index_of(&self, lv: &Level, j: usize, i: u32) -> Option<usize> {
        lv.vars.iter().position(|&v| v == (j, i))
    }

    /// Normal form of y_{j,i}, as a sparse element of any level containing its support.
    fn nf_var(&self, j: usize, i: u32) -> Result<SElem> {
        if let Some(v) = self.nf_cache.lock().unwrap().get(&(j, i)) {
            return Ok(v.clone());
        }
        let k = self.base().clone();
        let r = if self.is_free(j, i) {
            let lv = self.level(i);
            let idx = self.index_of(&lv, j, i).unwrap();
            SElem::from([(1u64 << idx, k.one())])
        } else {
            let (s, p) = self.rules.lin[j].clone().unwrap();
            let q = p.sigma(&k, i - s);
            let lv = self.level(i);
            self.eval_sparse(&lv, &q)?
        };
        self.nf_cache.lock().unwrap().insert((j, i), r.clone());
        Ok(r)
    }

    fn eval_sparse(&self, lv: &Level, p: &DPoly) -> Result<SElem> {
        let k = &lv.base;
        let mut acc = SElem::new();
        for (m, c) in &p.0.terms {
            let mut t = SElem::from([(0u64, c.clone())]);
            for &(v, e) in &m.0 {
                let (j, i) = decode(v);
                if i > lv.n {
                    return Err(Error::Domain(format!("variable of order {i} beyond level {}", lv.n)));
                }
                let x = self.nf_var(j, i)?;
                for _ in 0..e {
                    t = lv.smul(&t, &x);
                }
            }
            for (mm, cc) in t {
                let e = acc.entry(mm).or_insert_with(|| k.zero());
                *e = k.add(e, &cc);
            }
        }
        acc.retain(|_, c| !k.is_zero(c));
        Ok(acc)
    }

    /// Normal form of a difference polynomial at level n.
    pub fn reduce(&self, n: u32, p: &DPoly) -> Result<Elem> {
        let lv = self.level(n);
        Ok(lv.to_dense(&self.eval_sparse(&lv, p)?))
    }

    /// An element of level n as a difference polynomial in the free variables.
    pub fn elem_poly(&self, n: u32, x: &[Scalar]) -> DPoly {
        let lv = self.level(n);
        let k = self.base();
        let mut acc = MPoly::zero();
        for (m, c) in x.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut t = MPoly::constant(c.clone(), k);
            for (b, &(j, i)) in lv.vars.iter().enumerate() {
                if m >> b & 1 == 1 {
                    t = t.mul(&MPoly::var(var_id(j, i), k), k);
                }
            }
            acc = acc.add(&t, k);
        }
        DPoly(acc)
    }

    /// The presentation of the r-fold tensor power, with variables prefixed by `names[c]`.
    pub fn tensor_power(&self, names: &[&str]) -> Result<TruncatedQuotient> {
        let p = &self.presentation;
        let m = p.ring.vars.len();
        let vars: Vec<String> = names.iter().flat_map(|c| p.ring.vars.iter().map(move |v| format!("{c}{v}"))).collect();
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let ring = SigmaPolyRing::new(self.base(), &refs)?;
        let generators = (0..names.len()).flat_map(|c| p.generators.iter().map(move |g| g.offset_vars(c * m))).collect();
        TruncatedQuotient::new(SigmaIdealPresentation { ring, generators })
    }

    pub fn parse_elem(&self, n: u32, s: &str) -> Result<Elem> {
        self.reduce(n, &self.ring().parse(s)?)
    }

    fn check_consistency(&self) -> Result<()> {
        let k = self.base().clone();
        for j in 0..self.nvars() {
            let (Some((s, _)), Some((a, b))) = (&self.rules.lin[j], &self.rules.quad[j]) else { continue };
            for i in *s..*s + 2 {
                let lv = self.level(i);
                let x = self.nf_var(j, i)?;
                let lhs = lv.smul(&x, &x);
                let mut rhs: SElem = x.iter().map(|(m, c)| (*m, k.mul(c, &k.sigma_n(a, i)))).collect();
                let bb = k.sigma_n(b, i);
                let e = rhs.entry(0).or_insert_with(|| k.zero());
                *e = k.add(e, &bb);
                rhs.retain(|_, c| !k.is_zero(c));
                if lhs != rhs {
                    let mut d = lhs.clone();
                    for (m, c) in &rhs {
                        let e = d.entry(*m).or_insert_with(|| k.zero());
                        *e = k.sub(e, c);
                    }
                    d.retain(|_, c| !k.is_zero(c));
                    if d.keys().all(|&m| m == 0) {
                        // a nonzero constant lies in the ideal
                        return Err(Error::ZeroRing);
                    }
                    return Err(Error::Unsupported(format!(
                        "rules for '{}' are inconsistent at order {i}: the presentation collapses outside the supported class",
                        self.ring().vars[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// sigma: A_n -> A_{n+1}, semilinear: sigma(x) = M sigma_base(x).
    pub fn sigma_matrix(&self, n: u32) -> Result<Mat> {
        let lv = self.level(n);
        let nx = self.level(n + 1);
        let mut cols = Vec::with_capacity(lv.dim());
        for m in 0..lv.dim() {
            let mut t = SElem::from([(0u64, lv.base.one())]);
            for v in 0..lv.vars.len() {
                if m >> v & 1 == 1 {
                    let (j, i) = lv.vars[v];
                    t = nx.smul(&t, &self.nf_var(j, i + 1)?);
                }
            }
            cols.push(nx.to_dense(&t));
        }
        Ok(linalg::from_columns(&lv.base, &cols, nx.dim()))
    }

    pub fn sigma_elem(&self, n: u32, x: &[Scalar]) -> Result<Elem> {
        let k = self.base();
        let sx: Elem = x.iter().map(|c| k.sigma(c)).collect();
        Ok(linalg::mat_vec(k, &self.sigma_matrix(n)?, &sx))
    }

    /// A_n -> A_m for m >= n: monomials keep their masks.
    pub fn embed(&self, n: u32, m: u32, x: &[Scalar]) -> Elem {
        let mut v = x.to_vec();
        v.resize(self.level(m).dim(), self.base().zero());
        let _ = n;
        v
    }

    pub fn transition(&self, n: u32) -> Mat {
        let d = self.level(n).dim();
        let cols: Vec<Elem> = (0..d)
            .map(|i| {
                let mut e = vec![self.base().zero(); d];
                e[i] = self.base().one();
                self.embed(n, n + 1, &e)
            })
            .collect();
        linalg::from_columns(self.base(), &cols, self.level(n + 1).dim())
    }

    /// The sigma-stable subalgebra B generated by the eventually determined variables, with
    /// the free variables of B in order.
    pub fn stable_part(&self) -> Result<Arc<(FinSigmaAlgebra, Vec<(usize, u32)>)>> {
        if let Some(b) = self.stable.lock().unwrap().as_ref() {
            return Ok(b.clone());
        }
        let k = self.base().clone();
        let n = self.stable_level();
        let full = self.level(n + 1);
        let bvars: Vec<(usize, u32)> = full.vars.iter().copied().filter(|&(j, _)| self.rules.lin[j].is_some()).collect();
        let pos: Vec<usize> = bvars.iter().map(|&(j, i)| self.index_of(&full, j, i).unwrap()).collect();
        let d = 1usize << bvars.len();
        let to_full = |bm: usize| -> u64 {
            pos.iter().enumerate().filter(|(b, _)| bm >> b & 1 == 1).fold(0u64, |acc, (_, &p)| acc | 1 << p)
        };
        let from_full = |fm: u64| -> Option<usize> {
            let mut r = 0usize;
            let mut rest = fm;
            for (b, &p) in pos.iter().enumerate() {
                if fm >> p & 1 == 1 {
                    r |= 1 << b;
                    rest &= !(1u64 << p);
                }
            }
            (rest == 0).then_some(r)
        };
        let mut sc = vec![vec![vec![]; d]; d];
        for a in 0..d {
            for b in 0..d {
                let mut v = vec![k.zero(); d];
                for (m, c) in full.mono_mul(to_full(a), to_full(b)) {
                    let idx = from_full(m).ok_or_else(|| Error::Invariant("stable part not closed".into()))?;
                    v[idx] = k.add(&v[idx], &c);
                }
                sc[a][b] = v;
            }
        }
        let big = self.level(n + 2);
        let mut cols = Vec::with_capacity(d);
        for bm in 0..d {
            let mut t = SElem::from([(0u64, k.one())]);
            for (b, &(j, i)) in bvars.iter().enumerate() {
                if bm >> b & 1 == 1 {
                    t = big.smul(&t, &self.nf_var(j, i + 1)?);
                }
            }
            let mut col = vec![k.zero(); d];
            for (m, c) in t {
                let idx = from_full(m).ok_or_else(|| Error::Invariant("stable part not sigma-stable".into()))?;
                col[idx] = c;
            }
            cols.push(col);
        }
        let mut unit = vec![k.zero(); d];
        unit[0] = k.one();
        let alg = FinSigmaAlgebra::new(&k, sc, unit, linalg::from_columns(&k, &cols, d))?;
        let out = Arc::new((alg, bvars));
        *self.stable.lock().unwrap() = Some(out.clone());
        Ok(out)
    }

    /// B -> A_n on coordinates (only monomials of B-variables of order <= n).
    fn stable_to_level(&self, lv: &Level, bvars: &[(usize, u32)], x: &[Scalar]) -> Option<Elem> {
        let k = &lv.base;
        let mut v = vec![k.zero(); lv.dim()];
        for (bm, c) in x.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut fm = 0usize;
            for (b, &(j, i)) in bvars.iter().enumerate() {
                if bm >> b & 1 == 1 {
                    fm |= 1 << self.index_of(lv, j, i)?;
                }
            }
            v[fm] = c.clone();
        }
        Some(v)
    }

    /// A_n element as a B element, when it involves no shift variables.
    fn level_to_stable(&self, lv: &Level, bvars: &[(usize, u32)], x: &[Scalar]) -> std::result::Result<Elem, (usize, u32)> {
        let k = &lv.base;
        let mut v = vec![k.zero(); 1 << bvars.len()];
        for (fm, c) in x.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut bm = 0usize;
            for (p, &(j, i)) in lv.vars.iter().enumerate() {
                if fm >> p & 1 == 1 {
                    match bvars.iter().position(|&w| w == (j, i)) {
                        Some(b) => bm |= 1 << b,
                        None => return Err((j, i)),
                    }
                }
            }
            v[bm] = c.clone();
        }
        Ok(v)
    }

    pub fn classify(&self, n: u32, x: &[Scalar], horizon: usize) -> Result<Classification> {
        let lv = self.level(n);
        let st = self.stable_part()?;
        let (b, bvars) = (&st.0, &st.1);
        match self.level_to_stable(&lv, bvars, x) {
            Err(_) => {
                // minimal order among shift variables in the support
                let k = &lv.base;
                let mut best: Option<(usize, u32)> = None;
                for (fm, c) in x.iter().enumerate() {
                    if k.is_zero(c) {
                        continue;
                    }
                    for (p, &(j, i)) in lv.vars.iter().enumerate() {
                        if fm >> p & 1 == 1 && self.rules.lin[j].is_none() && best.map_or(true, |(_, bi)| i < bi) {
                            best = Some((j, i));
                        }
                    }
                }
                let (j, i) = best.unwrap();
                Ok(Classification::SupportShift { var: format!("{}{}", self.ring().vars[j], i), min_index: i })
            }
            Ok(y) => Ok(match is_periodic(b, &y, horizon) {
                Periodicity::Periodic(d) => Classification::Periodic(d),
                Periodicity::HitsZero(d) => Classification::HitsZero(d),
                Periodicity::CycleWithout { start, length } => Classification::CycleWithout { start, length },
                Periodicity::Unknown(h) => Classification::Unknown(h),
            }),
        }
    }

    /// Primitive idempotents of A_n (finite base) together with 0 and 1, each classified.
    pub fn periodic_idempotents_truncated(&self, n: u32, horizon: usize) -> Result<Vec<(Elem, Classification)>> {
        let lv = self.level(n);
        let k = &lv.base;
        let alg = FinSigmaAlgebra::new(k, lv.struct_consts(), lv.one(), linalg::identity(k, lv.dim()))?;
        let mut out = vec![
            (vec![k.zero(); lv.dim()], Classification::Periodic(1)),
            (lv.one(), Classification::Periodic(1)),
        ];
        if lv.dim() > 1 {
            for e in crate::findiff::primitive_idempotents(&alg)? {
                let c = self.classify(n, &e.coords, horizon)?;
                out.push((e.coords, c));
            }
        }
        Ok(out)
    }

    /// Strong core of the directed system, intersected with A_n.
    ///
    /// Periodic elements involve no shift variable, so the core lives in the stable part B and
    /// equals the strong core of the finite-dimensional B.
    pub fn strong_core_truncated(&self, n: u32) -> Result<TruncatedCore> {
        let lv = self.level(n);
        let k = lv.base.clone();
        let st = self.stable_part()?;
        let (b, bvars) = (&st.0, &st.1);
        let core = strong_core(b)?;
        let inb = Subspace::span(
            &k,
            b.dim,
            &(0..b.dim)
                .filter(|&bm| (0..bvars.len()).all(|t| bm >> t & 1 == 0 || bvars[t].1 <= n))
                .map(|bm| b.basis(bm))
                .collect::<Vec<_>>(),
        );
        let meet = core.subspace.intersect(&k, &inb);
        let vs: Vec<Elem> = meet.rows.iter().map(|x| self.stable_to_level(&lv, bvars, x).unwrap()).collect();
        Ok(TruncatedCore { level: n, subspace: Subspace::span(&k, lv.dim(), &vs), exact: core.complete })
    }
}

fn analyse(p: &SigmaIdealPresentation) -> Result<Rules> {
    let k = &p.ring.base;
    let m = p.ring.vars.len();
    let mut quad: Vec<Option<(Scalar, Scalar)>> = vec![None; m];
    let mut lin: Vec<Option<(u32, DPoly)>> = vec![None; m];
    let unsupported = |g: &DPoly, why: &str| Error::Unsupported(format!("generator {}: {why}", p.ring.format(g)));
    for g in &p.generators {
        let vars = g.0.vars();
        if vars.is_empty() {
            if g.0.is_zero() {
                continue;
            }
            return Err(Error::ZeroRing);
        }
        let top = *vars.iter().max().unwrap();
        let (j, s) = decode(top);
        let deg = g.0.degree_in(top);
        if vars.len() == 1 && s == 0 && deg == 2 {
            let c2 = g.0.coeff_in(top, 2).as_constant().unwrap();
            let c1 = g.0.coeff_in(top, 1).as_constant().unwrap_or_else(|| k.zero());
            let c0 = g.0.coeff_in(top, 0).as_constant().unwrap_or_else(|| k.zero());
            let inv = k.inv(&c2)?;
            if quad[j].is_some() {
                return Err(unsupported(g, "second quadratic rule for the same variable"));
            }
            quad[j] = Some((k.neg(&k.mul(&c1, &inv)), k.neg(&k.mul(&c0, &inv))));
            continue;
        }
        if deg != 1 {
            return Err(unsupported(g, "neither quadratic at order 0 nor linear in its leading variable"));
        }
        let c = g.0.coeff_in(top, 1).as_constant().ok_or_else(|| unsupported(g, "leading coefficient is not constant"))?;
        let rest = g.0.coeff_in(top, 0);
        if rest.vars().iter().any(|&v| decode(v).1 >= s) {
            return Err(unsupported(g, "linear rule refers to variables of the same or higher order"));
        }
        let pp = rest.scale(&k.neg(&k.inv(&c)?), k);
        if lin[j].is_some() {
            return Err(unsupported(g, "second linear rule for the same variable"));
        }
        lin[j] = Some((s, DPoly(pp)));
    }
    for j in 0..m {
        let needs_quad = lin[j].as_ref().map_or(true, |(s, _)| *s > 0);
        if needs_quad && quad[j].is_none() {
            return Err(Error::Unsupported(format!(
                "variable '{}' has no quadratic rule, so the truncations are not finite-dimensional",
                p.ring.vars[j]
            )));
        }
    }
    for j in 0..m {
        if let Some((_, pp)) = &lin[j] {
            if pp.0.vars().iter().any(|&v| lin[decode(v).0].is_none()) {
                return Err(Error::Unsupported(format!(
                    "linear rule for '{}' involves a variable that is never determined",
                    p.ring.vars[j]
                )));
            }
        }
    }
    Ok(Rules { quad, lin })
}

/// Convenience constructors for the running example.
pub mod examples {
    use super::*;

    /// R_1 = k{y}/[y^2 - 1, sigma(y) - 1].
    pub fn r1(k: &DifferenceField) -> Result<TruncatedQuotient> {
        TruncatedQuotient::new(SigmaIdealPresentation::parse(k, &["y"], &["y0^2-1", "y1-1"])?)
    }

    /// R_2 = k{z}/[z^2 - 1].
    pub fn r2(k: &DifferenceField) -> Result<TruncatedQuotient> {
        TruncatedQuotient::new(SigmaIdealPresentation::parse(k, &["z"], &["z0^2-1"])?)
    }

    /// R = R_1 (x) R_2, presented in two variables.
    pub fn r(k: &DifferenceField) -> Result<TruncatedQuotient> {
        TruncatedQuotient::new(SigmaIdealPresentation::parse(k, &["y", "z"], &["y0^2-1", "y1-1", "z0^2-1"])?)
    }

    /// (k x k, swap) as k{y}/[y^2 - y, sigma(y) - (1 - y)].
    pub fn swap(k: &DifferenceField) -> Result<TruncatedQuotient> {
        TruncatedQuotient::new(SigmaIdealPresentation::parse(k, &["y"], &["y0^2-y0", "y1-(1-y0)"])?)
    }

    /// k itself.
    pub fn trivial(k: &DifferenceField) -> Result<TruncatedQuotient> {
        TruncatedQuotient::new(SigmaIdealPresentation::parse(k, &[], &["0"])?)
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    fn f5() -> DifferenceField {
        DifferenceField::prime(5, 0).unwrap()
    }

    #[test]
    fn dimensions() {
        let k = f5();
        let r2 = r2(&k).unwrap();
        for n in 0..4 {
            assert_eq!(r2.level(n).dim(), 1 << (n + 1));
        }
        let r1 = r1(&k).unwrap();
        for n in 0..4 {
            assert_eq!(r1.level(n).dim(), 2);
        }
        assert_eq!(trivial(&k).unwrap().level(3).dim(), 1);
    }

    #[test]
    fn sigma_of_e2_vanishes() {
        let k = f5();
        let r1 = r1(&k).unwrap();
        let e2 = r1.parse_elem(1, "(1-y0)/2").unwrap();
        assert_eq!(e2, vec![k.from_i64(3), k.from_i64(2)]);
        assert!(r1.sigma_elem(1, &e2).unwrap().iter().all(|c| k.is_zero(c)));
        assert_eq!(r1.classify(1, &e2, 10).unwrap(), Classification::HitsZero(1));
    }

    #[test]
    fn support_shift_certificate() {
        let k = f5();
        let r2 = r2(&k).unwrap();
        let e = r2.parse_elem(2, "(1+z0)/2").unwrap();
        assert_eq!(r2.level(2).mul(&e, &e), e);
        assert!(matches!(r2.classify(2, &e, 10).unwrap(), Classification::SupportShift { min_index: 0, .. }));
        assert_eq!(r2.classify(2, &r2.level(2).one(), 10).unwrap(), Classification::Periodic(1));
    }

    #[test]
    fn strong_cores() {
        let k = f5();
        let r = r(&k).unwrap();
        for n in 1..=3 {
            let c = r.strong_core_truncated(n).unwrap();
            assert_eq!(c.dim(), 1);
            assert!(c.exact);
        }
        let s = swap(&k).unwrap();
        assert_eq!(s.strong_core_truncated(2).unwrap().dim(), 2);
        assert_eq!(trivial(&k).unwrap().strong_core_truncated(0).unwrap().dim(), 1);
    }

    #[test]
    fn sigma_commutes_with_transitions() {
        let k = f5();
        let r = r(&k).unwrap();
        for n in 0..3 {
            let s0 = r.sigma_matrix(n).unwrap();
            let s1 = r.sigma_matrix(n + 1).unwrap();
            let lhs = linalg::mat_mul(&k, &s1, &r.transition(n));
            let rhs = linalg::mat_mul(&k, &r.transition(n + 1), &s0);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rejects_unsupported() {
        let k = f5();
        let p = SigmaIdealPresentation::parse(&k, &["y"], &["y1-y0^2"]).unwrap();
        assert!(matches!(TruncatedQuotient::new(p), Err(Error::Unsupported(_))));
        let p = SigmaIdealPresentation::parse(&k, &["y"], &["y0^2-1", "y1-2"]).unwrap();
        assert!(matches!(TruncatedQuotient::new(p), Err(Error::ZeroRing)));
        let p = SigmaIdealPresentation::parse(&k, &["y"], &["y0^2-y0", "y1-y0-1"]).unwrap();
        assert!(matches!(TruncatedQuotient::new(p), Err(Error::Unsupported(_))));
    }
}
