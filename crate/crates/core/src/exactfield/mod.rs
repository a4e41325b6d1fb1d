//! Exact difference fields: Q, F_{p^n} with a Frobenius power, k0(t) with t -> g(t),
//! and the shift field k0(t_0, t_1, ...) with t_i -> t_{i+1}.

pub mod finite;
pub mod mpoly;

use crate::error::{Error, Result};
use crate::expr::{self, Target};
use finite::FiniteField;
pub use mpoly::{MPoly, Mono};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

/// Field element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F(Vec<u64>),
    R(Arc<RatFunc>),
}

/// Reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    pub num: MPoly,
    pub den: MPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDescriptor {
    Q,
    Fq { p: u64, defpoly: Vec<u64>, frobenius_power: u32 },
    /// k0(t) with sigma(t) = num(t)/den(t); coefficients in k0, low degree first.
    Qt { constants: Box<FieldDescriptor>, sigma_num: Vec<Scalar>, sigma_den: Vec<Scalar> },
    /// k0(t_i : i >= min_index) with sigma(t_i) = t_{i+1}.
    Shift { constants: Box<FieldDescriptor>, min_index: i32 },
}

enum Kind {
    Q,
    F { ff: FiniteField, m: u32, frob: Vec<Vec<u64>>, frob_inv: Vec<Vec<u64>> },
    Uni { k0: DifferenceField, g_num: MPoly, g_den: MPoly, deg: u32 },
    Shift { k0: DifferenceField, min_index: i32 },
}

struct Inner {
    desc: FieldDescriptor,
    kind: Kind,
    horizon: AtomicI64,
}

/// Exact base field with its endomorphism sigma. Cheap to clone.
#[derive(Clone)]
pub struct DifferenceField(Arc<Inner>);

impl PartialEq for DifferenceField {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0.desc == o.0.desc
    }
}

impl Eq for DifferenceField {}

impl std::fmt::Debug for DifferenceField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl DifferenceField {
    fn wrap(desc: FieldDescriptor, kind: Kind) -> Self {
        DifferenceField(Arc::new(Inner { desc, kind, horizon: AtomicI64::new(0) }))
    }

    pub fn rationals() -> Self {
        Self::wrap(FieldDescriptor::Q, Kind::Q)
    }

    pub fn prime(p: u64, m: u32) -> Result<Self> {
        Self::finite(p, vec![0, 1], m)
    }

    /// F_p[x]/(defpoly) with sigma = x -> x^{p^m}. Irreducibility is verified.
    pub fn finite(p: u64, defpoly: Vec<u64>, m: u32) -> Result<Self> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::Input(format!("p = {p} is not a supported prime")));
        }
        let mut dp: Vec<u64> = defpoly.iter().map(|c| c % p).collect();
        finite::fp::trim(&mut dp);
        if dp.len() < 2 {
            return Err(Error::Input("defining polynomial must have degree >= 1".into()));
        }
        let lc = *dp.last().unwrap();
        if lc != 1 {
            let li = finite::fp::inv(lc, p);
            dp.iter_mut().for_each(|c| *c = *c * li % p);
        }
        let n = dp.len() - 1;
        if n > 1 {
            let fp = Self::prime(p, 0)?;
            let f = crate::poly::Poly::new(&fp, dp.iter().map(|&c| fp.from_u64(c)).collect());
            let fl = crate::poly::factor::factor_with_seed(&f, 0)?;
            if fl.factors.len() != 1 || fl.factors[0].1 != 1 {
                let g = &fl.factors[0].0;
                return Err(Error::Reducible(g.to_string()));
            }
        }
        let ff = FiniteField::new(p, dp.clone());
        let mm = if n == 1 { 0 } else { m % n as u32 };
        let frob = frob_matrix(&ff, mm);
        let frob_inv = frob_matrix(&ff, if mm == 0 { 0 } else { n as u32 - mm });
        Ok(Self::wrap(
            FieldDescriptor::Fq { p, defpoly: dp, frobenius_power: mm },
            Kind::F { ff, m: mm, frob, frob_inv },
        ))
    }

    /// k0(t) with sigma(t) = g = num/den, g nonconstant.
    pub fn rational_function(k0: &DifferenceField, num: Vec<Scalar>, den: Vec<Scalar>) -> Result<Self> {
        if !k0.is_constant_field() {
            return Err(Error::Unsupported("constant field must be Q or a finite field".into()));
        }
        let to_m = |c: &[Scalar]| {
            let mut p = MPoly::zero();
            for (i, x) in c.iter().enumerate() {
                p = p.add(&MPoly::monomial(Mono::var(0, i as u32), x.clone(), k0), k0);
            }
            p
        };
        let (n, d) = (to_m(&num), to_m(&den));
        if d.is_zero() {
            return Err(Error::InvalidEndomorphism("sigma(t) has zero denominator".into()));
        }
        let g = MPoly::gcd(&n, &d, k0);
        let n = n.div_exact(&g, k0).unwrap();
        let d = d.div_exact(&g, k0).unwrap();
        let lc = d.leading().unwrap().1.clone();
        let li = k0.inv(&lc)?;
        let (n, d) = (n.scale(&li, k0), d.scale(&li, k0));
        let deg = n.degree_in(0).max(d.degree_in(0));
        if deg == 0 {
            return Err(Error::InvalidEndomorphism("sigma(t) is constant".into()));
        }
        let coeffs = |p: &MPoly| -> Vec<Scalar> {
            (0..=p.degree_in(0)).map(|i| p.coeff_in(0, i).as_constant().unwrap_or_else(|| k0.zero())).collect()
        };
        let desc = FieldDescriptor::Qt {
            constants: Box::new(k0.descriptor().clone()),
            sigma_num: coeffs(&n),
            sigma_den: coeffs(&d),
        };
        Ok(Self::wrap(desc, Kind::Uni { k0: k0.clone(), g_num: n, g_den: d, deg }))
    }

    pub fn shift(k0: &DifferenceField) -> Result<Self> {
        Self::shift_from(k0, 0)
    }

    /// Shift field whose variables start at `min_index` (negative for partial inversive closures).
    pub fn shift_from(k0: &DifferenceField, min_index: i32) -> Result<Self> {
        if !k0.is_constant_field() {
            return Err(Error::Unsupported("constant field must be Q or a finite field".into()));
        }
        let desc = FieldDescriptor::Shift { constants: Box::new(k0.descriptor().clone()), min_index };
        let f = Self::wrap(desc, Kind::Shift { k0: k0.clone(), min_index });
        f.0.horizon.store(min_index as i64, Ordering::Relaxed);
        Ok(f)
    }

    pub fn make(d: &FieldDescriptor) -> Result<Self> {
        match d {
            FieldDescriptor::Q => Ok(Self::rationals()),
            FieldDescriptor::Fq { p, defpoly, frobenius_power } => Self::finite(*p, defpoly.clone(), *frobenius_power),
            FieldDescriptor::Qt { constants, sigma_num, sigma_den } => {
                let k0 = Self::make(constants)?;
                Self::rational_function(&k0, sigma_num.clone(), sigma_den.clone())
            }
            FieldDescriptor::Shift { constants, min_index } => Self::shift_from(&Self::make(constants)?, *min_index),
        }
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    pub fn name(&self) -> String {
        match &self.0.kind {
            Kind::Q => "Q".into(),
            Kind::F { ff, m, .. } => {
                if ff.n == 1 {
                    format!("F{}[frob^{}]", ff.p, m)
                } else {
                    format!("F{}^{}[frob^{}]", ff.p, ff.n, m)
                }
            }
            Kind::Uni { k0, g_num, g_den, .. } => {
                let t = RatFunc { num: g_num.clone(), den: g_den.clone() };
                format!("{}(t)[t->{}]", k0.name(), fmt_ratfunc(&t, k0, self))
            }
            Kind::Shift { k0, min_index } => format!("{}(t_{}..)[shift]", k0.name(), min_index),
        }
    }

    pub fn is_constant_field(&self) -> bool {
        matches!(self.0.kind, Kind::Q | Kind::F { .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0.kind, Kind::F { .. })
    }

    pub fn is_shift(&self) -> bool {
        matches!(self.0.kind, Kind::Shift { .. })
    }

    pub fn is_univariate(&self) -> bool {
        matches!(self.0.kind, Kind::Uni { .. })
    }

    pub fn finite_field(&self) -> Option<&FiniteField> {
        match &self.0.kind {
            Kind::F { ff, .. } => Some(ff),
            _ => None,
        }
    }

    /// Exponent m of sigma = Frobenius^m (reduced mod the degree).
    pub fn frobenius_power(&self) -> Option<u32> {
        match &self.0.kind {
            Kind::F { m, .. } => Some(*m),
            _ => None,
        }
    }

    /// Constant field k0 of a function field; the field itself otherwise.
    pub fn constants(&self) -> DifferenceField {
        match &self.0.kind {
            Kind::Uni { k0, .. } | Kind::Shift { k0, .. } => k0.clone(),
            _ => self.clone(),
        }
    }

    pub fn min_index(&self) -> Option<i32> {
        match &self.0.kind {
            Kind::Shift { min_index, .. } => Some(*min_index),
            _ => None,
        }
    }

    /// sigma(t) for univariate function fields.
    pub fn sigma_t(&self) -> Option<(MPoly, MPoly, u32)> {
        match &self.0.kind {
            Kind::Uni { g_num, g_den, deg, .. } => Some((g_num.clone(), g_den.clone(), *deg)),
            _ => None,
        }
    }

    /// Largest shift variable index observed so far.
    pub fn horizon(&self) -> i64 {
        self.0.horizon.load(Ordering::Relaxed)
    }

    fn touch(&self, p: &MPoly) {
        if let Some(v) = p.max_var() {
            self.0.horizon.fetch_max(v as i64, Ordering::Relaxed);
        }
    }

    pub fn characteristic(&self) -> u64 {
        match &self.0.kind {
            Kind::Q => 0,
            Kind::F { ff, .. } => ff.p,
            Kind::Uni { k0, .. } | Kind::Shift { k0, .. } => k0.characteristic(),
        }
    }

    /// Number of elements for finite fields.
    pub fn order(&self) -> Option<u128> {
        self.finite_field().map(|f| f.order())
    }

    pub fn is_inversive(&self) -> bool {
        match &self.0.kind {
            Kind::Q | Kind::F { .. } => true,
            Kind::Uni { k0, deg, .. } => *deg == 1 && k0.is_inversive(),
            Kind::Shift { .. } => false,
        }
    }

    // ---- element construction ----

    pub fn zero(&self) -> Scalar {
        match &self.0.kind {
            Kind::Q => Scalar::Q(BigRational::zero()),
            Kind::F { ff, .. } => Scalar::F(ff.zero()),
            Kind::Uni { k0, .. } | Kind::Shift { k0, .. } => {
                Scalar::R(Arc::new(RatFunc { num: MPoly::zero(), den: MPoly::one(k0) }))
            }
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_u64(&self, n: u64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &self.0.kind {
            Kind::Q => Scalar::Q(BigRational::from_integer(n.clone())),
            Kind::F { ff, .. } => {
                let r = n.mod_floor(&BigInt::from(ff.p)).to_u64().unwrap();
                Scalar::F(ff.from_u64(r))
            }
            Kind::Uni { k0, .. } | Kind::Shift { k0, .. } => self.lift(&k0.from_bigint(n)),
        }
    }

    /// Rational number, when the characteristic allows it.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.div(&n, &d)
    }

    /// Embed a constant-field element.
    pub fn lift(&self, c: &Scalar) -> Scalar {
        match &self.0.kind {
            Kind::Uni { k0, .. } | Kind::Shift { k0, .. } => {
                Scalar::R(Arc::new(RatFunc { num: MPoly::constant(c.clone(), k0), den: MPoly::one(k0) }))
            }
            _ => c.clone(),
        }
    }

    /// Generator w of F_{p^n} over F_p.
    pub fn generator(&self) -> Result<Scalar> {
        match &self.0.kind {
            Kind::F { ff, .. } => Ok(Scalar::F(ff.gen())),
            _ => Err(Error::Domain("generator only defined for finite fields".into())),
        }
    }

    /// The transcendental t (univariate) or t_i (shift).
    pub fn var(&self, i: i32) -> Result<Scalar> {
        match &self.0.kind {
            Kind::Uni { k0, .. } if i == 0 => Ok(self.from_poly(MPoly::var(0, k0), MPoly::one(k0))),
            Kind::Shift { k0, min_index } if i >= *min_index => {
                let p = MPoly::var(i, k0);
                self.touch(&p);
                Ok(self.from_poly(p, MPoly::one(k0)))
            }
            _ => Err(Error::Domain(format!("variable t{i} not in {}", self.name()))),
        }
    }

    /// Build num/den and canonicalize.
    pub fn from_poly(&self, num: MPoly, den: MPoly) -> Scalar {
        let k0 = self.constants();
        Scalar::R(Arc::new(normalize(num, den, &k0)))
    }

    pub fn ratfunc<'a>(&self, x: &'a Scalar) -> &'a RatFunc {
        match x {
            Scalar::R(r) => r,
            _ => panic!("not a function-field element"),
        }
    }

    pub fn ff_coeffs<'a>(&self, x: &'a Scalar) -> &'a [u64] {
        match x {
            Scalar::F(v) => v,
            _ => panic!("not a finite-field element"),
        }
    }

    pub fn rat<'a>(&self, x: &'a Scalar) -> &'a BigRational {
        match x {
            Scalar::Q(v) => v,
            _ => panic!("not a rational"),
        }
    }

    /// Decide whether `x` is a valid canonical element of this field.
    pub fn is_canonical(&self, x: &Scalar) -> bool {
        match (&self.0.kind, x) {
            (Kind::Q, Scalar::Q(_)) => true,
            (Kind::F { ff, .. }, Scalar::F(v)) => v.len() == ff.n && v.iter().all(|&c| c < ff.p),
            (Kind::Uni { k0, .. } | Kind::Shift { k0, .. }, Scalar::R(r)) => {
                if let Some(mi) = self.min_index() {
                    if r.num.min_var().map_or(false, |v| v < mi) || r.den.min_var().map_or(false, |v| v < mi) {
                        return false;
                    }
                }
                if self.is_univariate() && (r.num.max_var().unwrap_or(0) != 0 || r.den.max_var().unwrap_or(0) != 0) {
                    return false;
                }
                normalize(r.num.clone(), r.den.clone(), k0) == **r
            }
            _ => false,
        }
    }

    pub fn canonicalize(&self, x: &Scalar) -> Scalar {
        match x {
            Scalar::R(r) => self.from_poly(r.num.clone(), r.den.clone()),
            Scalar::F(v) => {
                let ff = self.finite_field().expect("finite");
                Scalar::F(v.iter().map(|c| c % ff.p).collect())
            }
            _ => x.clone(),
        }
    }

    // ---- arithmetic ----

    pub fn is_zero(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Q(q) => q.is_zero(),
            Scalar::F(v) => v.iter().all(|&c| c == 0),
            Scalar::R(r) => r.num.is_zero(),
        }
    }

    pub fn is_one(&self, x: &Scalar) -> bool {
        *x == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.0.kind, a, b) {
            (Kind::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Kind::F { ff, .. }, Scalar::F(x), Scalar::F(y)) => Scalar::F(ff.add(x, y)),
            (Kind::Uni { k0, .. } | Kind::Shift { k0, .. }, Scalar::R(x), Scalar::R(y)) => {
                if x.num.is_zero() {
                    return b.clone();
                }
                if y.num.is_zero() {
                    return a.clone();
                }
                if x.den == y.den {
                    return self.from_poly(x.num.add(&y.num, k0), x.den.clone());
                }
                let n = x.num.mul(&y.den, k0).add(&y.num.mul(&x.den, k0), k0);
                self.from_poly(n, x.den.mul(&y.den, k0))
            }
            _ => panic!("scalar kind mismatch in {}", self.name()),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (&self.0.kind, a) {
            (Kind::Q, Scalar::Q(x)) => Scalar::Q(-x),
            (Kind::F { ff, .. }, Scalar::F(x)) => Scalar::F(ff.neg(x)),
            (Kind::Uni { k0, .. } | Kind::Shift { k0, .. }, Scalar::R(x)) => {
                Scalar::R(Arc::new(RatFunc { num: x.num.neg(k0), den: x.den.clone() }))
            }
            _ => panic!("scalar kind mismatch in {}", self.name()),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.0.kind, a, b) {
            (Kind::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Kind::F { ff, .. }, Scalar::F(x), Scalar::F(y)) => Scalar::F(ff.mul(x, y)),
            (Kind::Uni { k0, .. } | Kind::Shift { k0, .. }, Scalar::R(x), Scalar::R(y)) => {
                if x.num.is_zero() || y.num.is_zero() {
                    return self.zero();
                }
                if let (Some(c), true) = (x.num.as_constant(), x.den.is_constant()) {
                    return Scalar::R(Arc::new(RatFunc { num: y.num.scale(&c, k0), den: y.den.clone() }));
                }
                if let (Some(c), true) = (y.num.as_constant(), y.den.is_constant()) {
                    return Scalar::R(Arc::new(RatFunc { num: x.num.scale(&c, k0), den: x.den.clone() }));
                }
                self.from_poly(x.num.mul(&y.num, k0), x.den.mul(&y.den, k0))
            }
            _ => panic!("scalar kind mismatch in {}", self.name()),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if self.is_zero(a) {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(match (&self.0.kind, a) {
            (Kind::Q, Scalar::Q(x)) => Scalar::Q(x.recip()),
            (Kind::F { ff, .. }, Scalar::F(x)) => Scalar::F(ff.inv(x).unwrap()),
            (Kind::Uni { .. } | Kind::Shift { .. }, Scalar::R(x)) => self.from_poly(x.den.clone(), x.num.clone()),
            _ => panic!("scalar kind mismatch in {}", self.name()),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        self.pow_big(a, &BigUint::from(e))
    }

    pub fn pow_big(&self, a: &Scalar, e: &BigUint) -> Scalar {
        if let (Kind::F { ff, .. }, Scalar::F(x)) = (&self.0.kind, a) {
            return Scalar::F(ff.pow_big(x, e));
        }
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    // ---- the endomorphism ----

    pub fn sigma(&self, x: &Scalar) -> Scalar {
        match (&self.0.kind, x) {
            (Kind::Q, _) => x.clone(),
            (Kind::F { ff, m, frob, .. }, Scalar::F(v)) => {
                if *m == 0 {
                    x.clone()
                } else {
                    Scalar::F(apply_mat(frob, v, ff.p))
                }
            }
            (Kind::Uni { k0, g_num, g_den, .. }, Scalar::R(r)) => {
                let n = r.num.map_coeffs(|c| k0.sigma(c), k0);
                let d = r.den.map_coeffs(|c| k0.sigma(c), k0);
                let (dn, dd) = (n.degree_in(0), d.degree_in(0));
                // N(g)/D(g) with common factor g_den^{max(dn,dd)}
                let top = dn.max(dd);
                let hn = homog_subst(&n, g_num, g_den, top, k0);
                let hd = homog_subst(&d, g_num, g_den, top, k0);
                self.from_poly(hn, hd)
            }
            (Kind::Shift { k0, .. }, Scalar::R(r)) => {
                let n = r.num.map_coeffs(|c| k0.sigma(c), k0).map_vars(|v| v + 1);
                let d = r.den.map_coeffs(|c| k0.sigma(c), k0).map_vars(|v| v + 1);
                self.touch(&n);
                self.touch(&d);
                Scalar::R(Arc::new(RatFunc { num: n, den: d }))
            }
            _ => panic!("scalar kind mismatch in {}", self.name()),
        }
    }

    pub fn sigma_n(&self, x: &Scalar, n: u32) -> Scalar {
        let mut r = x.clone();
        for _ in 0..n {
            r = self.sigma(&r);
        }
        r
    }

    /// sigma^{-1}(x) when it exists in this field.
    pub fn sigma_inv(&self, x: &Scalar) -> Result<Scalar> {
        match (&self.0.kind, x) {
            (Kind::Q, _) => Ok(x.clone()),
            (Kind::F { ff, m, frob_inv, .. }, Scalar::F(v)) => {
                if *m == 0 {
                    Ok(x.clone())
                } else {
                    Ok(Scalar::F(apply_mat(frob_inv, v, ff.p)))
                }
            }
            (Kind::Shift { k0, min_index }, Scalar::R(r)) => {
                let lo = r.num.min_var().into_iter().chain(r.den.min_var()).min();
                if lo.map_or(false, |v| v - 1 < *min_index) {
                    return Err(Error::Domain("no sigma-preimage at this materialization depth".into()));
                }
                let inv = |c: &Scalar| k0.sigma_inv(c).expect("constant field inversive");
                let n = r.num.map_coeffs(inv, k0).map_vars(|v| v - 1);
                let d = r.den.map_coeffs(inv, k0).map_vars(|v| v - 1);
                Ok(Scalar::R(Arc::new(RatFunc { num: n, den: d })))
            }
            (Kind::Uni { k0, g_num, g_den, deg }, Scalar::R(r)) if *deg == 1 => {
                // t -> (a t + b)/(c t + d) has inverse t -> (d t - b)/(a - c t)
                let c = |p: &MPoly, i| p.coeff_in(0, i).as_constant().unwrap_or_else(|| k0.zero());
                let (a, b, cc, d) = (c(g_num, 1), c(g_num, 0), c(g_den, 1), c(g_den, 0));
                let hn = MPoly::var(0, k0).scale(&d, k0).sub(&MPoly::constant(b, k0), k0);
                let hd = MPoly::constant(a, k0).sub(&MPoly::var(0, k0).scale(&cc, k0), k0);
                let top = r.num.degree_in(0).max(r.den.degree_in(0));
                let n = homog_subst(&r.num, &hn, &hd, top, k0);
                let dd = homog_subst(&r.den, &hn, &hd, top, k0);
                let inv = |s: &Scalar| k0.sigma_inv(s).expect("constant field inversive");
                Ok(self.from_poly(n.map_coeffs(inv, k0), dd.map_coeffs(inv, k0)))
            }
            _ => Err(Error::Unsupported(format!("sigma is not invertible on {}", self.name()))),
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match &self.0.kind {
            Kind::Q => {
                let n: i64 = rng.gen_range(-9..=9);
                let d: i64 = rng.gen_range(1..=5);
                Scalar::Q(BigRational::new(n.into(), d.into()))
            }
            Kind::F { ff, .. } => Scalar::F(ff.random(rng)),
            Kind::Uni { k0, .. } => {
                let mut n = MPoly::zero();
                for i in 0..rng.gen_range(1..=3u32) {
                    n = n.add(&MPoly::monomial(Mono::var(0, i), k0.random(rng), k0), k0);
                }
                let mut d = MPoly::one(k0);
                if rng.gen_bool(0.3) {
                    d = d.add(&MPoly::monomial(Mono::var(0, 1), k0.random(rng), k0), k0);
                }
                if d.is_zero() {
                    d = MPoly::one(k0);
                }
                self.from_poly(n, d)
            }
            Kind::Shift { k0, min_index } => {
                let mut n = MPoly::constant(k0.random(rng), k0);
                for _ in 0..rng.gen_range(1..=2) {
                    let v = *min_index + rng.gen_range(0..3);
                    n = n.add(&MPoly::monomial(Mono::var(v, 1), k0.random(rng), k0), k0);
                }
                let mut d = MPoly::one(k0);
                if rng.gen_bool(0.3) {
                    let v = *min_index + rng.gen_range(0..3);
                    d = d.add(&MPoly::var(v, k0), k0);
                }
                self.touch(&n);
                self.from_poly(n, d)
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// All elements of a finite field, in index order.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        let ff = self.finite_field().ok_or_else(|| Error::Domain("not a finite field".into()))?;
        Ok((0..ff.order()).map(|i| Scalar::F(ff.element(i))).collect())
    }

    // ---- text ----

    pub fn format(&self, x: &Scalar) -> String {
        match (&self.0.kind, x) {
            (Kind::Q, Scalar::Q(q)) => fmt_rat(q),
            (Kind::F { ff, .. }, Scalar::F(v)) => fmt_ff(v, ff.n),
            (Kind::Uni { k0, .. } | Kind::Shift { k0, .. }, Scalar::R(r)) => fmt_ratfunc(r, k0, self),
            _ => "<mismatch>".into(),
        }
    }

    /// Parse an expression string (symbols: `w` for the finite-field generator, `t` or `t_i`).
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let e = expr::parse(s)?;
        expr::eval(&FieldTarget(self), &e)
    }
}

struct FieldTarget<'a>(&'a DifferenceField);

impl Target for FieldTarget<'_> {
    type V = Scalar;
    fn int(&self, n: &BigInt) -> Result<Scalar> {
        Ok(self.0.from_bigint(n))
    }
    fn sym(&self, name: &str) -> Result<Scalar> {
        let f = self.0;
        match &f.0.kind {
            Kind::F { .. } if name == "w" => f.generator(),
            Kind::Uni { k0, .. } => {
                if name == "t" {
                    f.var(0)
                } else if name == "w" && k0.is_finite() {
                    Ok(f.lift(&k0.generator()?))
                } else {
                    Err(Error::Input(format!("unknown symbol '{name}' in {}", f.name())))
                }
            }
            Kind::Shift { k0, .. } => {
                if name == "w" && k0.is_finite() {
                    return Ok(f.lift(&k0.generator()?));
                }
                match expr::split_index(name) {
                    (s, Some(i)) if s == "t" => f.var(i as i32),
                    _ => Err(Error::Input(format!("unknown symbol '{name}' in {}", f.name()))),
                }
            }
            _ => Err(Error::Input(format!("unknown symbol '{name}' in {}", f.name()))),
        }
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.0.add(a, b))
    }
    fn sub(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.0.sub(a, b))
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.0.mul(a, b))
    }
    fn neg(&self, a: &Scalar) -> Result<Scalar> {
        Ok(self.0.neg(a))
    }
    fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.0.div(a, b)
    }
    fn pow(&self, a: &Scalar, e: u32) -> Result<Scalar> {
        Ok(self.0.pow(a, e as u64))
    }
    fn sigma(&self, k: u32, a: &Scalar) -> Result<Scalar> {
        Ok(self.0.sigma_n(a, k))
    }
}

fn frob_matrix(ff: &FiniteField, m: u32) -> Vec<Vec<u64>> {
    // column i = (w^i)^{p^m}; stored as rows of the matrix acting on column vectors
    let n = ff.n;
    let wp = ff.frob(&ff.gen(), m);
    let mut cols = Vec::with_capacity(n);
    let mut cur = ff.from_u64(1);
    for _ in 0..n {
        cols.push(cur.clone());
        cur = ff.mul(&cur, &wp);
    }
    (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect()
}

fn apply_mat(m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    m.iter().map(|row| row.iter().zip(v).fold(0u64, |acc, (a, b)| (acc + a * b) % p)).collect()
}

/// sum_i c_i gn^i gd^{top-i} for p = sum_i c_i t^i.
fn homog_subst(p: &MPoly, gn: &MPoly, gd: &MPoly, top: u32, k0: &DifferenceField) -> MPoly {
    let mut r = MPoly::zero();
    let cs = p.coeffs_in(0);
    for (i, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = c.mul(&gn.pow(i as u32, k0), k0).mul(&gd.pow(top - i as u32, k0), k0);
        r = r.add(&term, k0);
    }
    r
}

pub(crate) fn normalize(num: MPoly, den: MPoly, k0: &DifferenceField) -> RatFunc {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return RatFunc { num, den: MPoly::one(k0) };
    }
    let (mut n, mut d) = (num, den);
    if !d.is_constant() {
        let g = MPoly::gcd(&n, &d, k0);
        if !g.is_constant() {
            n = n.div_exact(&g, k0).expect("gcd divides");
            d = d.div_exact(&g, k0).expect("gcd divides");
        }
    }
    let lc = d.leading().unwrap().1.clone();
    if !k0.is_one(&lc) {
        let li = k0.inv(&lc).unwrap();
        n = n.scale(&li, k0);
        d = d.scale(&li, k0);
    }
    RatFunc { num: n, den: d }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_ff(v: &[u64], n: usize) -> String {
    if n == 1 {
        return v[0].to_string();
    }
    let mut parts = Vec::new();
    for (i, &c) in v.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "w".into(),
            _ => format!("w^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

fn var_name(f: &DifferenceField, v: i32) -> String {
    if f.is_univariate() {
        "t".into()
    } else if v < 0 {
        format!("t_{v}")
    } else {
        format!("t{v}")
    }
}

pub(crate) fn fmt_mpoly(p: &MPoly, k0: &DifferenceField, f: &DifferenceField) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (m, c)) in p.terms.iter().rev().enumerate() {
        let mut cs = k0.format(c);
        let compound = cs.contains('+') || (cs.contains('-') && !cs.starts_with('-')) || cs[1..].contains('-');
        let neg = !compound && cs.starts_with('-');
        if neg {
            cs = cs[1..].to_string();
        }
        if compound {
            cs = format!("({cs})");
        }
        if idx > 0 {
            s.push_str(if neg { "-" } else { "+" });
        } else if neg {
            s.push('-');
        }
        let mono: Vec<String> = m
            .0
            .iter()
            .map(|&(v, e)| if e == 1 { var_name(f, v) } else { format!("{}^{e}", var_name(f, v)) })
            .collect();
        if mono.is_empty() {
            s.push_str(&cs);
        } else {
            if cs != "1" {
                let _ = write!(s, "{cs}*");
            }
            s.push_str(&mono.join("*"));
        }
    }
    s
}

fn fmt_ratfunc(r: &RatFunc, k0: &DifferenceField, f: &DifferenceField) -> String {
    let n = fmt_mpoly(&r.num, k0, f);
    if r.den.as_constant().map_or(false, |c| k0.is_one(&c)) {
        return n;
    }
    format!("({n})/({})", fmt_mpoly(&r.den, k0, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_frobenius_negates_generator() {
        let f9 = DifferenceField::finite(3, vec![1, 0, 1], 1).unwrap();
        let a = f9.generator().unwrap();
        assert_eq!(f9.sigma(&a), f9.neg(&a));
    }

    #[test]
    fn reducible_defpoly_rejected() {
        let e = DifferenceField::finite(5, vec![4, 0, 1], 1).unwrap_err();
        assert!(matches!(e, Error::Reducible(_)));
    }

    #[test]
    fn qt_substitution() {
        let q = DifferenceField::rationals();
        let k = DifferenceField::rational_function(&q, vec![q.zero(), q.zero(), q.one()], vec![q.one()]).unwrap();
        let x = k.parse("(t+1)/t").unwrap();
        assert_eq!(k.sigma(&x), k.parse("(t^2+1)/t^2").unwrap());
        assert!(!k.is_inversive());
    }

    #[test]
    fn shift_moves_indices() {
        let f5 = DifferenceField::prime(5, 1).unwrap();
        let k = DifferenceField::shift(&f5).unwrap();
        let x = k.parse("t0*t1").unwrap();
        assert_eq!(k.sigma(&x), k.parse("t1*t2").unwrap());
        assert!(!k.is_inversive());
    }

    #[test]
    fn constant_sigma_t_rejected() {
        let q = DifferenceField::rationals();
        let e = DifferenceField::rational_function(&q, vec![q.from_i64(3)], vec![q.one()]).unwrap_err();
        assert!(matches!(e, Error::InvalidEndomorphism(_)));
    }

    #[test]
    fn fraction_reduction() {
        let q = DifferenceField::rationals();
        let k = DifferenceField::shift(&q).unwrap();
        let x = k.parse("(t0^2-t1^2)/(t0+t1)").unwrap();
        assert_eq!(x, k.parse("t0-t1").unwrap());
        assert!(k.is_canonical(&x));
    }
}
