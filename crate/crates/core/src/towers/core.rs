//! Strong cores of finite tower parts, sigma-radiciality and partial inversive closures.

use super::degree::{adjoin, base_subspace};
use super::{decode, FamilySpec, LevelCert, LevelSpec, TElem, Tower, TowerExtension, TowerSpec, VarRef};
use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, MPoly, Scalar};
use crate::findiff::constructions::subalgebra_on;
use crate::findiff::predicates::is_strongly_sigma_etale;
use crate::findiff::FinSigmaAlgebra;
use crate::linalg::Subspace;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoreCertificate {
    /// The explicit part E of the tower, on which the chain is computed.
    pub tower: Tower,
    /// K sigma^n(E) inside E.
    pub subspace: Subspace,
    pub algebra: FinSigmaAlgebra,
    /// dim K sigma^i(E) for i = 0, 1, ... until two consecutive terms agree.
    pub chain: Vec<usize>,
    pub stabilized_at: usize,
    pub strongly_etale: bool,
    /// Per explicit generator, the least e with sigma^e(g) in the core.
    pub exponents: Vec<(String, usize)>,
    /// The tower has families, which are not part of the computation.
    pub explicit_only: bool,
}

impl CoreCertificate {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn basis_strings(&self) -> Vec<String> {
        self.subspace.rows.iter().map(|r| self.tower.format(r)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim(),
            "tower_dim": self.tower.dim(),
            "basis": self.basis_strings(),
            "chain": self.chain,
            "stabilized_at": self.stabilized_at,
            "strongly_sigma_etale": self.strongly_etale,
            "exponents": self.exponents.iter().map(|(n, e)| serde_json::json!({"gen": n, "exponent": e})).collect::<Vec<_>>(),
            "explicit_only": self.explicit_only,
        })
    }
}

/// K sigma(W) for a subspace W of a sigma-stable tower.
fn k_sigma(t: &Tower, w: &Subspace) -> Result<Subspace> {
    let imgs: Vec<TElem> = w.rows.iter().map(|r| t.sigma(r)).collect::<Result<_>>()?;
    Ok(adjoin(t, &base_subspace(t), &imgs))
}

/// The strong core of the explicit part E|K as the limit of the chain K sigma^i(E).
pub fn strong_core_finite_ext(ext: &TowerExtension) -> Result<CoreCertificate> {
    let t = ext.explicit_part();
    let k = t.base.clone();
    let full = Subspace::full(&k, t.dim());
    let mut w = full;
    let mut chain = vec![w.dim()];
    loop {
        let next = k_sigma(&t, &w)?;
        if next.dim() == w.dim() {
            break;
        }
        if !next.is_subspace_of(&k, &w) {
            return Err(Error::Invariant("K sigma^i(E) is not decreasing".into()));
        }
        w = next;
        chain.push(w.dim());
    }
    let stabilized_at = chain.len() - 1;
    let alg = t.as_algebra()?;
    let (core_alg, _) = subalgebra_on(&alg, &w)?;
    let strongly_etale = is_strongly_sigma_etale(&core_alg);
    let mut exponents = Vec::new();
    for j in 0..t.explicit {
        let mut x = t.gen(j);
        let mut e = 0;
        while !w.contains(&k, &x) {
            if e > stabilized_at {
                return Err(Error::Invariant(format!("sigma^{e}({}) outside K sigma^n(E)", t.gens[j].name)));
            }
            x = t.sigma(&x)?;
            e += 1;
        }
        exponents.push((t.gens[j].name.clone(), e));
    }
    Ok(CoreCertificate {
        tower: t,
        subspace: w,
        algebra: core_alg,
        chain,
        stabilized_at,
        strongly_etale,
        exponents,
        explicit_only: !ext.spec.families.is_empty(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GenExponent {
    pub gen: String,
    pub exponent: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicialVerdict {
    pub verdict: Verdict,
    pub horizon: usize,
    pub generators: Vec<GenExponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Per-generator search for n <= horizon with sigma^n(a) in K.
pub fn is_sigma_radicial(ext: &TowerExtension, horizon: usize) -> Result<RadicialVerdict> {
    let e = ext.explicit_part();
    let k = e.base.clone();
    let mut gens = Vec::new();
    if let Some(d) = ext.inversive_depth {
        // the prepended base variables t_{m-d}, ..., t_{m-1} over the original base
        let m = k.min_index().unwrap() + d as i32;
        for j in (m - d as i32)..m {
            let n = (m - j) as usize;
            gens.push(GenExponent {
                gen: format!("t_{j}"),
                exponent: (n <= horizon).then_some(n),
                evidence: Some("sigma shifts the index into the original base".into()),
            });
        }
    }
    let mut witness = None;
    for j in 0..e.explicit {
        let mut x = e.gen(j);
        let mut found = None;
        for n in 0..=horizon {
            if e.in_base(&x) {
                found = Some(n);
                break;
            }
            x = e.sigma(&x)?;
        }
        gens.push(GenExponent { gen: e.gens[j].name.clone(), exponent: found, evidence: None });
    }
    let mut refuted = false;
    if gens.iter().any(|g| g.exponent.is_none()) {
        // a nontrivial strong core is never sigma-radicial: sigma keeps 1, x independent over K
        let core = strong_core_finite_ext(ext)?;
        if core.dim() > 1 && core.strongly_etale {
            let x = core.subspace.rows.iter().find(|r| !e.in_base(r)).unwrap();
            witness = Some(e.format(x));
            refuted = true;
        }
    }
    for (f, fs) in ext.spec.families.iter().enumerate() {
        let cert = ext.family_cert(f);
        let evidence = if cert.certified() {
            format!(
                "sigma^n({}{}) generates a degree-{} extension at every n ({:?})",
                fs.name,
                fs.start,
                ext.family_degree(f),
                cert
            )
        } else {
            "no degree certificate for this family".to_string()
        };
        gens.push(GenExponent { gen: format!("{}{}", fs.name, fs.start), exponent: None, evidence: Some(evidence) });
    }
    let verdict = if refuted {
        Verdict::Refuted
    } else if gens.iter().all(|g| g.exponent.is_some()) {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(RadicialVerdict { verdict, horizon, generators: gens, witness })
}

#[derive(Clone, Debug)]
pub struct SRadicialCertificate {
    pub core: CoreCertificate,
    pub verified: bool,
}

impl SRadicialCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verified": self.verified,
            "core": self.core.to_json(),
        })
    }
}

/// The explicit part is sigma-radicial over its strong core, with an exponent per generator.
pub fn core_sradicial_over_strong_core_check(ext: &TowerExtension) -> Result<SRadicialCertificate> {
    let core = strong_core_finite_ext(ext)?;
    let verified = core.strongly_etale && core.exponents.len() == core.tower.explicit;
    Ok(SRadicialCertificate { core, verified })
}

/// Write a tower polynomial back as an expression over generator names.
fn poly_string(p: &MPoly, k: &DifferenceField, spec: &TowerSpec) -> String {
    // base coefficients are formatted by the field, generators substituted afterwards
    let mut out = Vec::new();
    for (m, c) in &p.terms {
        let mut parts = vec![format!("({})", k.format(c))];
        for &(id, e) in &m.0 {
            let name = match decode(id) {
                VarRef::X => "x".to_string(),
                VarRef::Explicit(j) => spec.levels[j].name.clone(),
                VarRef::Family(f, i) => format!("{}_{i}", spec.families[f].name),
            };
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        out.push(parts.join("*"));
    }
    if out.is_empty() {
        "0".into()
    } else {
        out.join(" + ")
    }
}

/// A partial inversive closure: every generator gets a chain of sigma-preimages of the given depth.
pub fn inversive_closure(ext: &TowerExtension, depth: u32) -> Result<TowerExtension> {
    let k = ext.base();
    if k.is_finite() || depth == 0 {
        let mut out = TowerExtension::make(ext.spec.clone())?;
        out.inversive_depth = Some(0);
        return Ok(out);
    }
    if !k.is_shift() {
        return Err(Error::Unsupported(format!("inversive closure of {} is not implemented", k.name())));
    }
    if ext.explicit_part().gens.iter().any(|g| g.cert != LevelCert::ConstantField) {
        return Err(Error::Unsupported("inversive closure needs constant explicit levels".into()));
    }
    let d = depth as i32;
    let big = DifferenceField::shift_from(&k.constants(), k.min_index().unwrap() - d)?;
    let down = |x: &Scalar| -> Result<Scalar> {
        let mut y = x.clone();
        for _ in 0..depth {
            y = big.sigma_inv(&y)?;
        }
        Ok(y)
    };
    let mut families = Vec::new();
    for (f, fs) in ext.spec.families.iter().enumerate() {
        let p = &ext.family_polys[f];
        let mut q = MPoly::zero();
        for (m, c) in &p.terms {
            let mono = MPoly::monomial(m.clone(), down(c)?, &big);
            q = q.add(&mono, &big);
        }
        let q = q.map_vars(|v| match decode(v) {
            VarRef::Family(g, i) => super::family_id(g, i - d),
            _ => v,
        });
        families.push(FamilySpec { name: fs.name.clone(), minpoly: poly_string(&q, &big, &ext.spec), start: fs.start - d });
    }
    let levels: Vec<LevelSpec> = ext.spec.levels.clone();
    let mut out = TowerExtension::make(TowerSpec { base: big, levels, families })?;
    out.inversive_depth = Some(depth);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::generate::examples;

    #[test]
    fn core_of_constant_level_is_everything() {
        let t = examples::f9_over_f3();
        let c = strong_core_finite_ext(&t).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.strongly_etale);
        assert_eq!(c.chain, vec![2]);
        assert_eq!(c.exponents, vec![("alpha".to_string(), 0)]);
    }

    #[test]
    fn radicial_level_collapses() {
        // b^2 = t, sigma(b) = t over F5(t) with sigma(t) = t^2
        let t = examples::radicial_square_root(5);
        let c = strong_core_finite_ext(&t).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.chain, vec![2, 1]);
        assert_eq!(c.exponents, vec![("b".to_string(), 1)]);
        let r = is_sigma_radicial(&t, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert!(core_sradicial_over_strong_core_check(&t).unwrap().verified);
    }

    #[test]
    fn radical_towers_are_not_radicial() {
        let t = examples::radical(5, 2);
        let r = is_sigma_radicial(&t, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.generators[0].evidence.as_ref().unwrap().contains("degree-2"));
        let c = examples::corrupted();
        assert_eq!(is_sigma_radicial(&c, 4).unwrap().verdict, Verdict::Refuted);
    }

    #[test]
    fn inversive_closures() {
        let k = DifferenceField::shift(&DifferenceField::prime(5, 0).unwrap()).unwrap();
        let triv = TowerExtension::make(TowerSpec { base: k, levels: vec![], families: vec![] }).unwrap();
        let ks = inversive_closure(&triv, 3).unwrap();
        let r = is_sigma_radicial(&ks, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.generators.len(), 3);
        let a = inversive_closure(&examples::radical(5, 2), 2).unwrap();
        assert_eq!(a.min_start(), -2);
        let t = a.materialize(0).unwrap();
        let x = t.parse("a_-2").unwrap();
        assert_eq!(t.mul(&x, &x), t.parse("t_-2").unwrap());
        assert_eq!(t.sigma_n(&x, 2).unwrap(), t.parse("a0").unwrap());
    }
}
