//! Compatibility of two extensions, decided on the tensor product of their strong cores.

use super::core::strong_core_finite_ext;
use super::{LevelCert, TowerExtension, TowerSpec};
use crate::error::{Error, Result};
use crate::findiff::constructions::tensor_product;
use crate::findiff::primitive_idempotents;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CompatVerdict {
    pub compatible: bool,
    pub reason: String,
    /// Primitive idempotent e of the core tensor product with sigma(1 - e) e = 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Number of primitive idempotents examined.
    pub idempotents: usize,
    pub core_dims: (usize, usize),
}

/// The explicit part rewritten over the constant field, when every level is constant.
fn constant_descent(t: &TowerExtension) -> Result<Option<TowerExtension>> {
    let e = t.explicit_part();
    if e.gens.iter().any(|g| g.cert != LevelCert::ConstantField) {
        return Ok(None);
    }
    let spec = TowerSpec { base: t.base().constants(), levels: t.spec.levels.clone(), families: vec![] };
    Ok(Some(TowerExtension::make(spec)?))
}

/// L and L' embed into a common sigma-field extension of K iff their strong cores do.
pub fn compatible(a: &TowerExtension, b: &TowerExtension) -> Result<CompatVerdict> {
    if a.base() != b.base() {
        return Err(Error::MixedFields);
    }
    let ca = strong_core_finite_ext(a)?;
    let cb = strong_core_finite_ext(b)?;
    let dims = (ca.dim(), cb.dim());
    if dims.0 == 1 || dims.1 == 1 {
        return Ok(CompatVerdict {
            compatible: true,
            reason: "one strong core is K, so the other extension is a common extension".into(),
            witness: None,
            idempotents: 0,
            core_dims: dims,
        });
    }
    if !a.base().is_finite() {
        return match (constant_descent(a)?, constant_descent(b)?) {
            (Some(a0), Some(b0)) => {
                let mut v = compatible(&a0, &b0)?;
                v.reason = format!("{} (decided over the constant field)", v.reason);
                v.core_dims = dims;
                Ok(v)
            }
            _ => Err(Error::Unsupported(
                "compatibility over an infinite base needs a trivial core or constant explicit levels".into(),
            )),
        };
    }
    let t = tensor_product(&ca.algebra, &cb.algebra)?;
    let prims = primitive_idempotents(&t)?;
    let one = t.one();
    for p in &prims {
        let e = &p.coords;
        let s = t.sigma(&t.sub(&one, e));
        if t.is_zero(&t.mul(&s, e)) {
            return Ok(CompatVerdict {
                compatible: true,
                reason: "the ideal generated by 1 - e is sigma-stable with sigma-field quotient".into(),
                witness: Some(t.format_elem(e)),
                idempotents: prims.len(),
                core_dims: dims,
            });
        }
    }
    Ok(CompatVerdict {
        compatible: false,
        reason: format!("none of the {} primitive idempotents of the core tensor product is sigma-stable", prims.len()),
        witness: None,
        idempotents: prims.len(),
        core_dims: dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::generate::examples;

    #[test]
    fn f9_with_itself() {
        let a = examples::f9_over_f3();
        let v = compatible(&a, &a).unwrap();
        assert!(v.compatible);
        assert_eq!(v.idempotents, 2);
    }

    #[test]
    fn frobenius_structures_on_f4() {
        // F4 with sigma = Frobenius against F4 with sigma = identity: F2^(2k) never has both
        let a = examples::gf2_tower(2, 1);
        let b = examples::gf2_tower(2, 0);
        assert!(!compatible(&a, &b).unwrap().compatible);
        assert!(compatible(&a, &a).unwrap().compatible);
        assert!(compatible(&b, &b).unwrap().compatible);
    }

    #[test]
    fn radicial_is_compatible_with_everything() {
        let r = examples::radicial_square_root(5);
        let c = examples::constant_over_univariate(5, 1);
        assert!(compatible(&r, &c).unwrap().compatible);
    }
}
