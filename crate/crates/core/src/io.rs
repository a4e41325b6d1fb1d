//! JSON forms of fields, elements and finite-dimensional difference algebras.

use crate::error::{Error, Result};
use crate::exactfield::{DifferenceField, FieldDescriptor, Scalar};
use crate::findiff::{Elem, FinSigmaAlgebra};
use crate::poly::{factor, Poly};
use serde_json::{json, Value};

fn field_err(path: &str, msg: &str) -> Error {
    Error::Input(format!("{path}: {msg}"))
}

fn get_u64(v: &Value, key: &str, path: &str) -> Result<u64> {
    v.get(key).and_then(Value::as_u64).ok_or_else(|| field_err(&format!("{path}.{key}"), "expected a nonnegative integer"))
}

/// `{"kind": "finite", "p": 5, "degree": 2, "frobenius_power": 1}`, `{"kind": "rationals"}`,
/// `{"kind": "shift", "constants": {...}, "min_index": 0}`,
/// `{"kind": "rational_function", "constants": {...}, "sigma": "t^2"}`, or a short string
/// such as `"F5"`, `"F3^2"`, `"Q"`.
pub fn field_from_json(v: &Value) -> Result<DifferenceField> {
    field_at(v, "base")
}

fn field_at(v: &Value, path: &str) -> Result<DifferenceField> {
    if let Some(s) = v.as_str() {
        return field_from_str(s);
    }
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| field_err(path, "missing string field 'kind'"))?;
    match kind {
        "rationals" => Ok(DifferenceField::rationals()),
        "finite" => {
            let p = get_u64(v, "p", path)?;
            let m = v.get("frobenius_power").and_then(Value::as_u64).unwrap_or(0) as u32;
            let defpoly = match v.get("defpoly") {
                Some(d) => d
                    .as_array()
                    .ok_or_else(|| field_err(&format!("{path}.defpoly"), "expected an array of integers"))?
                    .iter()
                    .map(|c| c.as_u64().ok_or_else(|| field_err(&format!("{path}.defpoly"), "expected integers")))
                    .collect::<Result<Vec<u64>>>()?,
                None => {
                    let n = v.get("degree").and_then(Value::as_u64).unwrap_or(1) as usize;
                    if !crate::exactfield::is_prime(p) {
                        return Err(field_err(&format!("{path}.p"), "not a prime"));
                    }
                    factor::irreducible_of_degree(p, n)?
                }
            };
            DifferenceField::finite(p, defpoly, m)
        }
        "shift" => {
            let k0 = field_at(v.get("constants").ok_or_else(|| field_err(path, "missing field 'constants'"))?, &format!("{path}.constants"))?;
            let mi = v.get("min_index").and_then(Value::as_i64).unwrap_or(0) as i32;
            DifferenceField::shift_from(&k0, mi)
        }
        "rational_function" => {
            let k0 = field_at(v.get("constants").ok_or_else(|| field_err(path, "missing field 'constants'"))?, &format!("{path}.constants"))?;
            let s = v.get("sigma").and_then(Value::as_str).ok_or_else(|| field_err(path, "missing string field 'sigma'"))?;
            rational_function_from_str(&k0, s)
        }
        other => Err(field_err(&format!("{path}.kind"), &format!("unknown field kind '{other}'"))),
    }
}

/// k0(t) with sigma(t) given by an expression in t.
pub fn rational_function_from_str(k0: &DifferenceField, s: &str) -> Result<DifferenceField> {
    let id = DifferenceField::rational_function(k0, vec![k0.zero(), k0.one()], vec![k0.one()])?;
    let g = id.parse(s)?;
    let r = id.ratfunc(&g);
    let coeffs = |p: &crate::exactfield::MPoly| -> Vec<Scalar> {
        (0..=p.degree_in(0)).map(|i| p.coeff_in(0, i).as_constant().unwrap_or_else(|| k0.zero())).collect()
    };
    DifferenceField::rational_function(k0, coeffs(&r.num), coeffs(&r.den))
}

/// `Q`, `F5`, `F2^4`, `F5^2:frob1`, `F5(t_i)`, `F5(t):t^2`.
pub fn field_from_str(s: &str) -> Result<DifferenceField> {
    let s = s.trim();
    if s == "Q" {
        return Ok(DifferenceField::rationals());
    }
    if let Some(rest) = s.strip_suffix("(t_i)") {
        return DifferenceField::shift(&field_from_str(rest)?);
    }
    if let Some(pos) = s.find("(t):") {
        return rational_function_from_str(&field_from_str(&s[..pos])?, &s[pos + 4..]);
    }
    let (body, m) = match s.split_once(":frob") {
        Some((b, m)) => (b, m.parse::<u32>().map_err(|_| Error::Input(format!("bad Frobenius power in '{s}'")))?),
        None => (s, 0),
    };
    let body = body.strip_prefix('F').ok_or_else(|| Error::Input(format!("unrecognized field '{s}'")))?;
    let (p, n) = match body.split_once('^') {
        Some((p, n)) => (p, n),
        None => (body, "1"),
    };
    let p: u64 = p.parse().map_err(|_| Error::Input(format!("bad characteristic in '{s}'")))?;
    let n: usize = n.parse().map_err(|_| Error::Input(format!("bad degree in '{s}'")))?;
    if !crate::exactfield::is_prime(p) {
        return Err(Error::Input(format!("{p} is not prime")));
    }
    DifferenceField::finite(p, factor::irreducible_of_degree(p, n)?, m)
}

pub fn field_to_json(k: &DifferenceField) -> Value {
    desc_to_json(k.descriptor())
}

fn desc_to_json(d: &FieldDescriptor) -> Value {
    match d {
        FieldDescriptor::Q => json!({"kind": "rationals"}),
        FieldDescriptor::Fq { p, defpoly, frobenius_power } => {
            json!({"kind": "finite", "p": p, "defpoly": defpoly, "frobenius_power": frobenius_power})
        }
        FieldDescriptor::Shift { constants, min_index } => {
            json!({"kind": "shift", "constants": desc_to_json(constants), "min_index": min_index})
        }
        FieldDescriptor::Qt { constants, .. } => {
            let k = DifferenceField::make(d).expect("descriptor of a constructed field");
            let (n, dd, _) = k.sigma_t().unwrap();
            let t = k.from_poly(n, dd);
            json!({"kind": "rational_function", "constants": desc_to_json(constants), "sigma": k.format(&t)})
        }
    }
}

pub fn scalar_from_json(k: &DifferenceField, v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => k.parse(s).map_err(|e| field_err(path, &e.to_string())),
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| field_err(path, "expected an integer"))?;
            Ok(k.from_i64(i))
        }
        _ => Err(field_err(path, "expected a field element (string or integer)")),
    }
}

pub fn elem_from_json(k: &DifferenceField, v: &Value, n: usize, path: &str) -> Result<Elem> {
    let a = v.as_array().ok_or_else(|| field_err(path, "expected an array"))?;
    if a.len() != n {
        return Err(field_err(path, &format!("expected {n} entries, found {}", a.len())));
    }
    a.iter().enumerate().map(|(i, x)| scalar_from_json(k, x, &format!("{path}[{i}]"))).collect()
}

pub fn elem_to_json(k: &DifferenceField, x: &[Scalar]) -> Value {
    Value::Array(x.iter().map(|c| Value::String(k.format(c))).collect())
}

/// Algebra JSON: explicit structure constants, or one of the shorthand forms
/// `{"monogenic": {"f": "y^2-1", "sigma": "y"}}`, `{"split": [1, 0]}`, `{"from_map": [0, 0]}`.
pub fn algebra_from_json(v: &Value) -> Result<FinSigmaAlgebra> {
    let k = field_at(v.get("base").ok_or_else(|| field_err("algebra", "missing field 'base'"))?, "algebra.base")?;
    let a = if let Some(m) = v.get("monogenic") {
        let f = m.get("f").and_then(Value::as_str).ok_or_else(|| field_err("algebra.monogenic.f", "expected a string"))?;
        let h = m.get("sigma").and_then(Value::as_str).ok_or_else(|| field_err("algebra.monogenic.sigma", "expected a string"))?;
        let f = Poly::parse(&k, &f.replace('y', "x")).map_err(|e| field_err("algebra.monogenic.f", &e.to_string()))?;
        let h = Poly::parse(&k, &h.replace('y', "x")).map_err(|e| field_err("algebra.monogenic.sigma", &e.to_string()))?;
        FinSigmaAlgebra::monogenic(&f, &h)?
    } else if let Some(p) = v.get("split") {
        FinSigmaAlgebra::split(&k, &index_list(p, "algebra.split")?)
    } else if let Some(g) = v.get("from_map") {
        FinSigmaAlgebra::from_map(&k, &index_list(g, "algebra.from_map")?)
    } else {
        let n = get_u64(v, "dim", "algebra")? as usize;
        let sc = v.get("struct_consts").and_then(Value::as_array).ok_or_else(|| field_err("algebra.struct_consts", "expected an array"))?;
        if sc.len() != n {
            return Err(field_err("algebra.struct_consts", &format!("expected {n} rows")));
        }
        let mut c = Vec::with_capacity(n);
        for (i, row) in sc.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| field_err(&format!("algebra.struct_consts[{i}]"), "expected an array"))?;
            if row.len() != n {
                return Err(field_err(&format!("algebra.struct_consts[{i}]"), &format!("expected {n} entries")));
            }
            c.push(
                row.iter()
                    .enumerate()
                    .map(|(j, x)| elem_from_json(&k, x, n, &format!("algebra.struct_consts[{i}][{j}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let unit = elem_from_json(&k, v.get("unit").ok_or_else(|| field_err("algebra", "missing field 'unit'"))?, n, "algebra.unit")?;
        let s = v.get("sigma").and_then(Value::as_array).ok_or_else(|| field_err("algebra.sigma", "expected an array of rows"))?;
        if s.len() != n {
            return Err(field_err("algebra.sigma", &format!("expected {n} rows")));
        }
        let s = s.iter().enumerate().map(|(i, r)| elem_from_json(&k, r, n, &format!("algebra.sigma[{i}]"))).collect::<Result<Vec<_>>>()?;
        FinSigmaAlgebra::new(&k, c, unit, s)?
    };
    let a = match v.get("splitting") {
        Some(Value::Array(es)) => {
            let n = a.dim;
            let es = es.iter().enumerate().map(|(i, e)| elem_from_json(&k, e, n, &format!("algebra.splitting[{i}]"))).collect::<Result<Vec<_>>>()?;
            a.with_splitting(es)
        }
        Some(_) => return Err(field_err("algebra.splitting", "expected an array of elements")),
        None => a,
    };
    let rep = a.validate();
    if let Some(v) = rep.violations.first() {
        return Err(Error::Input(format!("algebra: {} fails ({})", v.law, v.witness)));
    }
    Ok(a)
}

fn index_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    let a = v.as_array().ok_or_else(|| field_err(path, "expected an array of indices"))?;
    let n = a.len();
    let out: Vec<usize> = a
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).filter(|&u| u < n).ok_or_else(|| field_err(path, "indices must be < length")))
        .collect::<Result<_>>()?;
    if n == 0 {
        return Err(field_err(path, "must be nonempty"));
    }
    Ok(out)
}

pub fn algebra_to_json(a: &FinSigmaAlgebra) -> Value {
    let k = &a.base;
    let mut v = json!({
        "base": field_to_json(k),
        "dim": a.dim,
        "struct_consts": a.struct_consts.iter().map(|r| r.iter().map(|c| elem_to_json(k, c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "unit": elem_to_json(k, &a.unit),
        "sigma": a.sigma_matrix.iter().map(|r| elem_to_json(k, r)).collect::<Vec<_>>(),
    });
    if let Some(es) = &a.splitting {
        v["splitting"] = Value::Array(es.iter().map(|e| elem_to_json(k, e)).collect());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::findiff::generate::Generator;

    #[test]
    fn field_round_trip() {
        for s in ["Q", "F5", "F2^4:frob1", "F5(t_i)", "F5(t):t^2"] {
            let k = field_from_str(s).unwrap();
            let back = field_from_json(&field_to_json(&k)).unwrap();
            assert_eq!(k, back, "{s}");
        }
    }

    #[test]
    fn algebra_round_trip() {
        let mut g = Generator::new(1);
        for _ in 0..10 {
            let k = g.finite_base(3, 2);
            let a = g.algebra(&k, 3);
            let b = algebra_from_json(&algebra_to_json(&a)).unwrap();
            assert_eq!(a, b);
        }
    }
}
