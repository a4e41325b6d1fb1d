//! Shipped towers and seeded random finite separable towers.

use super::{FamilySpec, LevelSpec, TowerExtension, TowerSpec};
use crate::exactfield::{DifferenceField, Scalar};
use crate::poly::{factor, Poly};
use rand::seq::SliceRandom;
use rand::Rng;

/// Coefficients (low degree first, integers mod p) as an expression in x.
pub fn poly_expr(c: &[u64]) -> String {
    let mut parts = Vec::new();
    for (e, &v) in c.iter().enumerate().rev() {
        if v == 0 {
            continue;
        }
        let m = match e {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{e}"),
        };
        parts.push(match (v, m.is_empty()) {
            (_, true) => v.to_string(),
            (1, false) => m,
            _ => format!("{v}*{m}"),
        });
    }
    parts.join(" + ")
}

fn level(name: &str, minpoly: &str, sigma: &str) -> LevelSpec {
    LevelSpec { name: name.into(), minpoly: minpoly.into(), sigma: sigma.into() }
}

fn family(name: &str, minpoly: &str) -> FamilySpec {
    FamilySpec { name: name.into(), minpoly: minpoly.into(), start: 0 }
}

fn make(base: DifferenceField, levels: Vec<LevelSpec>, families: Vec<FamilySpec>) -> TowerExtension {
    TowerExtension::make(TowerSpec { base, levels, families }).expect("shipped tower")
}

/// Fixed towers used by tests, suites and the CLI gallery.
pub mod examples {
    use super::*;

    pub fn shift(p: u64) -> DifferenceField {
        DifferenceField::shift(&DifferenceField::prime(p, 0).unwrap()).unwrap()
    }

    /// F_p(t) with sigma(t) = t^2.
    pub fn squaring(p: u64) -> DifferenceField {
        let k0 = DifferenceField::prime(p, 0).unwrap();
        let c = |v: i64| k0.from_i64(v);
        DifferenceField::rational_function(&k0, vec![c(0), c(0), c(1)], vec![c(1)]).unwrap()
    }

    /// F_9 | F_3 with sigma(alpha) = alpha^3.
    pub fn f9_over_f3() -> TowerExtension {
        make(DifferenceField::prime(3, 0).unwrap(), vec![level("alpha", "x^2 + 1", "alpha^3")], vec![])
    }

    /// F_{2^n} | F_2 (n = 2 or 4) with sigma(alpha) = alpha^(2^m).
    pub fn gf2_tower(n: usize, m: u32) -> TowerExtension {
        let f = match n {
            2 => "x^2 + x + 1",
            4 => "x^4 + x + 1",
            _ => panic!("degree 2 or 4"),
        };
        make(DifferenceField::prime(2, 0).unwrap(), vec![level("alpha", f, &format!("alpha^{}", 1u64 << m))], vec![])
    }

    /// K<a> with a_i^r = t_i over F_p(t_0, t_1, ...).
    pub fn radical(p: u64, r: usize) -> TowerExtension {
        make(shift(p), vec![], vec![family("a", &format!("x^{r} - t0"))])
    }

    /// a_i^2 = t_i and c_i^2 = a_i over F_5(t_0, t_1, ...).
    pub fn radical_stack() -> TowerExtension {
        make(shift(5), vec![], vec![family("a", "x^2 - t0"), family("c", "x^2 - a0")])
    }

    /// A constant level alpha^2 = 2 with sigma(alpha) = -alpha below the radical family.
    pub fn corrupted() -> TowerExtension {
        make(shift(5), vec![level("alpha", "x^2 - 2", "-alpha")], vec![family("a", "x^2 - t0")])
    }

    /// b^2 = t with sigma(b) = t over F_p(t), sigma(t) = t^2: sigma-radicial over K.
    pub fn radicial_square_root(p: u64) -> TowerExtension {
        make(squaring(p), vec![level("b", "x^2 - t", "t")], vec![])
    }

    /// F_{p^2}(t) over F_p(t), sigma(t) = t^2, with sigma(alpha) = alpha^(p^m).
    pub fn constant_over_univariate(p: u64, m: u32) -> TowerExtension {
        let f = poly_expr(&factor::irreducible_of_degree(p, 2).unwrap());
        make(squaring(p), vec![level("alpha", &f, &format!("alpha^{}", p.pow(m)))], vec![])
    }

    /// Named shipped towers.
    pub fn by_name(name: &str) -> Option<TowerExtension> {
        Some(match name {
            "f9" => f9_over_f3(),
            "radical2" => radical(5, 2),
            "radical3" => radical(7, 3),
            "stack" => radical_stack(),
            "corrupted" => corrupted(),
            "radicial" => radicial_square_root(5),
            _ => return None,
        })
    }

    pub const NAMES: &[&str] = &["f9", "radical2", "radical3", "stack", "corrupted", "radicial"];
}

fn random_irreducible<R: Rng>(rng: &mut R, p: u64, d: usize) -> Vec<u64> {
    let k = DifferenceField::prime(p, 0).unwrap();
    loop {
        let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
        c.push(1);
        let f = Poly::new(&k, c.iter().map(|&v| k.from_u64(v)).collect::<Vec<Scalar>>());
        if factor::is_irreducible(&f).unwrap() {
            return c;
        }
    }
}

/// Constant levels alpha (degree d1) and optionally beta (coprime degree d2) with Frobenius-power sigma.
fn constant_levels<R: Rng>(rng: &mut R, p: u64, two: bool) -> Vec<LevelSpec> {
    let (d1, d2) = *[(2usize, 3usize), (3, 2), (2, 1), (3, 1), (4, 1)].choose(rng).unwrap();
    let mut out = Vec::new();
    let m1 = rng.gen_range(0..d1) as u32;
    out.push(level("alpha", &poly_expr(&random_irreducible(rng, p, d1)), &format!("alpha^{}", p.pow(m1))));
    if two && d2 > 1 {
        let m2 = rng.gen_range(0..d2) as u32;
        out.push(level("beta", &poly_expr(&random_irreducible(rng, p, d2)), &format!("beta^{}", p.pow(m2))));
    }
    out
}

/// A finite separable tower over one of F_p, F_5(t_0, ...), F_p(t) with sigma(t) = t^2.
pub fn random_finite_tower<R: Rng>(rng: &mut R) -> TowerExtension {
    match rng.gen_range(0..3) {
        0 => {
            let p = *[2u64, 3, 5].choose(rng).unwrap();
            let two = rng.gen_bool(0.5);
            make(DifferenceField::prime(p, 0).unwrap(), constant_levels(rng, p, two), vec![])
        }
        1 => {
            let two = rng.gen_bool(0.5);
            make(examples::shift(5), constant_levels(rng, 5, two), vec![])
        }
        _ => {
            let p = *[5u64, 7].choose(rng).unwrap();
            let mut levels = Vec::new();
            if rng.gen_bool(0.5) {
                levels = constant_levels(rng, p, false);
                levels.truncate(1);
            }
            let rs: Vec<usize> = [2usize, 3, 4].into_iter().filter(|r| p % *r as u64 != 0).collect();
            let r = *rs.choose(rng).unwrap();
            let k0 = DifferenceField::prime(p, 0).unwrap();
            let roots: Vec<u64> = (1..p).filter(|&z| k0.is_one(&k0.pow(&k0.from_u64(z), r as u64))).collect();
            let z = *roots.choose(rng).unwrap();
            let sigma = if r == 2 && rng.gen_bool(0.5) {
                // sigma(b) = +-t: radicial
                if rng.gen_bool(0.5) { "t".to_string() } else { "-t".to_string() }
            } else {
                format!("{z}*b^2")
            };
            levels.push(level("b", &format!("x^{r} - t"), &sigma));
            make(examples::squaring(p), levels, vec![])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shipped_towers_build() {
        for n in examples::NAMES {
            let t = examples::by_name(n).unwrap();
            assert!(t.certified(), "{n}");
        }
        for m in 0..4 {
            assert!(examples::gf2_tower(4, m).certified());
        }
    }

    #[test]
    fn random_towers_build() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let t = random_finite_tower(&mut rng);
            assert!(t.is_finite());
        }
    }

    #[test]
    fn expressions() {
        assert_eq!(poly_expr(&[1, 1, 0, 0, 1]), "x^4 + x + 1");
        assert_eq!(poly_expr(&[2, 0, 3]), "3*x^2 + 2");
    }
}
