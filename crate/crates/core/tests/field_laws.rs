//! Properties of difference fields and univariate polynomials.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigma_etale::io::field_from_str;
use sigma_etale::poly::{factor, poly_gcd, Poly};
use sigma_etale::DifferenceField;

const FIELDS: &[&str] = &["Q", "F5", "F2^3:frob1", "F3^2:frob1", "F7^2", "F5(t_i)", "F5(t):t^2", "F3(t):t^3", "Q(t):t+1"];

fn field(i: usize) -> DifferenceField {
    field_from_str(FIELDS[i % FIELDS.len()]).unwrap()
}

/// Euclid over multivariate or characteristic-0 function fields has fast coefficient growth.
fn degree_cap(k: &DifferenceField) -> usize {
    if k.is_finite() || (k.is_univariate() && k.characteristic() > 0) {
        4
    } else {
        2
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sigma_is_a_ring_endomorphism(i in 0usize..9, seed in any::<u64>()) {
        let k = field(i);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (k.random(&mut r), k.random(&mut r));
        prop_assert_eq!(k.sigma(&k.add(&a, &b)), k.add(&k.sigma(&a), &k.sigma(&b)));
        prop_assert_eq!(k.sigma(&k.mul(&a, &b)), k.mul(&k.sigma(&a), &k.sigma(&b)));
        prop_assert!(k.is_one(&k.sigma(&k.one())));
    }

    #[test]
    fn arithmetic_results_are_canonical(i in 0usize..9, seed in any::<u64>()) {
        let k = field(i);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (k.random(&mut r), k.random_nonzero(&mut r));
        for x in [k.add(&a, &b), k.mul(&a, &b), k.div(&a, &b).unwrap(), k.sigma(&a)] {
            prop_assert!(k.is_canonical(&x));
            prop_assert_eq!(k.canonicalize(&k.canonicalize(&x)), x.clone());
        }
        prop_assert!(k.is_one(&k.mul(&b, &k.inv(&b).unwrap())));
    }

    #[test]
    fn finite_sigma_is_bijective_with_finite_orbits(i in 1usize..5, seed in any::<u64>()) {
        let k = field(i);
        let ff = k.finite_field().unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random(&mut r);
        let mut x = k.sigma(&a);
        let mut steps = 1;
        while x != a && steps <= ff.n {
            x = k.sigma(&x);
            steps += 1;
        }
        prop_assert!(steps <= ff.n, "orbit longer than the degree");
        prop_assert_eq!(k.sigma(&k.sigma_inv(&a).unwrap()), a);
    }

    #[test]
    fn twist_preserves_separability(i in 1usize..9, seed in any::<u64>(), d in 1usize..5) {
        let k = field(i);
        let d = d.min(degree_cap(&k));
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut c: Vec<_> = (0..d).map(|_| k.random(&mut r)).collect();
        c.push(k.one());
        let f = Poly::new(&k, c);
        prop_assert_eq!(f.is_separable().unwrap(), f.sigma_twist().is_separable().unwrap());
    }

    #[test]
    fn gcd_commutes_with_twist(i in 1usize..9, seed in any::<u64>()) {
        let k = field(i);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_poly = |d: usize| Poly::new(&k, (0..=d).map(|_| k.random(&mut r)).collect());
        let cap = degree_cap(&k);
        let (f, g, h) = (rand_poly(cap - 1), rand_poly(cap / 2), rand_poly(1));
        let (f, g) = (f.mul(&h), g.mul(&h));
        let lhs = poly_gcd(&f, &g).unwrap().sigma_twist();
        let rhs = poly_gcd(&f.sigma_twist(), &g.sigma_twist()).unwrap();
        prop_assert_eq!(lhs.monic(), rhs.monic());
        let a = poly_gcd(&poly_gcd(&f, &g).unwrap(), &h).unwrap();
        let b = poly_gcd(&f, &poly_gcd(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(a.monic(), b.monic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn factorization_round_trip(p in prop::sample::select(vec![2u64, 3, 5]), coeffs in prop::collection::vec(0u64..5, 1..=9)) {
        let k = DifferenceField::prime(p, 0).unwrap();
        let f = Poly::new(&k, coeffs.iter().map(|&c| k.from_u64(c % p)).collect());
        prop_assume!(f.deg().unwrap_or(0) >= 1);
        let fl = factor::factor_over_finite_field(&f).unwrap();
        prop_assert_eq!(fl.expand(&k), f);
        for (g, _) in &fl.factors {
            prop_assert!(factor::is_irreducible(g).unwrap());
            prop_assert!(k.is_one(g.lc().unwrap()));
        }
    }
}

#[test]
fn known_factorizations() {
    let k = DifferenceField::prime(5, 0).unwrap();
    let f = Poly::parse(&k, "x^4 - 1").unwrap();
    let fl = factor::factor_over_finite_field(&f).unwrap();
    assert_eq!(fl.factors.len(), 4);
    assert!(fl.factors.iter().all(|(g, m)| g.degree() == 1 && *m == 1));
    let k2 = DifferenceField::prime(2, 0).unwrap();
    assert!(factor::is_irreducible(&Poly::parse(&k2, "x^4 + x + 1").unwrap()).unwrap());
    assert!(!factor::is_irreducible(&Poly::parse(&k2, "x^4 + x^2 + 1").unwrap()).unwrap());
}
