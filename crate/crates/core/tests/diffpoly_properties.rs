//! Truncation levels of presented difference algebras.

use proptest::prelude::*;
use sigma_etale::diffpoly::{examples, SigmaIdealPresentation, TruncatedQuotient};
use sigma_etale::findiff::strong_core;
use sigma_etale::hopf::union_of_etale_subalgebras_probe;
use sigma_etale::DifferenceField;

const PRESENTATIONS: &[(&[&str], &[&str])] = &[
    (&["y"], &["y0^2-1", "y1-1"]),
    (&["z"], &["z0^2-1"]),
    (&["y", "z"], &["y0^2-1", "y1-1", "z0^2-1"]),
    (&["y"], &["y0^2-y0", "y1-(1-y0)"]),
    (&["y"], &["y0^2-2", "y1-y0"]),
    (&["y"], &["y0^2-y0", "y1-y0"]),
    (&["y", "z"], &["y0^2-y0", "y1-(1-y0)", "z0^2-z0", "z1-z0"]),
];

fn quotient(i: usize, p: u64) -> TruncatedQuotient {
    let k = DifferenceField::prime(p, 0).unwrap();
    let (vars, gens) = PRESENTATIONS[i];
    TruncatedQuotient::new(SigmaIdealPresentation::parse(&k, vars, gens).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cores_are_coherent_across_levels(i in 0usize..7, p in prop::sample::select(vec![3u64, 5, 7]), n in 0u32..3) {
        let tq = quotient(i, p);
        let k = tq.base().clone();
        let lo = tq.strong_core_truncated(n).unwrap();
        let hi = tq.strong_core_truncated(n + 1).unwrap();
        for r in &lo.subspace.rows {
            prop_assert!(hi.subspace.contains(&k, &tq.embed(n, n + 1, r)));
        }
        prop_assert!(lo.dim() <= hi.dim());
    }

    #[test]
    fn stable_levels_match_the_finite_core(i in 0usize..7, p in prop::sample::select(vec![3u64, 5, 7])) {
        let tq = quotient(i, p);
        prop_assume!(tq.stabilizes());
        let (b, _) = &*tq.stable_part().unwrap();
        let n = tq.stable_level() + 1;
        let c = tq.strong_core_truncated(n).unwrap();
        prop_assert!(c.exact);
        prop_assert_eq!(c.dim(), strong_core(b).unwrap().dim());
    }
}

#[test]
fn running_example_core_stays_trivial_while_etale_union_grows() {
    for p in [5u64, 7] {
        let k = DifferenceField::prime(p, 0).unwrap();
        let r = examples::r(&k).unwrap();
        let mut last = 0;
        for n in 1..=3 {
            let c = r.strong_core_truncated(n).unwrap();
            assert_eq!((c.dim(), c.exact), (1, true), "char {p} level {n}");
            let b = union_of_etale_subalgebras_probe(&r, n).unwrap().bound;
            assert!(b >= 1 << n && b > last, "char {p} level {n}: bound {b}");
            last = b;
        }
    }
}

#[test]
fn sigma_kills_the_second_idempotent_slice() {
    let k = DifferenceField::prime(5, 0).unwrap();
    let r = examples::r1(&k).unwrap();
    // e2 = (1 - y)/2 satisfies sigma(e2) = (1 - sigma(y))/2 = 0
    let e2 = r.parse_elem(1, "(1-y0)*3").unwrap();
    assert!(r.sigma_elem(1, &e2).unwrap().iter().all(|c| k.is_zero(c)));
}
