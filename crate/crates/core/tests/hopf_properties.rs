//! The strong core of a sigma-Hopf algebra is a sigma-Hopf subalgebra.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigma_etale::hopf::gallery::{self, Group};
use sigma_etale::hopf::{hopf_validate, strong_core_is_hopf_subalgebra, SigmaHopf};
use sigma_etale::towers::Verdict;
use sigma_etale::DifferenceField;

fn verified(h: &SigmaHopf, level: u32) -> Result<(), String> {
    let r = hopf_validate(h).map_err(|e| e.to_string())?;
    if let Some(c) = r.failure() {
        return Err(format!("invalid: {}", c.law));
    }
    let c = strong_core_is_hopf_subalgebra(h, level).map_err(|e| e.to_string())?;
    match (c.verdict, c.core_exact) {
        (Verdict::Verified, true) => Ok(()),
        (v, exact) => Err(format!("{v:?} (exact {exact}): {}", c.witness.unwrap_or(c.message))),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_carriers_have_hopf_cores(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7]), bijective in any::<bool>()) {
        let k = DifferenceField::prime(p, 0).unwrap();
        let (name, h) = gallery::random_carrier_with(&mut ChaCha8Rng::seed_from_u64(seed), &k, bijective).unwrap();
        prop_assert!(verified(&h, 0).is_ok(), "{}: {:?}", name, verified(&h, 0));
    }

    #[test]
    fn json_round_trip_preserves_the_verdict(seed in any::<u64>()) {
        let k = DifferenceField::prime(5, 0).unwrap();
        let (_, h) = gallery::random_carrier(&mut ChaCha8Rng::seed_from_u64(seed), &k).unwrap();
        let back = SigmaHopf::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), h.to_json());
        let a = serde_json::to_value(strong_core_is_hopf_subalgebra(&h, 0).unwrap()).unwrap();
        let b = serde_json::to_value(strong_core_is_hopf_subalgebra(&back, 0).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn presented_gallery_at_three_levels() {
    for p in [3u64, 5, 7] {
        let k = DifferenceField::prime(p, 0).unwrap();
        for h in [gallery::example_carrier(&k).unwrap(), gallery::group_like(&k).unwrap(), gallery::first_factor(&k).unwrap()] {
            for n in 1..=3 {
                verified(&h, n).unwrap();
            }
        }
        for (name, h) in gallery::finite_members(&k) {
            verified(&h, 0).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn laws_fail_where_expected() {
    let k = DifferenceField::prime(5, 0).unwrap();
    let r = hopf_validate(&gallery::translation_on_z2(&k)).unwrap();
    assert_eq!(r.failure().unwrap().law, "maps commute with sigma");
    let r = hopf_validate(&gallery::broken_antipode(&k).unwrap()).unwrap();
    assert_eq!(r.failure().unwrap().law, "antipode law");
    assert!(strong_core_is_hopf_subalgebra(&gallery::translation_on_z2(&k), 0).is_err());
}

#[test]
fn only_endomorphisms_induce_sigma() {
    let z4 = Group::cyclic(4);
    assert!(z4.is_endomorphism(&[0, 3, 2, 1]));
    assert!(z4.is_endomorphism(&[0, 2, 0, 2]));
    assert!(!z4.is_endomorphism(&[1, 2, 3, 0]));
    let v = Group::klein();
    assert!(v.is_endomorphism(&[0, 2, 1, 3]));
}

#[test]
fn example_separation_in_both_characteristics() {
    for p in [5u64, 7] {
        let mut last = 0;
        for n in 1..=3 {
            let r = gallery::example_core_not_hopf(p, n).unwrap();
            assert!(r.separation && r.hopf_valid, "char {p} level {n}");
            assert_eq!(r.core_is_hopf_subalgebra, Verdict::Verified);
            assert!(r.etale_union_lower_bound > last);
            last = r.etale_union_lower_bound;
        }
    }
}
