//! Limit degrees, strong cores of towers, Babbitt chains and compatibility.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigma_etale::findiff::{is_strongly_sigma_etale, strong_core};
use sigma_etale::towers::generate::{examples, random_finite_tower};
use sigma_etale::towers::{
    babbitt_verify, benign_make, compatible, core_sradicial_over_strong_core_check, limit_degree, strong_core_finite_ext,
    BabbittChain, BenignKind, TowerExtension, Verdict,
};
use sigma_etale::DifferenceField;

fn chain(steps: &[&[&str]]) -> BabbittChain {
    BabbittChain { l0: vec![], steps: steps.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect() }
}

fn non_increasing(d: &[usize]) -> bool {
    d.windows(2).all(|w| w[1] <= w[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn degree_sequences_never_increase(seed in any::<u64>()) {
        let t = random_finite_tower(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = limit_degree(&t, 4).unwrap();
        prop_assert!(non_increasing(&r.d_sequence), "{:?}", r.d_sequence);
        prop_assert_eq!(*r.d_sequence.last().unwrap(), r.value);
    }

    #[test]
    fn towers_are_radicial_over_their_strong_core(seed in any::<u64>()) {
        let t = random_finite_tower(&mut ChaCha8Rng::seed_from_u64(seed));
        let cert = core_sradicial_over_strong_core_check(&t).unwrap();
        prop_assert!(cert.verified);
        let c = &cert.core;
        prop_assert!(non_increasing(&c.chain));
        prop_assert!(is_strongly_sigma_etale(&c.algebra));
        for (j, (_, e)) in c.exponents.iter().enumerate() {
            let x = c.tower.sigma_n(&c.tower.gen(j), *e).unwrap();
            prop_assert!(c.subspace.contains(&c.tower.base, &x));
        }
    }

    #[test]
    fn chain_core_matches_idempotent_core_over_finite_bases(seed in any::<u64>()) {
        let t = random_finite_tower(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(t.base().is_finite());
        let c = strong_core_finite_ext(&t).unwrap();
        let idem = strong_core(&c.tower.as_algebra().unwrap()).unwrap();
        prop_assert_eq!(&idem.subspace.rows, &c.subspace.rows);
    }

    #[test]
    fn transforms_of_new_elements_stay_outside_the_base(p in prop::sample::select(vec![5u64, 7]), seed in any::<u64>()) {
        let t = examples::radical(p, if p == 7 { 3 } else { 2 });
        let m = t.materialize(4).unwrap();
        let a0 = m.gen_index("a0").unwrap();
        let a1 = m.gen_index("a1").unwrap();
        prop_assert_eq!(m.gens[a0].degree, m.gens[a1].degree);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = &m.base;
        let c1 = k.random_nonzero(&mut r);
        let b = m.add(&m.lift(&k.random(&mut r)), &m.scale(&c1, &m.gen(a0)));
        let mut x = b;
        for _ in 0..r.gen_range(1..4) {
            x = m.sigma(&x).unwrap();
            prop_assert!(!m.in_base(&x));
        }
    }
}

#[test]
fn benign_towers_have_galois_steps() {
    let k5 = DifferenceField::shift(&DifferenceField::prime(5, 0).unwrap()).unwrap();
    let k7 = DifferenceField::shift(&DifferenceField::prime(7, 0).unwrap()).unwrap();
    for (k, g, kind) in [(&k5, "x^2 - t0", BenignKind::Radical), (&k7, "x^3 - t0", BenignKind::Radical), (&k5, "x^2 + x + t0", BenignKind::Specialization)] {
        let t = benign_make(k, g, kind, 3).unwrap();
        let r = babbitt_verify(&t, &chain(&[&["b0"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{g}: {}", r.message);
        assert!(!r.steps[0].galois.contains("undecided"), "{g}: {}", r.steps[0].galois);
        let d = g.chars().nth(2).unwrap().to_digit(10).unwrap_or(2) as usize;
        assert_eq!(limit_degree(&t, 4).unwrap().value, d);
    }
}

#[test]
fn limit_degree_is_multiplicative_on_the_stack() {
    let s = examples::radical_stack();
    let r = babbitt_verify(&s, &chain(&[&["a0"], &["c0"]]), 3).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    let product: usize = r.steps.iter().map(|st| st.degree).product();
    assert_eq!(limit_degree(&s, 3).unwrap().value, product);
    assert_eq!(product, limit_degree(&examples::radical(5, 2), 3).unwrap().value * 2);
}

#[test]
fn corrupted_chain_names_its_witness() {
    let r = babbitt_verify(&examples::corrupted(), &chain(&[&["a0"]]), 3).unwrap();
    assert_eq!(r.verdict, Verdict::Refuted);
    assert_eq!(r.witness.as_deref(), Some("alpha"));
}

/// Common embedding of F_2(alpha) and F_2(beta) into F_{2^n} with sigma = Frob^s, by search.
fn embeds_jointly(fa: &[u64], ia: u32, fb: &[u64], ib: u32) -> bool {
    let l = num_integer::lcm(fa.len() - 1, fb.len() - 1);
    let roots = |m: &DifferenceField, f: &[u64], i: u32, s: u32| {
        m.elements().unwrap().into_iter().any(|r| {
            let v = f.iter().rev().fold(m.zero(), |acc, &c| m.add(&m.mul(&acc, &r), &m.from_u64(c)));
            m.is_zero(&v) && m.pow(&r, 1 << s) == m.pow(&r, 1 << i)
        })
    };
    (0..l as u32).any(|s| {
        let m = DifferenceField::finite(2, sigma_etale::poly::factor::irreducible_of_degree(2, l).unwrap(), s).unwrap();
        roots(&m, fa, ia, s) && roots(&m, fb, ib, s)
    })
}

#[test]
fn compatibility_over_f2_matches_search() {
    let polys = |n: usize| -> Vec<u64> { if n == 2 { vec![1, 1, 1] } else { vec![1, 1, 0, 0, 1] } };
    for (na, ia) in [(2usize, 0u32), (2, 1), (4, 0), (4, 1), (4, 2), (4, 3)] {
        for (nb, ib) in [(2usize, 0u32), (2, 1), (4, 0), (4, 1), (4, 2), (4, 3)] {
            let v = compatible(&examples::gf2_tower(na, ia), &examples::gf2_tower(nb, ib)).unwrap();
            assert_eq!(v.compatible, embeds_jointly(&polys(na), ia, &polys(nb), ib), "F{} frob^{ia} vs F{} frob^{ib}", 1 << na, 1 << nb);
        }
    }
}

#[test]
fn radicial_extensions_are_compatible_with_everything() {
    for p in [5u64, 7] {
        let rad = examples::radicial_square_root(p);
        for m in 0..2 {
            assert!(compatible(&rad, &examples::constant_over_univariate(p, m)).unwrap().compatible);
        }
    }
}

#[test]
fn tower_json_round_trip() {
    for name in examples::NAMES {
        let t = examples::by_name(name).unwrap();
        let back = TowerExtension::from_json(&t.to_json()).unwrap();
        assert_eq!(back.to_json(), t.to_json());
        let a = strong_core_finite_ext(&t).unwrap();
        let b = strong_core_finite_ext(&back).unwrap();
        assert_eq!(a.subspace.rows, b.subspace.rows);
    }
}
