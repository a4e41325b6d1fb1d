//! Properties of finite sigma-algebras, predicates and strong cores on generated instances.

mod common;

use proptest::prelude::*;
use sigma_etale::findiff::constructions::{flatten_to_prime, sigma_subalgebra_generated, tensor_product, FieldEmbedding};
use sigma_etale::findiff::generate::Generator;
use sigma_etale::findiff::idempotents::frobenius_matrix;
use sigma_etale::findiff::predicates::{psi_kernel, twist_and_psi};
use sigma_etale::findiff::{
    base_change, is_etale, is_sigma_reduced, is_sigma_separable, is_strongly_sigma_etale, primitive_idempotents, strong_core,
    FinSigmaAlgebra,
};
use sigma_etale::linalg::{self, Subspace};
use sigma_etale::DifferenceField;

fn kron_span(k: &DifferenceField, a: &Subspace, b: &Subspace) -> Subspace {
    let rows: Vec<_> = a
        .rows
        .iter()
        .flat_map(|x| b.rows.iter().map(move |y| x.iter().flat_map(|u| y.iter().map(move |v| k.mul(u, v))).collect::<Vec<_>>()))
        .collect();
    Subspace::span(k, a.n * b.n, &rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_algebras_validate(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 5);
        prop_assert!(a.validate().ok());
    }

    #[test]
    fn independence_injectivity_and_reducedness_agree(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 4);
        let (_, psi) = twist_and_psi(&a).unwrap();
        let v = psi_kernel(&psi).is_empty();
        prop_assert_eq!(is_sigma_separable(&a), v);
        prop_assert_eq!(is_sigma_reduced(&a), v);
        if let Some(b) = common::sigma_reduced_by_enumeration(&a, 1 << 14) {
            prop_assert_eq!(b, v);
        }
    }

    #[test]
    fn frobenius_separable_iff_etale(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 4);
        let f = FinSigmaAlgebra::new(&k, a.struct_consts.clone(), a.unit.clone(), frobenius_matrix(&a)).unwrap();
        prop_assert_eq!(is_sigma_separable(&f), is_etale(&f));
    }

    #[test]
    fn tensor_products_preserve_predicates(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let (a, b) = (g.algebra(&k, 3), g.algebra(&k, 3));
        let t = tensor_product(&a, &b).unwrap();
        if is_sigma_separable(&a) && is_sigma_separable(&b) {
            prop_assert!(is_sigma_separable(&t));
        }
        if is_strongly_sigma_etale(&a) && is_strongly_sigma_etale(&b) {
            prop_assert!(is_strongly_sigma_etale(&t));
        }
    }

    #[test]
    fn generated_subalgebras_stay_strongly_etale(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.strongly_etale(&k, 5);
        let x = g.element(&a);
        let (s, incl) = sigma_subalgebra_generated(&a, &[x]).unwrap();
        prop_assert!(incl.validate().ok());
        prop_assert!(is_strongly_sigma_etale(&s));
    }

    #[test]
    fn sigma_permutes_primitive_idempotents(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.strongly_etale(&k, 5);
        let es: Vec<_> = primitive_idempotents(&a).unwrap().into_iter().map(|e| e.coords).collect();
        let images: Vec<usize> = es.iter().map(|e| es.iter().position(|f| *f == a.sigma(e)).expect("sigma(e) primitive")).collect();
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), es.len());
        for e in &es {
            prop_assert!(common::is_periodic(&a, e, es.len()));
        }
    }

    #[test]
    fn flattening_over_a_finite_extension(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let kk = g.finite_base(if seed % 2 == 0 { 2 } else { 3 }, 3);
        let a = g.strongly_etale(&kk, 3);
        let flat = flatten_to_prime(&a).unwrap();
        prop_assert_eq!(flat.dim, a.dim * kk.finite_field().unwrap().n);
        prop_assert!(is_strongly_sigma_etale(&flat));
    }

    #[test]
    fn strong_core_is_the_periodic_idempotent_span_after_splitting(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 4);
        let core = strong_core(&a).unwrap();
        prop_assert!(core.complete);
        let emb = FieldEmbedding::finite_extension(&k, core.splitting_degree).unwrap();
        let big = base_change(&a, &emb).unwrap();
        let Some((span, _)) = common::periodic_idempotent_span(&big, 100_000) else { return Ok(()); };
        let rows: Vec<_> = core.subspace.rows.iter().map(|r| r.iter().map(|c| emb.map(c)).collect::<Vec<_>>()).collect();
        prop_assert_eq!(Subspace::span(&emb.big, a.dim, &rows).rows, span.rows);
    }

    #[test]
    fn strong_core_of_tensor_product(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let (a, b) = (g.algebra(&k, 3), g.algebra(&k, 3));
        let lhs = strong_core(&tensor_product(&a, &b).unwrap()).unwrap().subspace;
        let rhs = kron_span(&k, &strong_core(&a).unwrap().subspace, &strong_core(&b).unwrap().subspace);
        prop_assert_eq!(lhs.rows, rhs.rows);
    }

    #[test]
    fn morphisms_map_cores_into_cores(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 4);
        let f = g.morphism(&a, 8).unwrap();
        prop_assert!(f.validate().ok());
        let src = strong_core(&f.source).unwrap().subspace;
        let dst = strong_core(&f.target).unwrap().subspace;
        prop_assert!(f.image(&src).is_subspace_of(&k, &dst));
    }

    #[test]
    fn strong_core_is_idempotent(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 5);
        let c = strong_core(&a).unwrap();
        prop_assert!(is_strongly_sigma_etale(&c.algebra));
        prop_assert_eq!(strong_core(&c.algebra).unwrap().dim(), c.algebra.dim);
    }

    #[test]
    fn base_change_commutes_with_strong_core(seed in any::<u64>(), m in 2usize..=4) {
        let mut g = Generator::new(seed);
        let k = g.prime_base();
        let a = g.algebra(&k, 4);
        let emb = FieldEmbedding::finite_extension(&k, m).unwrap();
        let lhs = strong_core(&base_change(&a, &emb).unwrap()).unwrap().subspace;
        let rows: Vec<_> = strong_core(&a).unwrap().subspace.rows.iter().map(|r| r.iter().map(|c| emb.map(c)).collect::<Vec<_>>()).collect();
        prop_assert_eq!(lhs.rows, Subspace::span(&emb.big, a.dim, &rows).rows);
    }
}

#[test]
fn swap_is_strongly_etale_and_its_own_core() {
    let k = DifferenceField::prime(5, 0).unwrap();
    let a = FinSigmaAlgebra::split(&k, &[1, 0]);
    assert!(is_strongly_sigma_etale(&a));
    assert_eq!(strong_core(&a).unwrap().dim(), 2);
    let c = FinSigmaAlgebra::from_map(&k, &[0, 0]);
    assert!(!is_sigma_reduced(&c));
    assert_eq!(strong_core(&c).unwrap().dim(), 1);
    assert_eq!(linalg::rank(&k, &c.sigma_matrix), 1);
}
