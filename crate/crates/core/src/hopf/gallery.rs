//! Hopf carriers: the running example, group-like presentations, function and group algebras
//! of small abelian groups with endomorphism-induced sigma, and seeded random members.

use super::{FinHopf, SigmaHopf, TruncHopf};
use crate::diffpoly::{examples, TruncatedQuotient};
use crate::error::Result;
use crate::exactfield::DifferenceField;
use crate::findiff::{Elem, FinSigmaAlgebra};
use crate::linalg::{self, Mat};
use rand::seq::SliceRandom;
use rand::Rng;

fn presented(carrier: TruncatedQuotient, comul: &[&str], antipode: &[&str], counit: &[i64]) -> Result<SigmaHopf> {
    let k = carrier.base().clone();
    let doubled = carrier.tensor_power(&["L", "R"])?;
    let comul = comul.iter().map(|s| doubled.ring().parse(s)).collect::<Result<Vec<_>>>()?;
    let antipode = antipode.iter().map(|s| carrier.ring().parse(s)).collect::<Result<Vec<_>>>()?;
    let counit = counit.iter().map(|&c| k.from_i64(c)).collect();
    Ok(SigmaHopf::Truncated(TruncHopf::new(carrier, comul, antipode, counit)?))
}

/// R_1 (x) R_2 with y and z group-like: the product Hopf structure.
pub fn example_carrier(k: &DifferenceField) -> Result<SigmaHopf> {
    presented(examples::r(k)?, &["Ly0*Ry0", "Lz0*Rz0"], &["y0", "z0"], &[1, 1])
}

/// k{z}/[z^2 - 1] with Delta(z) = z (x) z, S(z) = z, eps(z) = 1.
pub fn group_like(k: &DifferenceField) -> Result<SigmaHopf> {
    presented(examples::r2(k)?, &["Lz0*Rz0"], &["z0"], &[1])
}

/// R_1 alone with y group-like.
pub fn first_factor(k: &DifferenceField) -> Result<SigmaHopf> {
    presented(examples::r1(k)?, &["Ly0*Ry0"], &["y0"], &[1])
}

/// The group-like structure with the antipode replaced by S(z) = 1.
pub fn broken_antipode(k: &DifferenceField) -> Result<SigmaHopf> {
    presented(examples::r2(k)?, &["Lz0*Rz0"], &["1"], &[1])
}

/// A finite abelian group on 0..n with an endomorphism phi.
#[derive(Clone, Debug)]
pub struct Group {
    pub name: String,
    pub add: Vec<Vec<usize>>,
    pub neg: Vec<usize>,
}

impl Group {
    pub fn cyclic(n: usize) -> Self {
        Group {
            name: format!("Z{n}"),
            add: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
            neg: (0..n).map(|a| (n - a) % n).collect(),
        }
    }

    /// (Z/2)^2 with (a, b) at index a + 2b.
    pub fn klein() -> Self {
        Group { name: "Z2^2".into(), add: (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect(), neg: (0..4).collect() }
    }

    pub fn order(&self) -> usize {
        self.neg.len()
    }

    pub fn is_endomorphism(&self, phi: &[usize]) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| phi[self.add[a][b]] == self.add[phi[a]][phi[b]]))
    }
}

fn unit_vec(k: &DifferenceField, n: usize, i: usize) -> Elem {
    let mut v = vec![k.zero(); n];
    v[i] = k.one();
    v
}

/// k^G with sigma the pullback along phi, Delta(d_g) = sum over a + b = g of d_a (x) d_b.
pub fn functions(k: &DifferenceField, g: &Group, phi: &[usize]) -> Result<FinHopf> {
    let n = g.order();
    let alg = FinSigmaAlgebra::from_map(k, phi);
    let comul = (0..n)
        .map(|x| {
            let mut v = vec![k.zero(); n * n];
            for a in 0..n {
                for b in 0..n {
                    if g.add[a][b] == x {
                        v[a * n + b] = k.one();
                    }
                }
            }
            v
        })
        .collect();
    let antipode = (0..n).map(|x| unit_vec(k, n, g.neg[x])).collect();
    let counit = (0..n).map(|x| if x == 0 { k.one() } else { k.zero() }).collect();
    FinHopf::new(alg, comul, antipode, counit)
}

/// k[G] with sigma(e_g) = e_phi(g) and every e_g group-like.
pub fn group_algebra(k: &DifferenceField, g: &Group, phi: &[usize]) -> Result<FinHopf> {
    let n = g.order();
    let sc = (0..n).map(|a| (0..n).map(|b| unit_vec(k, n, g.add[a][b])).collect()).collect();
    let mut s = linalg::zeros(k, n, n);
    for (x, &px) in phi.iter().enumerate() {
        s[px][x] = k.one();
    }
    let alg = FinSigmaAlgebra::new(k, sc, unit_vec(k, n, 0), s)?;
    let comul = (0..n).map(|x| unit_vec(k, n * n, x * n + x)).collect();
    let antipode = (0..n).map(|x| unit_vec(k, n, g.neg[x])).collect();
    FinHopf::new(alg, comul, antipode, vec![k.one(); n])
}

/// The factor swap (a, b) -> (b, a) of (Z/2)^2.
const KLEIN_SWAP: [usize; 4] = [0, 2, 1, 3];

/// Fixed finite members: functions and group algebra of Z/2 with sigma = id, and of (Z/2)^2
/// with sigma induced by the factor swap.
pub fn finite_members(k: &DifferenceField) -> Vec<(String, SigmaHopf)> {
    let z2 = Group::cyclic(2);
    let v = Group::klein();
    vec![
        ("functions on Z2".to_string(), functions(k, &z2, &[0, 1])),
        ("group algebra of Z2".to_string(), group_algebra(k, &z2, &[0, 1])),
        ("functions on Z2^2, factor swap".to_string(), functions(k, &v, &KLEIN_SWAP)),
        ("group algebra of Z2^2, factor swap".to_string(), group_algebra(k, &v, &KLEIN_SWAP)),
    ]
    .into_iter()
    .map(|(n, h)| (n, SigmaHopf::Finite(h.expect("fixed member"))))
    .collect()
}

/// k x k with sigma swapping the factors and the Hopf structure of functions on Z/2: the swap
/// is translation, not a homomorphism, so Delta does not commute with sigma.
pub fn translation_on_z2(k: &DifferenceField) -> SigmaHopf {
    let mut h = functions(k, &Group::cyclic(2), &[0, 1]).unwrap();
    h.alg = FinSigmaAlgebra::split(k, &[1, 0]);
    SigmaHopf::Finite(h)
}

fn random_endomorphism<R: Rng>(rng: &mut R, g: &Group, bijective: bool) -> Vec<usize> {
    let n = g.order();
    loop {
        let phi: Vec<usize> = if g.name == "Z2^2" {
            // images of the generators (1, 0) and (0, 1)
            let (x, y) = (rng.gen_range(0..4), rng.gen_range(0..4));
            (0..4).map(|i| (if i & 1 == 1 { x } else { 0 }) ^ (if i & 2 == 2 { y } else { 0 })).collect()
        } else {
            let m = rng.gen_range(0..n);
            (0..n).map(|x| x * m % n).collect()
        };
        let injective = (0..n).all(|a| (0..a).all(|b| phi[a] != phi[b]));
        if g.is_endomorphism(&phi) && (injective || !bijective) {
            return phi;
        }
    }
}

fn random_invertible<R: Rng>(rng: &mut R, k: &DifferenceField, n: usize) -> Mat {
    loop {
        let p: Mat = (0..n).map(|_| (0..n).map(|_| k.random(rng)).collect()).collect();
        if linalg::inverse(k, &p).is_some() {
            return p;
        }
    }
}

/// A random function or group algebra of Z2, Z3, Z4 or (Z/2)^2 in a random basis. With
/// `bijective` the endomorphism is an automorphism, so the carrier is strongly sigma-etale
/// whenever it is etale.
pub fn random_carrier_with<R: Rng>(rng: &mut R, k: &DifferenceField, bijective: bool) -> Result<(String, SigmaHopf)> {
    let g = [Group::cyclic(2), Group::cyclic(3), Group::cyclic(4), Group::klein()].choose(rng).unwrap().clone();
    let phi = random_endomorphism(rng, &g, bijective);
    let (kind, h) = if rng.gen_bool(0.5) {
        ("functions on", functions(k, &g, &phi)?)
    } else {
        ("group algebra of", group_algebra(k, &g, &phi)?)
    };
    let h = h.transport(&random_invertible(rng, k, g.order()))?;
    Ok((format!("{kind} {} with phi = {phi:?}", g.name), SigmaHopf::Finite(h)))
}

/// A random strongly sigma-etale Hopf carrier of dimension at most 4.
pub fn random_carrier<R: Rng>(rng: &mut R, k: &DifferenceField) -> Result<(String, SigmaHopf)> {
    random_carrier_with(rng, k, true)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CoreNotHopfReport {
    pub char: u64,
    pub level: u32,
    pub core_dim: usize,
    pub core_exact: bool,
    pub etale_union_lower_bound: usize,
    pub hopf_valid: bool,
    pub core_is_hopf_subalgebra: crate::towers::Verdict,
    /// Core of dimension 1 while the etale union has dimension at least 2^level.
    pub separation: bool,
}

/// The running example at one truncation level: the strong core is k and a Hopf subalgebra,
/// while the union of the etale sigma-subalgebras keeps growing.
pub fn example_core_not_hopf(p: u64, level: u32) -> Result<CoreNotHopfReport> {
    let k = DifferenceField::prime(p, 0)?;
    let h = example_carrier(&k)?;
    let valid = super::hopf_validate(&h)?.valid;
    let SigmaHopf::Truncated(t) = &h else { unreachable!() };
    let core = t.carrier.strong_core_truncated(level)?;
    let probe = super::union_of_etale_subalgebras_probe(&t.carrier, level)?;
    let cert = super::strong_core_is_hopf_subalgebra(&h, level)?;
    Ok(CoreNotHopfReport {
        char: p,
        level,
        core_dim: core.dim(),
        core_exact: core.exact,
        etale_union_lower_bound: probe.bound,
        hopf_valid: valid,
        core_is_hopf_subalgebra: cert.verdict,
        separation: core.dim() == 1 && probe.bound >= 1 << level,
    })
}
