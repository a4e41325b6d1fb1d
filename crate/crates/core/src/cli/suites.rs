//! Seeded property suites. Each check computes its two sides by separate routes; every
//! suite tallies instances and failures, and reports the first failing instance.

use crate::error::Result;
use crate::exactfield::{DifferenceField, Scalar};
use crate::findiff::constructions::{flatten_to_prime, quotient_by_sigma_ideal, tensor_product, FieldEmbedding};
use crate::findiff::generate::Generator;
use crate::findiff::predicates::{psi_kernel, twist_and_psi};
use crate::findiff::{base_change, is_sigma_reduced, is_sigma_separable, is_strongly_sigma_etale, strong_core, Elem, FinSigmaAlgebra};
use crate::hopf::gallery;
use crate::hopf::{hopf_validate, strong_core_is_hopf_subalgebra};
use crate::linalg::{self, Subspace};
use crate::poly::factor;
use crate::towers::generate::{examples, random_finite_tower};
use crate::towers::{
    babbitt_search, babbitt_verify, compatible, core_sradicial_over_strong_core_check, limit_degree, BabbittChain,
    TowerExtension, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const NAMES: &[&str] = &["example", "prop12", "closure", "functoriality", "bruteforce", "towers", "babbitt", "compat", "hopf"];

#[derive(Clone, Debug, Serialize)]
pub struct CheckTally {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub failures: usize,
    pub checks: Vec<CheckTally>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

type Outcome = std::result::Result<(), String>;

fn tally(name: &str, results: Vec<Outcome>) -> CheckTally {
    let failures = results.iter().filter(|r| r.is_err()).count();
    let first_failure = results.into_iter().enumerate().find_map(|(i, r)| r.err().map(|e| format!("instance {i}: {e}")));
    CheckTally { name: name.into(), instances: 0, failures, first_failure }
}

fn run_checks<T: Sync>(name: &str, items: &[T], f: impl Fn(&T) -> Outcome + Sync) -> CheckTally {
    let results: Vec<Outcome> = items.par_iter().map(&f).collect();
    let mut t = tally(name, results);
    t.instances = items.len();
    t
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn report(suite: &str, seed: u64, checks: Vec<CheckTally>, data: Value) -> SuiteReport {
    SuiteReport {
        suite: suite.into(),
        seed,
        instances: checks.iter().map(|c| c.instances).sum(),
        failures: checks.iter().map(|c| c.failures).sum(),
        checks,
        data,
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn gen(seed: u64, salt: u64) -> Generator {
    Generator { rng: rng(seed, salt) }
}

pub fn run(name: &str, seed: u64) -> Result<SuiteReport> {
    Ok(match name {
        "example" => example(seed)?,
        "prop12" => prop12(seed),
        "closure" => closure(seed),
        "functoriality" => functoriality(seed),
        "bruteforce" => bruteforce(seed),
        "towers" => towers(seed),
        "babbitt" => babbitt(seed),
        "compat" => compat(seed),
        "hopf" => hopf(seed),
        other => return Err(crate::Error::Input(format!("unknown suite '{other}'; known: all, {}", NAMES.join(", ")))),
    })
}

/// The running example in characteristic 5 and 7 at levels 1 to 3.
pub fn example(seed: u64) -> Result<SuiteReport> {
    let cases: Vec<(u64, u32)> = [5u64, 7].iter().flat_map(|&p| (1..=3).map(move |n| (p, n))).collect();
    let reports = cases.par_iter().map(|&(p, n)| gallery::example_core_not_hopf(p, n)).collect::<Result<Vec<_>>>()?;
    let sep = (0..cases.len())
        .map(|i| {
            let r = &reports[i];
            ensure(r.core_dim == 1 && r.core_exact, || format!("char {} level {}: core dim {} exact {}", r.char, r.level, r.core_dim, r.core_exact))?;
            ensure(r.etale_union_lower_bound >= 1 << r.level, || {
                format!("char {} level {}: bound {} below 2^level", r.char, r.level, r.etale_union_lower_bound)
            })?;
            ensure(r.hopf_valid && r.core_is_hopf_subalgebra == Verdict::Verified, || format!("char {} level {}: Hopf checks", r.char, r.level))
        })
        .collect();
    let growth = (0..cases.len())
        .filter(|&i| cases[i].1 > 1)
        .map(|i| {
            let (a, b) = (&reports[i - 1], &reports[i]);
            ensure(b.etale_union_lower_bound > a.etale_union_lower_bound, || format!("char {}: bound does not grow at level {}", b.char, b.level))
        })
        .collect();
    let checks = vec![tally_n("core k, bound >= 2^level", sep, cases.len()), tally_n("strict growth in the level", growth, 4)];
    Ok(report("example", seed, checks, serde_json::to_value(&reports).unwrap()))
}

fn tally_n(name: &str, results: Vec<Outcome>, n: usize) -> CheckTally {
    let mut t = tally(name, results);
    t.instances = n;
    t
}

/// sigma(f_1), ..., sigma(f_n) independent for a random basis f, against injectivity of the
/// canonical map psi, against sigma-reducedness.
pub fn prop12(seed: u64) -> SuiteReport {
    let mut g = gen(seed, 1);
    let items: Vec<(FinSigmaAlgebra, Vec<Elem>)> = (0..600)
        .map(|_| {
            let k = g.prime_base();
            let a = g.algebra(&k, 5);
            let basis = loop {
                let p: Vec<Elem> = (0..a.dim).map(|_| (0..a.dim).map(|_| k.random(&mut g.rng)).collect()).collect();
                if linalg::rank(&k, &p) == a.dim {
                    break p;
                }
            };
            (a, basis)
        })
        .collect();
    let c = run_checks("(iv) = (v) = sigma-reduced", &items, |(a, basis)| {
        let images: Vec<Elem> = basis.iter().map(|f| a.sigma(f)).collect();
        let iv = linalg::rank(&a.base, &images) == a.dim;
        let (_, psi) = lib(twist_and_psi(a))?;
        let v = psi_kernel(&psi).is_empty();
        let red = is_sigma_reduced(a);
        ensure(iv == v && v == red, || format!("dim {} over {}: (iv) {iv}, (v) {v}, reduced {red}", a.dim, a.base.name()))
    });
    let reduced = items.iter().filter(|(a, _)| is_sigma_reduced(a)).count();
    report("prop12", seed, vec![c], json!({"sigma_reduced": reduced, "not_sigma_reduced": items.len() - reduced}))
}

/// Subalgebras, tensor products, quotients and transitivity keep strong sigma-etaleness; tensor
/// products keep sigma-separability.
pub fn closure(seed: u64) -> SuiteReport {
    let mut g = gen(seed, 2);
    let n = 200;
    let subs: Vec<FinSigmaAlgebra> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            let a = g.strongly_etale(&k, 5);
            g.subalgebra_inclusion(&a).expect("generated subalgebra").source
        })
        .collect();
    let c1 = run_checks("subalgebra", &subs, |s| ensure(is_strongly_sigma_etale(s), || format!("dim {}", s.dim)));

    let pairs: Vec<(FinSigmaAlgebra, FinSigmaAlgebra)> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            (g.strongly_etale(&k, 3), g.strongly_etale(&k, 3))
        })
        .collect();
    let c2 = run_checks("tensor product", &pairs, |(a, b)| {
        let t = lib(tensor_product(a, b))?;
        ensure(is_strongly_sigma_etale(&t), || format!("dims {} x {}", a.dim, b.dim))
    });

    let seps: Vec<(FinSigmaAlgebra, FinSigmaAlgebra)> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            let mut pick = || loop {
                let a = g.algebra(&k, 3);
                if is_sigma_separable(&a) {
                    break a;
                }
            };
            (pick(), pick())
        })
        .collect();
    let c3 = run_checks("tensor of sigma-separable", &seps, |(a, b)| {
        let t = lib(tensor_product(a, b))?;
        ensure(is_sigma_separable(&t) && is_sigma_reduced(&t), || format!("dims {} x {}", a.dim, b.dim))
    });

    let quots: Vec<FinSigmaAlgebra> = (0..n)
        .map(|_| loop {
            let k = g.prime_base();
            let a = g.strongly_etale(&k, 5);
            let x = g.element(&a);
            if let Ok((q, _)) = quotient_by_sigma_ideal(&a, &[x]) {
                break q;
            }
        })
        .collect();
    let c4 = run_checks("quotient", &quots, |q| ensure(is_strongly_sigma_etale(q), || format!("dim {}", q.dim)));

    let trans: Vec<FinSigmaAlgebra> = (0..n)
        .map(|_| {
            let p = [2u64, 3][g.rng.gen_range(0..2)];
            let kk = loop {
                let kk = g.finite_base(p, 3);
                if kk.finite_field().unwrap().n > 1 {
                    break kk;
                }
            };
            g.strongly_etale(&kk, 3)
        })
        .collect();
    let c5 = run_checks("transitivity over F_p", &trans, |r| {
        let flat = lib(flatten_to_prime(r))?;
        ensure(is_strongly_sigma_etale(&flat), || format!("dim {} over {}", r.dim, r.base.name()))
    });
    report("closure", seed, vec![c1, c2, c3, c4, c5], Value::Null)
}

fn same_subspace(a: &Subspace, b: &Subspace) -> bool {
    a.n == b.n && a.rows == b.rows
}

fn kron(k: &DifferenceField, a: &[Scalar], b: &[Scalar]) -> Elem {
    a.iter().flat_map(|x| b.iter().map(move |y| k.mul(x, y))).collect()
}

/// Base change, tensor products, morphism images and idempotence of the strong core.
pub fn functoriality(seed: u64) -> SuiteReport {
    let mut g = gen(seed, 3);
    let n = 100;
    let bc: Vec<(FinSigmaAlgebra, usize)> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            let a = g.algebra(&k, 4);
            (a, g.rng.gen_range(2..=4))
        })
        .collect();
    let c1 = run_checks("base change F_q -> F_q^m", &bc, |(a, m)| {
        let emb = lib(FieldEmbedding::finite_extension(&a.base, *m))?;
        let lhs = lib(strong_core(&lib(base_change(a, &emb))?))?.subspace;
        let core = lib(strong_core(a))?.subspace;
        let rows: Vec<Elem> = core.rows.iter().map(|r| r.iter().map(|c| emb.map(c)).collect()).collect();
        let rhs = Subspace::span(&emb.big, a.dim, &rows);
        ensure(same_subspace(&lhs, &rhs), || format!("dim {} over {}, m = {m}: {} vs {}", a.dim, a.base.name(), lhs.dim(), rhs.dim()))
    });

    let pairs: Vec<(FinSigmaAlgebra, FinSigmaAlgebra)> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            (g.algebra(&k, 3), g.algebra(&k, 3))
        })
        .collect();
    let c2 = run_checks("tensor product", &pairs, |(a, b)| {
        let k = &a.base;
        let lhs = lib(strong_core(&lib(tensor_product(a, b))?))?.subspace;
        let ca = lib(strong_core(a))?.subspace;
        let cb = lib(strong_core(b))?.subspace;
        let rows: Vec<Elem> = ca.rows.iter().flat_map(|x| cb.rows.iter().map(|y| kron(k, x, y)).collect::<Vec<_>>()).collect();
        let rhs = Subspace::span(k, a.dim * b.dim, &rows);
        ensure(same_subspace(&lhs, &rhs), || format!("dims {} x {}: {} vs {}", a.dim, b.dim, lhs.dim(), rhs.dim()))
    });

    let morphs: Vec<_> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            let a = g.algebra(&k, 4);
            g.morphism(&a, 8).expect("generated morphism")
        })
        .collect();
    let c3 = run_checks("morphism image", &morphs, |f| {
        let src = lib(strong_core(&f.source))?.subspace;
        let dst = lib(strong_core(&f.target))?.subspace;
        ensure(f.image(&src).is_subspace_of(&f.source.base, &dst), || format!("{} -> {}", f.source.dim, f.target.dim))
    });

    let algs: Vec<FinSigmaAlgebra> = (0..n)
        .map(|_| {
            let k = g.prime_base();
            g.algebra(&k, 5)
        })
        .collect();
    let c4 = run_checks("idempotence", &algs, |a| {
        let c = lib(strong_core(a))?;
        let cc = lib(strong_core(&c.algebra))?;
        ensure(cc.subspace.dim() == c.algebra.dim && is_strongly_sigma_etale(&c.algebra), || format!("dim {}: core {} core of core {}", a.dim, c.algebra.dim, cc.subspace.dim()))
    });
    report("functoriality", seed, vec![c1, c2, c3, c4], Value::Null)
}

/// Span of the periodic idempotents of A (x) F_{q^d}, found by enumerating all elements, for
/// d = 1, 2, 3; the largest span is the split one when dim A <= 3.
pub fn periodic_idempotent_span(a: &FinSigmaAlgebra) -> Result<(usize, DifferenceField, Subspace)> {
    let k = &a.base;
    let p = k.characteristic();
    let n = a.dim;
    let mut best: Option<(usize, DifferenceField, Subspace, usize)> = None;
    for d in 1..=3usize {
        let big = DifferenceField::finite(p, factor::irreducible_of_degree(p, d)?, 0)?;
        let lift = |c: &Scalar| big.from_u64(k.ff_coeffs(c).first().copied().unwrap_or(0));
        let sc: Vec<Vec<Elem>> = a.struct_consts.iter().map(|r| r.iter().map(|v| v.iter().map(lift).collect()).collect()).collect();
        let s: Vec<Elem> = a.sigma_matrix.iter().map(|r| r.iter().map(lift).collect()).collect();
        let mul = |x: &[Scalar], y: &[Scalar]| -> Elem {
            let mut out = vec![big.zero(); n];
            for i in 0..n {
                if big.is_zero(&x[i]) {
                    continue;
                }
                for j in 0..n {
                    if big.is_zero(&y[j]) {
                        continue;
                    }
                    let c = big.mul(&x[i], &y[j]);
                    for (o, t) in out.iter_mut().zip(&sc[i][j]) {
                        *o = big.add(o, &big.mul(&c, t));
                    }
                }
            }
            out
        };
        let els = big.elements()?;
        let q = els.len();
        let mut idem = Vec::new();
        let mut x = vec![big.zero(); n];
        for code in 0..q.pow(n as u32) {
            let mut c = code;
            for xi in x.iter_mut() {
                *xi = els[c % q].clone();
                c /= q;
            }
            if mul(&x, &x) == x {
                idem.push(x.clone());
            }
        }
        let count = idem.len();
        let periodic: Vec<Elem> = idem
            .iter()
            .filter(|e| {
                let mut y = linalg::mat_vec(&big, &s, e);
                for _ in 0..count {
                    if &y == *e {
                        return true;
                    }
                    y = linalg::mat_vec(&big, &s, &y);
                }
                false
            })
            .cloned()
            .collect();
        let span = Subspace::span(&big, n, &periodic);
        if best.as_ref().map_or(true, |b| count > b.3) {
            best = Some((d, big, span, count));
        }
    }
    let (d, big, span, _) = best.unwrap();
    Ok((d, big, span))
}

/// The strong core against the exhaustive periodic-idempotent span, dim <= 3 over F_2 and F_3.
pub fn bruteforce(seed: u64) -> SuiteReport {
    let mut g = gen(seed, 4);
    let algs: Vec<FinSigmaAlgebra> = (0..150)
        .map(|i| {
            let k = DifferenceField::prime(if i % 2 == 0 { 2 } else { 3 }, 0).unwrap();
            g.algebra(&k, 3)
        })
        .collect();
    let c = run_checks("strong core = periodic idempotent span", &algs, |a| {
        let (d, big, span) = lib(periodic_idempotent_span(a))?;
        let core = lib(strong_core(a))?;
        let k = &a.base;
        let lift = |c: &Scalar| big.from_u64(k.ff_coeffs(c).first().copied().unwrap_or(0));
        let rows: Vec<Elem> = core.subspace.rows.iter().map(|r| r.iter().map(lift).collect()).collect();
        let lifted = Subspace::span(&big, a.dim, &rows);
        ensure(core.complete && same_subspace(&lifted, &span), || {
            format!("dim {} over {}: core {} vs idempotent span {} over degree {d}", a.dim, k.name(), lifted.dim(), span.dim())
        })
    });
    let mut dims = [0usize; 4];
    for a in &algs {
        if let Ok(c) = strong_core(a) {
            dims[c.dim()] += 1;
        }
    }
    report("bruteforce", seed, vec![c], json!({"core_dims": dims}))
}

/// The chain K sigma^i(L) stabilizes at a strongly sigma-etale algebra over which L is
/// sigma-radicial; over a finite base it also agrees with the idempotent strong core.
pub fn towers(seed: u64) -> SuiteReport {
    let mut r = rng(seed, 5);
    let ts: Vec<TowerExtension> = (0..60).map(|_| random_finite_tower(&mut r)).collect();
    let c1 = run_checks("chain stabilizes, core strongly sigma-etale, radicial", &ts, |t| {
        let cert = lib(core_sradicial_over_strong_core_check(t))?;
        let core = &cert.core;
        ensure(cert.verified, || format!("{}: not verified", t.base().name()))?;
        ensure(core.chain.windows(2).all(|w| w[1] <= w[0]), || "chain not decreasing".into())?;
        ensure(is_strongly_sigma_etale(&core.algebra), || "core not strongly sigma-etale".into())?;
        let k = &core.tower.base;
        for (j, (name, e)) in core.exponents.iter().enumerate() {
            let mut x = core.tower.gen(j);
            for _ in 0..*e {
                x = lib(core.tower.sigma(&x))?;
            }
            ensure(core.subspace.contains(k, &x), || format!("sigma^{e}({name}) outside the core"))?;
        }
        Ok(())
    });
    let finite: Vec<&TowerExtension> = ts.iter().filter(|t| t.base().is_finite()).collect();
    let c2 = run_checks("chain limit = idempotent strong core", &finite, |t| {
        let cert = lib(crate::towers::strong_core_finite_ext(t))?;
        let alg = lib(cert.tower.as_algebra())?;
        let sc = lib(strong_core(&alg))?;
        ensure(sc.complete && same_subspace(&sc.subspace, &cert.subspace), || format!("{} vs {}", sc.subspace.dim(), cert.dim()))
    });
    report("towers", seed, vec![c1, c2], Value::Null)
}

fn chain(steps: &[&[&str]]) -> BabbittChain {
    BabbittChain { l0: vec![], steps: steps.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect() }
}

/// The shipped radical towers verify as Babbitt chains; the corrupted chain is refuted.
pub fn babbitt(seed: u64) -> SuiteReport {
    let cases: Vec<(&str, TowerExtension, BabbittChain, usize, usize)> = vec![
        ("radical2", examples::radical(5, 2), chain(&[&["a0"]]), 5, 2),
        ("radical3", examples::radical(7, 3), chain(&[&["a0"]]), 3, 3),
        ("stack", examples::radical_stack(), chain(&[&["a0"], &["c0"]]), 3, 4),
    ];
    let monotone = |r: &crate::towers::BabbittReport| r.steps.iter().all(|s| s.d_sequence.windows(2).all(|w| w[1] <= w[0]));
    let c1 = run_checks("shipped chains verify", &cases, |(name, t, ch, h, ld)| {
        let r = lib(babbitt_verify(t, ch, *h))?;
        ensure(r.verdict == Verdict::Verified, || format!("{name}: {}", r.message))?;
        ensure(monotone(&r), || format!("{name}: d sequence increases"))?;
        let s = lib(babbitt_search(t, None, *h))?;
        ensure(s.chain.is_some(), || format!("{name}: search found no chain"))?;
        let l = lib(limit_degree(t, 6))?;
        ensure(l.value == *ld && l.certified, || format!("{name}: ld {:?}", l.value))
    });
    let bad = vec![(examples::corrupted(), chain(&[&["a0"]])), (examples::radical_stack(), chain(&[&["a0"]]))];
    let c2 = run_checks("corrupted chains refuted", &bad, |(t, ch)| {
        let r = lib(babbitt_verify(t, ch, 3))?;
        ensure(r.verdict == Verdict::Refuted && (r.witness.is_some() || r.failed_at.is_some()), || r.message.clone())?;
        ensure(monotone(&r), || "d sequence increases".into())
    });
    report("babbitt", seed, vec![c1, c2], Value::Null)
}

/// Embeddings of F_2[x]/(f) with sigma = Frob^i into F_{2^N} with sigma = Frob^s.
fn sigma_roots(f: &[u64], i: u32, m: &DifferenceField, s: u32) -> Result<bool> {
    for r in m.elements()? {
        let mut v = m.zero();
        for &c in f.iter().rev() {
            v = m.add(&m.mul(&v, &r), &m.from_u64(c));
        }
        if m.is_zero(&v) && m.pow(&r, 1u64 << s) == m.pow(&r, 1u64 << i) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Search finite common sigma-field extensions F_{2^N}, N a multiple of lcm(a, b) up to twice it.
pub fn common_embedding(a: (usize, u32), b: (usize, u32)) -> Result<bool> {
    let poly = |n: usize| -> Vec<u64> {
        if n == 2 {
            vec![1, 1, 1]
        } else {
            vec![1, 1, 0, 0, 1]
        }
    };
    let l = num_integer::lcm(a.0, b.0);
    for n in [l, 2 * l] {
        for s in 0..n as u32 {
            let m = DifferenceField::finite(2, factor::irreducible_of_degree(2, n)?, s)?;
            if sigma_roots(&poly(a.0), a.1, &m, s)? && sigma_roots(&poly(b.0), b.1, &m, s)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Strong-core decision against common-embedding search on F_4 and F_16, and radicial
/// extensions against everything.
pub fn compat(seed: u64) -> SuiteReport {
    let structs: Vec<(usize, u32)> = (0..2).map(|m| (2, m)).chain((0..4).map(|m| (4, m))).collect();
    let pairs: Vec<((usize, u32), (usize, u32))> = structs.iter().flat_map(|&a| structs.iter().map(move |&b| (a, b))).collect();
    let c1 = run_checks("strong cores vs embedding search", &pairs, |&(a, b)| {
        let v = lib(compatible(&examples::gf2_tower(a.0, a.1), &examples::gf2_tower(b.0, b.1)))?;
        let brute = lib(common_embedding(a, b))?;
        ensure(v.compatible == brute, || format!("F{} frob^{} vs F{} frob^{}: cores {} search {brute}", 1 << a.0, a.1, 1 << b.0, b.1, v.compatible))
    });
    let mut r = rng(seed, 8);
    let mut others: Vec<(TowerExtension, TowerExtension)> = Vec::new();
    for p in [5u64, 7] {
        for m in 0..2 {
            others.push((examples::radicial_square_root(p), examples::constant_over_univariate(p, m)));
        }
        others.push((examples::radicial_square_root(p), examples::radicial_square_root(p)));
    }
    while others.len() < 30 {
        let t = random_finite_tower(&mut r);
        if t.base().is_univariate() && !t.base().is_finite() {
            let p = t.base().characteristic();
            others.push((examples::radicial_square_root(p), t));
        }
    }
    let c2 = run_checks("radicial compatible with everything", &others, |(a, b)| {
        let v = lib(compatible(a, b))?;
        ensure(v.compatible, || v.reason.clone())
    });
    let compatible_pairs = pairs.iter().filter(|(a, b)| common_embedding(*a, *b).unwrap_or(false)).count();
    report("compat", seed, vec![c1, c2], json!({"compatible_pairs": compatible_pairs}))
}

/// The strong core is a Hopf subalgebra on the whole gallery.
pub fn hopf(seed: u64) -> SuiteReport {
    let mut fixed = Vec::new();
    for p in [5u64, 7] {
        let k = DifferenceField::prime(p, 0).unwrap();
        for n in 1..=3 {
            fixed.push((format!("example carrier, char {p}, level {n}"), gallery::example_carrier(&k).unwrap(), n));
        }
        fixed.push((format!("group-like, char {p}"), gallery::group_like(&k).unwrap(), 2));
        fixed.push((format!("first factor, char {p}"), gallery::first_factor(&k).unwrap(), 2));
        for (name, h) in gallery::finite_members(&k) {
            fixed.push((format!("{name}, char {p}"), h, 0));
        }
    }
    let check = |(name, h, n): &(String, crate::hopf::SigmaHopf, u32)| -> Outcome {
        let r = lib(hopf_validate(h))?;
        ensure(r.valid, || format!("{name}: {:?}", r.failure().map(|c| &c.law)))?;
        let c = lib(strong_core_is_hopf_subalgebra(h, *n))?;
        ensure(c.verdict == Verdict::Verified, || format!("{name}: {}", c.witness.clone().unwrap_or(c.message.clone())))
    };
    let c1 = run_checks("gallery", &fixed, check);
    let mut r = rng(seed, 9);
    let k = DifferenceField::prime(5, 0).unwrap();
    let random: Vec<(String, crate::hopf::SigmaHopf, u32)> =
        (0..60).map(|_| gallery::random_carrier(&mut r, &k).map(|(n, h)| (n, h, 0)).unwrap()).collect();
    let c2 = run_checks("random strongly sigma-etale carriers", &random, check);
    let endo: Vec<(String, crate::hopf::SigmaHopf, u32)> =
        (0..30).map(|_| gallery::random_carrier_with(&mut r, &k, false).map(|(n, h)| (n, h, 0)).unwrap()).collect();
    let c3 = run_checks("random carriers, any endomorphism", &endo, check);
    let neg = vec![gallery::translation_on_z2(&k), gallery::broken_antipode(&k).unwrap()];
    let c4 = run_checks("invalid structures rejected", &neg, |h| {
        let r = lib(hopf_validate(h))?;
        ensure(!r.valid, || "accepted".into())
    });
    report("hopf", seed, vec![c1, c2, c3, c4], json!({"random_members": random.iter().map(|x| x.0.as_str()).collect::<std::collections::BTreeSet<_>>().len()}))
}

