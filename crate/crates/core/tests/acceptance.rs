//! Acceptance criteria, one line each. Runs without the libtest harness so the lines always print.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigma_etale::cli::suites::{self, SuiteReport};
use sigma_etale::diffpoly::examples as presented;
use sigma_etale::findiff::constructions::FieldEmbedding;
use sigma_etale::findiff::generate::Generator;
use sigma_etale::findiff::predicates::{psi_kernel, twist_and_psi};
use sigma_etale::findiff::{base_change, is_sigma_reduced, is_strongly_sigma_etale, strong_core, Elem};
use sigma_etale::hopf::{gallery, hopf_validate, strong_core_is_hopf_subalgebra, union_of_etale_subalgebras_probe, SigmaHopf};
use sigma_etale::linalg::{self, Subspace};
use sigma_etale::poly::factor::irreducible_of_degree;
use sigma_etale::towers::generate::{examples, random_finite_tower};
use sigma_etale::towers::{babbitt_verify, compatible, core_sradicial_over_strong_core_check, limit_degree, BabbittChain, Verdict};
use sigma_etale::DifferenceField;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1} s, limit {} s", t.as_secs_f64(), limit.as_secs()))
}

fn suite_clean(r: &SuiteReport, min: usize) -> Result<(), String> {
    for c in &r.checks {
        ensure(c.instances >= min, || format!("{}: only {} instances", c.name, c.instances))?;
        ensure(c.failures == 0, || format!("{}: {} failures, first {:?}", c.name, c.failures, c.first_failure))?;
    }
    Ok(())
}

fn chain(steps: &[&[&str]]) -> BabbittChain {
    BabbittChain { l0: vec![], steps: steps.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect() }
}

fn running_example() -> Check {
    let start = Instant::now();
    let mut bounds = Vec::new();
    for p in [5u64, 7] {
        let k = lib(DifferenceField::prime(p, 0))?;
        let r = lib(presented::r(&k))?;
        for n in 1..=3 {
            let c = lib(r.strong_core_truncated(n))?;
            ensure(c.dim() == 1 && c.exact, || format!("char {p} level {n}: core dim {} exact {}", c.dim(), c.exact))?;
            let b = lib(union_of_etale_subalgebras_probe(&r, n))?.bound;
            ensure(b >= 1 << n, || format!("char {p} level {n}: bound {b} below 2^{n}"))?;
            bounds.push(b);
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("core k at levels 1-3 in char 5 and 7, etale-union bounds {bounds:?}"))
}

fn prop12() -> Check {
    let start = Instant::now();
    let mut g = Generator::new(0x12);
    let (mut n, mut reduced) = (0, 0);
    while n < 600 {
        let k = g.prime_base();
        let a = g.algebra(&k, 5);
        let basis: Vec<Elem> = loop {
            let b: Vec<Elem> = (0..a.dim).map(|_| (0..a.dim).map(|_| k.random(&mut g.rng)).collect()).collect();
            if linalg::rank(&k, &b) == a.dim {
                break b;
            }
        };
        let iv = linalg::rank(&k, &basis.iter().map(|f| a.sigma(f)).collect::<Vec<_>>()) == a.dim;
        let v = psi_kernel(&lib(twist_and_psi(&a))?.1).is_empty();
        let brute = common::sigma_reduced_by_enumeration(&a, 5usize.pow(5)).ok_or("enumeration too large")?;
        ensure(iv == v && v == brute && is_sigma_reduced(&a) == brute, || {
            format!("dim {} over {}: (iv) {iv}, (v) {v}, enumeration {brute}", a.dim, k.name())
        })?;
        n += 1;
        reduced += brute as usize;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{n} algebras, {reduced} sigma-reduced, zero disagreements"))
}

fn closure() -> Check {
    let r = suites::closure(42);
    suite_clean(&r, 200)?;
    Ok(format!("{} instances over {} lemmas, zero failures", r.instances, r.checks.len()))
}

fn functoriality() -> Check {
    let r = suites::functoriality(42);
    suite_clean(&r, 100)?;
    Ok(format!("{} instances over {} identities, exact equality", r.instances, r.checks.len()))
}

/// Strong core against the span of periodic solutions of e^2 = e, enumerated after base
/// change to F_q^d for the d in 1..=3 with the most idempotents.
fn bruteforce() -> Check {
    let mut g = Generator::new(0x5);
    let mut n = 0;
    for i in 0..200 {
        let k = lib(DifferenceField::prime(if i % 2 == 0 { 2 } else { 3 }, 0))?;
        let a = g.algebra(&k, 3);
        let core = lib(strong_core(&a))?;
        let (mut best, mut most) = (None, 0);
        for d in 1..=3 {
            let emb = lib(FieldEmbedding::finite_extension(&k, d))?;
            let big = lib(base_change(&a, &emb))?;
            let (span, count) = common::periodic_idempotent_span(&big, 27usize.pow(3)).ok_or("state space too large")?;
            if count > most {
                most = count;
                best = Some((emb, span));
            }
        }
        let (emb, span) = best.unwrap();
        let rows: Vec<Elem> = core.subspace.rows.iter().map(|r| r.iter().map(|c| emb.map(c)).collect()).collect();
        let lifted = Subspace::span(&emb.big, a.dim, &rows);
        ensure(lifted.rows == span.rows, || format!("dim {} over {}: core {} vs oracle {}", a.dim, k.name(), lifted.dim(), span.dim()))?;
        n += 1;
    }
    Ok(format!("{n} algebras of dim <= 3 over F2 and F3, 100% agreement"))
}

fn towers() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(0x19);
    let mut n = 0;
    for _ in 0..60 {
        let t = random_finite_tower(&mut r);
        let cert = lib(core_sradicial_over_strong_core_check(&t))?;
        let c = &cert.core;
        ensure(cert.verified, || format!("over {}: not verified", t.base().name()))?;
        ensure(c.chain.windows(2).all(|w| w[1] <= w[0]), || format!("chain {:?} increases", c.chain))?;
        ensure(is_strongly_sigma_etale(&c.algebra), || "limit not strongly sigma-etale".into())?;
        for (j, (name, e)) in c.exponents.iter().enumerate() {
            let x = lib(c.tower.sigma_n(&c.tower.gen(j), *e))?;
            ensure(c.subspace.contains(&c.tower.base, &x), || format!("sigma^{e}({name}) outside the limit"))?;
        }
        n += 1;
    }
    Ok(format!("{n} towers stabilize, limit strongly sigma-etale, radicial exponents checked"))
}

fn babbitt() -> Check {
    let start = Instant::now();
    let monotone = |r: &sigma_etale::towers::BabbittReport| r.steps.iter().all(|s| s.d_sequence.windows(2).all(|w| w[1] <= w[0]));
    let mut lds = Vec::new();
    for (name, t, c, h, ld) in [
        ("radical F5", examples::radical(5, 2), chain(&[&["a0"]]), 5, 2),
        ("radical F7", examples::radical(7, 3), chain(&[&["a0"]]), 3, 3),
        ("stack", examples::radical_stack(), chain(&[&["a0"], &["c0"]]), 3, 4),
    ] {
        let r = lib(babbitt_verify(&t, &c, h))?;
        ensure(r.verdict == Verdict::Verified && monotone(&r), || format!("{name}: {}", r.message))?;
        let l = lib(limit_degree(&t, 6))?;
        ensure(l.value == ld && l.d_sequence.windows(2).all(|w| w[1] <= w[0]), || format!("{name}: ld {} sequence {:?}", l.value, l.d_sequence))?;
        lds.push(l.value);
    }
    let r = lib(babbitt_verify(&examples::corrupted(), &chain(&[&["a0"]]), 3))?;
    ensure(r.verdict == Verdict::Refuted && r.witness.is_some() && monotone(&r), || format!("corrupted chain: {:?}", r.verdict))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("ld {lds:?} certified, corrupted chain refuted with witness {}", r.witness.unwrap()))
}

/// Roots in F_2^N with sigma = Frob^s of the defining polynomial of a structure (n, i) with
/// Frob^s(r) = Frob^i(r). Any common extension contains the compositum F_2^lcm, so N = lcm.
fn embeds(structs: [(usize, u32); 2]) -> Result<bool, String> {
    let poly = |n: usize| -> Vec<u64> { if n == 2 { vec![1, 1, 1] } else { vec![1, 1, 0, 0, 1] } };
    let l = num_integer::lcm(structs[0].0, structs[1].0);
    for s in 0..l as u32 {
        let m = lib(DifferenceField::finite(2, lib(irreducible_of_degree(2, l))?, s))?;
        let els = lib(m.elements())?;
        let found = structs.iter().all(|&(n, i)| {
            els.iter().any(|r| {
                let v = poly(n).iter().rev().fold(m.zero(), |acc, &c| m.add(&m.mul(&acc, r), &m.from_u64(c)));
                m.is_zero(&v) && m.pow(r, 1 << s) == m.pow(r, 1 << i)
            })
        });
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

fn compat() -> Check {
    let structs: Vec<(usize, u32)> = (0..2).map(|i| (2, i)).chain((0..4).map(|i| (4, i))).collect();
    let mut yes = 0;
    for &a in &structs {
        for &b in &structs {
            let v = lib(compatible(&examples::gf2_tower(a.0, a.1), &examples::gf2_tower(b.0, b.1)))?.compatible;
            let search = embeds([a, b])?;
            ensure(v == search, || format!("F{} frob^{} vs F{} frob^{}: cores {v}, search {search}", 1 << a.0, a.1, 1 << b.0, b.1))?;
            yes += v as usize;
        }
    }
    let mut others = Vec::new();
    for p in [5u64, 7] {
        others.push((examples::radicial_square_root(p), examples::radicial_square_root(p)));
        for m in 0..2 {
            others.push((examples::radicial_square_root(p), examples::constant_over_univariate(p, m)));
        }
    }
    let mut r = ChaCha8Rng::seed_from_u64(0x34);
    while others.len() < 24 {
        let t = random_finite_tower(&mut r);
        if t.base().is_univariate() && !t.base().is_finite() {
            let p = t.base().characteristic();
            others.push((examples::radicial_square_root(p), t));
        }
    }
    for (a, b) in &others {
        let v = lib(compatible(a, b))?;
        ensure(v.compatible, || format!("radicial reported incompatible: {}", v.reason))?;
    }
    Ok(format!("36 pairs agree ({yes} compatible), radicial compatible in {} pairs", others.len()))
}

fn hopf() -> Check {
    let check = |name: &str, h: &SigmaHopf, level: u32| -> Result<(), String> {
        let v = lib(hopf_validate(h))?;
        ensure(v.failure().is_none(), || format!("{name}: axioms fail"))?;
        let c = lib(strong_core_is_hopf_subalgebra(h, level))?;
        ensure(c.verdict == Verdict::Verified && c.core_exact, || format!("{name}: {:?} {}", c.verdict, c.message))
    };
    let mut n = 0;
    for p in [3u64, 5, 7] {
        let k = lib(DifferenceField::prime(p, 0))?;
        for level in 1..=3 {
            check("running example carrier", &lib(gallery::example_carrier(&k))?, level)?;
            n += 1;
        }
        for (name, h) in gallery::finite_members(&k) {
            check(&name, &h, 0)?;
            n += 1;
        }
        let mut r = ChaCha8Rng::seed_from_u64(0x32 + p);
        for _ in 0..30 {
            let (name, h) = lib(gallery::random_carrier(&mut r, &k))?;
            check(&name, &h, 0)?;
            n += 1;
        }
    }
    Ok(format!("{n} gallery members, strong core a sigma-Hopf subalgebra in every one"))
}

fn determinism() -> Check {
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_sigma-etale"))
            .args(["suite", "all", "--seed", "42"])
            .env_remove("SIGMA_ETALE_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("exit {:?}", a.status.code()))?;
    serde_json::from_slice::<serde_json::Value>(&a.stdout).map_err(|e| format!("not JSON: {e}"))?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("running example", running_example),
        ("independence criteria", prop12),
        ("closure lemmas", closure),
        ("strong-core functoriality", functoriality),
        ("brute-force idempotents", bruteforce),
        ("tower limits", towers),
        ("Babbitt chains", babbitt),
        ("compatibility", compat),
        ("Hopf cores", hopf),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let t = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({t:.2} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({t:.2} s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
