//! Babbitt chains K <= L0 <= L1 <= ... <= Ln <= L: verification and candidate-driven search.

use super::core::{strong_core_finite_ext, Verdict};
use super::degree::{adjoin, base_subspace};
use super::{TElem, Tower, TowerExtension};
use crate::error::{Error, Result};
use crate::exactfield::DifferenceField;
use crate::linalg::Subspace;
use serde::{Deserialize, Serialize};

/// Materializations above this dimension are not used for chain verification.
pub const CHAIN_DIM_LIMIT: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BabbittChain {
    /// Generators of L0 as elements of the tower.
    pub l0: Vec<String>,
    /// Generators b of each M_j = K(b, ...).
    pub steps: Vec<Vec<String>>,
}

impl BabbittChain {
    /// {"tower": ..., "l0": [...], "steps": [[...], ...]}
    pub fn from_json(v: &serde_json::Value) -> Result<(TowerExtension, BabbittChain)> {
        let t = TowerExtension::from_json(v.get("tower").ok_or_else(|| Error::Input("chain: missing field 'tower'".into()))?)?;
        let l0 = match v.get("l0") {
            Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Input(format!("chain.l0: {e}")))?,
            None => Vec::new(),
        };
        let steps = match v.get("steps") {
            Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Input(format!("chain.steps: {e}")))?,
            None => Vec::new(),
        };
        Ok((t, BabbittChain { l0, steps }))
    }

    pub fn to_json(&self, t: &TowerExtension) -> serde_json::Value {
        serde_json::json!({ "tower": t.to_json(), "l0": self.l0, "steps": self.steps })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub generators: Vec<String>,
    /// [L_{j-1}(M_j) : L_{j-1}]
    pub degree: usize,
    pub galois: String,
    pub d_sequence: Vec<usize>,
    /// Degrees hold at every index by the tower's certificates, not only the computed ones.
    pub structural: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BabbittReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub message: String,
    pub core_dim: usize,
    pub l0_dim: usize,
    pub steps: Vec<StepReport>,
    /// sigma^n(g) in Ln, per generator of L.
    pub top_exponents: Vec<(String, Option<usize>)>,
    pub horizon: usize,
}

impl BabbittReport {
    fn fail(mut self, verdict: Verdict, at: &str, witness: Option<String>, msg: String) -> Self {
        self.verdict = verdict;
        self.failed_at = Some(at.to_string());
        self.witness = witness;
        self.message = msg;
        self
    }
}

/// Largest horizon h <= horizon whose materialization stays under the limit.
fn usable_horizon(t: &TowerExtension, horizon: usize) -> usize {
    let s = t.min_start();
    (0..=horizon).take_while(|&h| t.dim_at(s + h as i32) <= CHAIN_DIM_LIMIT).last().unwrap_or(0)
}

/// Highest family index in the support of an element.
fn support_index(t: &Tower, x: &[crate::exactfield::Scalar]) -> Option<(usize, i32)> {
    let last = x.iter().rposition(|c| !t.base.is_zero(c))?;
    let top = t.prefix.iter().position(|&p| p > last)?;
    (0..top).rev().find_map(|j| t.gens[j].family)
}

fn sigma_closure(t: &Tower, w: &Subspace) -> Result<Subspace> {
    let mut w = w.clone();
    loop {
        let imgs: Vec<TElem> = w.rows.iter().map(|r| t.sigma(r)).collect::<Result<_>>()?;
        let next = adjoin(t, &w, &imgs);
        if next.dim() == w.dim() {
            return Ok(w);
        }
        w = next;
    }
}

/// Transforms sigma^i(x) for i = 0, 1, ... as long as they are materialized.
fn transforms(t: &Tower, x: &TElem, max: usize) -> Vec<TElem> {
    let mut out = vec![x.clone()];
    while out.len() <= max {
        match t.sigma(out.last().unwrap()) {
            Ok(y) => out.push(y),
            Err(_) => break,
        }
    }
    out
}

fn count_roots_of_unity(k0: &DifferenceField, r: usize) -> usize {
    k0.elements().map(|els| els.iter().filter(|x| !k0.is_zero(x) && k0.is_one(&k0.pow(x, r as u64))).count()).unwrap_or(0)
}

/// Verify the three conditions of a Babbitt chain within the materialization horizon.
pub fn babbitt_verify(ext: &TowerExtension, chain: &BabbittChain, horizon: usize) -> Result<BabbittReport> {
    let h = usable_horizon(ext, horizon);
    let t = ext.materialize(ext.min_start() + h as i32)?;
    let k = t.base.clone();
    let core = strong_core_finite_ext(ext)?;
    let e_dim = core.tower.dim();
    let mut rep = BabbittReport {
        verdict: Verdict::Verified,
        failed_at: None,
        witness: None,
        message: "chain verified".into(),
        core_dim: core.dim(),
        l0_dim: 0,
        steps: Vec::new(),
        top_exponents: Vec::new(),
        horizon: h,
    };
    // L0 = strong core of the explicit part
    let mut l0_elems = Vec::new();
    for s in &chain.l0 {
        let x = t.parse(s)?;
        if x[e_dim..].iter().any(|c| !k.is_zero(c)) || !core.subspace.contains(&k, &x[..e_dim]) {
            return Ok(rep.fail(Verdict::Refuted, "l0", Some(s.clone()), format!("{s} is not in the strong core")));
        }
        l0_elems.push(x[..e_dim].to_vec());
    }
    let e = &core.tower;
    let l0 = sigma_closure(e, &adjoin(e, &base_subspace(e), &l0_elems))?;
    rep.l0_dim = l0.dim();
    if let Some(r) = core.subspace.rows.iter().find(|r| !l0.contains(&k, r)) {
        let w = e.format(r);
        return Ok(rep.fail(Verdict::Refuted, "l0", Some(w.clone()), format!("strong core element {w} is missing from L0")));
    }
    // current field L_{j-1}, truncated to the materialization
    let mut cur = Subspace::span(&k, t.dim(), &l0.rows.iter().map(|r| t.pad(r)).collect::<Vec<_>>());
    let mut covered: Option<usize> = None;
    let top_family = |x: &TElem, covered: &mut Option<usize>| {
        if let Some((f, _)) = support_index(&t, x) {
            *covered = Some(covered.map_or(f, |c: usize| c.max(f)));
        }
    };
    let mut inconclusive: Option<String> = None;
    for (j, gens) in chain.steps.iter().enumerate() {
        let at = format!("step {}", j + 1);
        let bs: Vec<TElem> = gens.iter().map(|s| t.parse(s)).collect::<Result<_>>()?;
        let ts: Vec<Vec<TElem>> = bs.iter().map(|b| transforms(&t, b, h)).collect();
        let n = ts.iter().map(|v| v.len()).min().unwrap_or(0);
        if n == 0 {
            return Err(Error::Input(format!("{at}: no generators")));
        }
        let step0 = adjoin(&t, &cur, &bs);
        if step0.dim() % cur.dim() != 0 {
            return Err(Error::Invariant(format!("{at}: degree is not an integer")));
        }
        let deg = step0.dim() / cur.dim();
        if deg == 1 {
            return Ok(rep.fail(Verdict::Refuted, &at, Some(gens.join(", ")), format!("{at}: generators already lie in L_{j}")));
        }
        // Galois over L_{j-1}: quadratic, or a radical with the roots of unity in the constants
        let mut galois = String::new();
        for (b, s) in bs.iter().zip(gens) {
            let d = adjoin(&t, &cur, std::slice::from_ref(b)).dim() / cur.dim();
            if d == 2 && k.characteristic() != 2 {
                galois.push_str(&format!("{s}: quadratic; "));
                continue;
            }
            let mut p = t.one();
            let mut r = 0;
            for e in 1..=d {
                p = t.mul(&p, b);
                if cur.contains(&k, &p) {
                    r = e;
                    break;
                }
            }
            if r == d {
                let mu = count_roots_of_unity(&k.constants(), d);
                if mu == d {
                    galois.push_str(&format!("{s}: radical x^{d} - {} with all {d}-th roots of unity; ", t.format(&p)));
                    continue;
                }
                return Ok(rep.fail(
                    Verdict::Refuted,
                    &at,
                    Some(s.clone()),
                    format!("{at}: K({s}) is not Galois: only {mu} {d}-th roots of unity in the constants"),
                ));
            }
            inconclusive.get_or_insert(format!("{at}: Galois splitting of {s} not decided"));
            galois.push_str(&format!("{s}: undecided; "));
        }
        // d_i of L_j over L_{j-1}
        let mut v = cur.clone();
        let mut ds = Vec::new();
        for i in 0..n {
            let imgs: Vec<TElem> = ts.iter().map(|tv| tv[i].clone()).collect();
            let next = adjoin(&t, &v, &imgs);
            let d = next.dim() / v.dim();
            ds.push(d);
            if d < deg {
                rep.steps.push(StepReport {
                    generators: gens.clone(),
                    degree: deg,
                    galois,
                    d_sequence: ds,
                    structural: false,
                });
                return Ok(rep.fail(
                    Verdict::Refuted,
                    &at,
                    Some(t.format(&imgs[0])),
                    format!("{at}: degree drops to {d} < {deg} at index {i}"),
                ));
            }
            v = next;
        }
        for b in &ts {
            for x in b {
                top_family(x, &mut covered);
            }
        }
        let structural = ext.certified() && bs.iter().all(|b| support_index(&t, b).is_some());
        rep.steps.push(StepReport { generators: gens.clone(), degree: deg, galois: galois.trim_end_matches("; ").into(), d_sequence: ds, structural });
        cur = v;
    }
    // top: sigma^n(g) in L_n for every generator of L
    for j in 0..t.explicit {
        let mut x = t.gen(j);
        let mut found = None;
        for n in 0..=h {
            if cur.contains(&k, &x) {
                found = Some(n);
                break;
            }
            x = t.sigma(&x)?;
        }
        rep.top_exponents.push((t.gens[j].name.clone(), found));
        if found.is_none() {
            return Ok(rep.fail(
                Verdict::Refuted,
                "top",
                Some(t.gens[j].name.clone()),
                format!("no sigma^n({}) lies in L_n within the horizon", t.gens[j].name),
            ));
        }
    }
    for (f, fs) in ext.spec.families.iter().enumerate() {
        let name = format!("{}{}", fs.name, fs.start);
        if ext.certified() && covered.map_or(true, |c| f > c) {
            // members of a later family in a certified radical chain have degree > 1 over all earlier ones
            rep.top_exponents.push((name.clone(), None));
            return Ok(rep.fail(
                Verdict::Refuted,
                "top",
                Some(name.clone()),
                format!("family {} is not generated by the chain: each sigma^n({name}) has degree {} over L_n", fs.name, ext.family_degree(f)),
            ));
        }
        let mut found = None;
        for n in 0..=h as i32 {
            let Some(m) = t.member(f, fs.start + n) else { break };
            if cur.contains(&k, &t.gen(m)) {
                found = Some(n as usize);
                break;
            }
        }
        rep.top_exponents.push((name.clone(), found));
        if found.is_none() {
            inconclusive.get_or_insert(format!("top: no transform of {name} in L_n within the horizon"));
        }
    }
    if let Some(m) = inconclusive {
        rep.verdict = Verdict::Inconclusive;
        rep.message = m;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchAttempt {
    pub chain: BabbittChain,
    pub verdict: Verdict,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub chain: Option<BabbittChain>,
    pub report: Option<BabbittReport>,
    pub attempts: Vec<SearchAttempt>,
}

/// Try the strong core as L0 with the given (or default) candidate step lists.
///
/// Default candidates: no step, the first member of the last family, each family in turn.
pub fn babbitt_search(ext: &TowerExtension, candidates: Option<Vec<Vec<Vec<String>>>>, horizon: usize) -> Result<SearchResult> {
    let core = strong_core_finite_ext(ext)?;
    let l0: Vec<String> = if core.dim() == 1 {
        Vec::new()
    } else if core.dim() == core.tower.dim() {
        core.tower.gens.iter().map(|g| g.name.clone()).collect()
    } else {
        core.basis_strings()
    };
    let fams: Vec<String> = ext.spec.families.iter().map(|f| format!("{}{}", f.name, f.start)).collect();
    let cands = candidates.unwrap_or_else(|| {
        let mut c: Vec<Vec<Vec<String>>> = vec![vec![]];
        if let Some(last) = fams.last() {
            c.push(vec![vec![last.clone()]]);
            c.push(fams.iter().map(|f| vec![f.clone()]).collect());
        }
        c
    });
    let mut attempts = Vec::new();
    let mut best: Option<BabbittReport> = None;
    for steps in cands {
        let chain = BabbittChain { l0: l0.clone(), steps };
        let r = babbitt_verify(ext, &chain, horizon)?;
        attempts.push(SearchAttempt { chain: chain.clone(), verdict: r.verdict, message: r.message.clone() });
        if r.verdict == Verdict::Verified {
            return Ok(SearchResult { chain: Some(chain), report: Some(r), attempts });
        }
        if best.as_ref().map_or(true, |b| b.verdict == Verdict::Refuted && r.verdict == Verdict::Inconclusive) {
            best = Some(r);
        }
    }
    Ok(SearchResult { chain: None, report: best, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::generate::examples;

    fn chain(l0: &[&str], steps: &[&[&str]]) -> BabbittChain {
        BabbittChain {
            l0: l0.iter().map(|s| s.to_string()).collect(),
            steps: steps.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }

    #[test]
    fn radical_towers_verify() {
        let t = examples::radical(5, 2);
        let r = babbitt_verify(&t, &chain(&[], &[&["a0"]]), 5).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{}", r.message);
        assert_eq!(r.steps[0].degree, 2);
        assert!(r.steps[0].d_sequence.iter().all(|&d| d == 2));
        let t3 = examples::radical(7, 3);
        assert_eq!(babbitt_verify(&t3, &chain(&[], &[&["a0"]]), 3).unwrap().verdict, Verdict::Verified);
    }

    #[test]
    fn stack_and_refutations() {
        let s = examples::radical_stack();
        let r = babbitt_verify(&s, &chain(&[], &[&["a0"], &["c0"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{}", r.message);
        let r = babbitt_verify(&s, &chain(&[], &[&["a0"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.failed_at.as_deref(), Some("top"));
        let r = babbitt_verify(&s, &chain(&[], &[&["a0^2"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        let c = examples::corrupted();
        let r = babbitt_verify(&c, &chain(&[], &[&["a0"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.witness.as_deref(), Some("alpha"));
        let r = babbitt_verify(&c, &chain(&["alpha"], &[&["a0"]]), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{}", r.message);
    }

    #[test]
    fn search_finds_chains() {
        let s = examples::radical_stack();
        let r = babbitt_search(&s, None, 3).unwrap();
        assert_eq!(r.chain.unwrap().steps, vec![vec!["c0".to_string()]]);
        let f = examples::f9_over_f3();
        let r = babbitt_search(&f, None, 3).unwrap();
        assert!(r.chain.unwrap().steps.is_empty());
    }
}
