//! Command-line front end. Every command is a pure function of (command, params, instance)
//! that produces a verdict and a JSON result; certificates embed all three, so `verify-cert`
//! recomputes them from the file alone.

pub mod suites;

use crate::diffpoly::{SigmaIdealPresentation, TruncatedQuotient};
use crate::error::{Error, Result};
use crate::findiff::predicates::{is_etale, is_sigma_reduced, is_sigma_separable};
use crate::findiff::{strong_core, FinSigmaAlgebra};
use crate::hopf::{gallery, hopf_validate, strong_core_is_hopf_subalgebra, SigmaHopf};
use crate::io::{algebra_from_json, elem_to_json, field_from_json};
use crate::linalg::{self, Mat};
use crate::towers::generate::examples;
use crate::towers::{babbitt_search, babbitt_verify, compatible, limit_degree, strong_core_finite_ext, BabbittChain, TowerExtension, Verdict};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const CERTIFICATE_TAG: &str = "sigma-etale/1";
pub const SEED_ENV: &str = "SIGMA_ETALE_SEED";

#[derive(Parser, Debug)]
#[command(name = "sigma-etale", version, about = "Exact decision procedures for difference algebras, with certificates")]
pub struct Cli {
    /// Seed for every pseudorandom choice.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Predicate {
    Etale,
    Sreduced,
    Sseparable,
    Ssetale,
}

impl Predicate {
    fn name(self) -> &'static str {
        match self {
            Predicate::Etale => "etale",
            Predicate::Sreduced => "sreduced",
            Predicate::Sseparable => "sseparable",
            Predicate::Ssetale => "ssetale",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a predicate of a finite sigma-algebra.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        predicate: Predicate,
    },
    /// Strong core of an algebra, a tower, or a presentation truncated at --level.
    Core {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
    /// Limit degree of a tower.
    Ld {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        horizon: usize,
    },
    #[command(subcommand)]
    Babbitt(BabbittCmd),
    /// Whether two towers over the same base embed into a common extension.
    Compat { a: PathBuf, b: PathBuf },
    #[command(subcommand)]
    Hopf(HopfCmd),
    /// Built-in examples: example-core-not-hopf, hopf, towers.
    Gallery {
        name: String,
        #[arg(long, default_value_t = 2)]
        level: u32,
        #[arg(long = "char", default_value_t = 5)]
        characteristic: u64,
    },
    /// Seeded property suites: example, prop12, closure, functoriality, bruteforce, towers,
    /// babbitt, compat, hopf, or all.
    Suite { name: String },
    /// Recompute a certificate and compare.
    VerifyCert { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum BabbittCmd {
    /// Verify a chain file {"tower", "l0", "steps"}.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
    },
    /// Search a chain starting at the strong core.
    Search {
        file: PathBuf,
        /// JSON list of candidate step lists.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum HopfCmd {
    /// Check the sigma-Hopf axioms.
    Validate { file: PathBuf },
    /// Check that the strong core is a sigma-Hopf subalgebra.
    CoreCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
}

/// Outcome of one command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub result: Value,
    pub text: String,
}

fn outcome(verdict: Verdict, result: Value, text: String) -> Outcome {
    Outcome { verdict, result, text }
}

fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Error::Input(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())))
}

fn bool_verdict(b: bool) -> Verdict {
    if b {
        Verdict::Verified
    } else {
        Verdict::Refuted
    }
}

fn param_u64(params: &Value, key: &str, default: u64) -> Result<u64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.as_u64().ok_or_else(|| Error::Input(format!("params.{key}: expected a nonnegative integer"))),
    }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Input(format!("{path}: missing field '{key}'")))
}

/// Translate parsed arguments into (command, params, instance).
pub fn request(cmd: &Command, seed: u64) -> Result<(String, Value, Value)> {
    Ok(match cmd {
        Command::Check { file, predicate } => ("check".into(), json!({"predicate": predicate.name()}), read_json(file)?),
        Command::Core { file, level } => ("core".into(), json!({"level": level}), read_json(file)?),
        Command::Ld { file, horizon } => ("ld".into(), json!({"horizon": horizon}), read_json(file)?),
        Command::Babbitt(BabbittCmd::Verify { file, horizon }) => ("babbitt verify".into(), json!({"horizon": horizon}), read_json(file)?),
        Command::Babbitt(BabbittCmd::Search { file, candidates, horizon }) => {
            let cands = match candidates {
                Some(p) => read_json(p)?,
                None => Value::Null,
            };
            ("babbitt search".into(), json!({"horizon": horizon}), json!({"tower": read_json(file)?, "candidates": cands}))
        }
        Command::Compat { a, b } => ("compat".into(), json!({}), json!({"a": read_json(a)?, "b": read_json(b)?})),
        Command::Hopf(HopfCmd::Validate { file }) => ("hopf validate".into(), json!({}), read_json(file)?),
        Command::Hopf(HopfCmd::CoreCheck { file, level }) => ("hopf core-check".into(), json!({"level": level}), read_json(file)?),
        Command::Gallery { name, level, characteristic } => {
            ("gallery".into(), json!({"name": name, "level": level, "char": characteristic}), Value::Null)
        }
        Command::Suite { name } => ("suite".into(), json!({"name": name, "seed": seed}), Value::Null),
        Command::VerifyCert { .. } => return Err(Error::Input("verify-cert is not a certified command".into())),
    })
}

/// Run one command.
pub fn execute(command: &str, params: &Value, instance: &Value) -> Result<Outcome> {
    match command {
        "check" => {
            let p = params.get("predicate").and_then(Value::as_str).unwrap_or("ssetale");
            check(&algebra_from_json(instance)?, p)
        }
        "core" => core(instance, param_u64(params, "level", 2)? as u32),
        "ld" => {
            let t = TowerExtension::from_json(instance)?;
            let r = limit_degree(&t, param_u64(params, "horizon", 6)? as usize)?;
            let v = if r.certified { Verdict::Verified } else { Verdict::Inconclusive };
            let text = format!("limit degree {} (d = {:?}), certified: {}", r.value, r.d_sequence, r.certified);
            Ok(outcome(v, serde_json::to_value(&r).unwrap(), text))
        }
        "babbitt verify" => {
            let (t, ch) = BabbittChain::from_json(instance)?;
            let r = babbitt_verify(&t, &ch, param_u64(params, "horizon", 3)? as usize)?;
            let text = format!("{}{}", r.message, r.witness.as_ref().map(|w| format!("; witness {w}")).unwrap_or_default());
            Ok(outcome(r.verdict, serde_json::to_value(&r).unwrap(), text))
        }
        "babbitt search" => {
            let t = TowerExtension::from_json(field(instance, "tower", "instance")?)?;
            let cands = match instance.get("candidates") {
                None | Some(Value::Null) => None,
                Some(c) => Some(serde_json::from_value(c.clone()).map_err(|e| Error::Input(format!("candidates: {e}")))?),
            };
            let r = babbitt_search(&t, cands, param_u64(params, "horizon", 3)? as usize)?;
            let v = if r.chain.is_some() { Verdict::Verified } else { Verdict::Inconclusive };
            let text = match &r.chain {
                Some(c) => format!("chain found: l0 = {:?}, steps = {:?}", c.l0, c.steps),
                None => format!("no chain among {} candidates", r.attempts.len()),
            };
            Ok(outcome(v, serde_json::to_value(&r).unwrap(), text))
        }
        "compat" => {
            let a = TowerExtension::from_json(field(instance, "a", "instance")?)?;
            let b = TowerExtension::from_json(field(instance, "b", "instance")?)?;
            let r = compatible(&a, &b)?;
            let text = format!("compatible: {} ({})", r.compatible, r.reason);
            Ok(outcome(bool_verdict(r.compatible), serde_json::to_value(&r).unwrap(), text))
        }
        "hopf validate" => {
            let r = hopf_validate(&SigmaHopf::from_json(instance)?)?;
            let text = r
                .checks
                .iter()
                .map(|c| format!("{}: {}{}", c.law, if c.passed { "ok" } else { "FAILS" }, c.witness.as_ref().map(|w| format!(" at {w}")).unwrap_or_default()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(outcome(bool_verdict(r.valid), serde_json::to_value(&r).unwrap(), text))
        }
        "hopf core-check" => {
            let h = SigmaHopf::from_json(instance)?;
            let c = strong_core_is_hopf_subalgebra(&h, param_u64(params, "level", 2)? as u32)?;
            let text = format!("{} (core dim {}, exact {})", c.message, c.core_dim, c.core_exact);
            Ok(outcome(c.verdict, serde_json::to_value(&c).unwrap(), text))
        }
        "gallery" => gallery_run(params),
        "suite" => {
            let name = params.get("name").and_then(Value::as_str).ok_or_else(|| Error::Input("params.name: expected a string".into()))?;
            suite(name, param_u64(params, "seed", 42)?)
        }
        other => Err(Error::Input(format!("unknown command '{other}'"))),
    }
}

fn trace_gram(a: &FinSigmaAlgebra) -> Mat {
    let k = &a.base;
    let n = a.dim;
    let tau: Vec<_> = (0..n).map(|i| (0..n).fold(k.zero(), |s, l| k.add(&s, &a.struct_consts[i][l][l]))).collect();
    (0..n).map(|i| (0..n).map(|j| linalg::dot(k, &a.struct_consts[i][j], &tau)).collect()).collect()
}

/// A nonzero x with sigma(x) = 0, over bases where sigma is bijective.
fn sigma_kernel_witness(a: &FinSigmaAlgebra) -> Option<Value> {
    let k = &a.base;
    let v = linalg::kernel(k, &a.sigma_matrix, a.dim).into_iter().next()?;
    let x: Option<Vec<_>> = v.iter().map(|c| k.sigma_inv(c).ok()).collect();
    let x = x?;
    a.is_zero(&a.sigma(&x)).then(|| json!({"kind": "sigma(x) = 0", "x": elem_to_json(k, &x)}))
}

fn check(a: &FinSigmaAlgebra, p: &str) -> Result<Outcome> {
    let k = &a.base;
    let etale = || -> (bool, Option<Value>) {
        if is_etale(a) {
            return (true, None);
        }
        let x = linalg::kernel(k, &trace_gram(a), a.dim).into_iter().next();
        (false, x.map(|x| json!({"kind": "trace-form radical", "x": elem_to_json(k, &x)})))
    };
    let separable = || -> (bool, Option<Value>) {
        if is_sigma_separable(a) {
            return (true, None);
        }
        let c = linalg::kernel(k, &a.sigma_matrix, a.dim).into_iter().next();
        (false, c.map(|c| json!({"kind": "sum c_j sigma(e_j) = 0", "c": elem_to_json(k, &c)})))
    };
    let (holds, witness) = match p {
        "etale" => etale(),
        "sseparable" => separable(),
        "sreduced" => {
            let r = is_sigma_reduced(a);
            (r, if r { None } else { sigma_kernel_witness(a) })
        }
        "ssetale" => match etale() {
            (true, _) => separable(),
            other => other,
        },
        other => return Err(Error::Input(format!("params.predicate: unknown predicate '{other}'"))),
    };
    let text = format!(
        "{p}: {holds}{}",
        witness.as_ref().map(|w| format!("; witness {}", serde_json::to_string(w).unwrap())).unwrap_or_default()
    );
    Ok(outcome(bool_verdict(holds), json!({"predicate": p, "holds": holds, "dim": a.dim, "witness": witness}), text))
}

fn core(instance: &Value, level: u32) -> Result<Outcome> {
    if instance.get("levels").is_some() || instance.get("families").is_some() {
        let t = TowerExtension::from_json(instance)?;
        let c = strong_core_finite_ext(&t)?;
        let v = if c.strongly_etale { Verdict::Verified } else { Verdict::Inconclusive };
        let text = format!("strong core of dimension {} in {}: {}", c.dim(), c.tower.dim(), c.basis_strings().join(", "));
        return Ok(outcome(v, c.to_json(), text));
    }
    if let Some(p) = instance.get("presentation") {
        let k = field_from_json(field(instance, "base", "instance")?)?;
        let tq = TruncatedQuotient::new(SigmaIdealPresentation::from_json(&k, p)?)?;
        let c = tq.strong_core_truncated(level)?;
        let basis: Vec<String> = c.subspace.rows.iter().map(|r| tq.ring().format(&tq.elem_poly(level, r))).collect();
        let v = if c.exact { Verdict::Verified } else { Verdict::Inconclusive };
        let text = format!("level {level}: strong core of dimension {} (exact {}): {}", c.dim(), c.exact, basis.join(", "));
        return Ok(outcome(v, json!({"level": level, "dim": c.dim(), "level_dim": tq.level(level).dim(), "exact": c.exact, "basis": basis}), text));
    }
    let a = algebra_from_json(instance)?;
    let c = strong_core(&a)?;
    let k = &a.base;
    let basis: Vec<Value> = c.subspace.rows.iter().map(|r| elem_to_json(k, r)).collect();
    let v = if c.complete { Verdict::Verified } else { Verdict::Inconclusive };
    let text = format!("strong core of dimension {} in {} (complete {}, splitting degree {})", c.dim(), a.dim, c.complete, c.splitting_degree);
    Ok(outcome(
        v,
        json!({"dim": c.dim(), "algebra_dim": a.dim, "complete": c.complete, "splitting_degree": c.splitting_degree, "atoms": c.atoms, "basis": basis}),
        text,
    ))
}

fn gallery_run(params: &Value) -> Result<Outcome> {
    let name = params.get("name").and_then(Value::as_str).unwrap_or("");
    match name {
        "example-core-not-hopf" => {
            let p = param_u64(params, "char", 5)?;
            let n = param_u64(params, "level", 2)? as u32;
            let r = gallery::example_core_not_hopf(p, n)?;
            let text = format!(
                "char {p}, level {n}: strong core dim {} (exact {}), etale union dim >= {}, core is a Hopf subalgebra: {:?}",
                r.core_dim, r.core_exact, r.etale_union_lower_bound, r.core_is_hopf_subalgebra
            );
            let v = bool_verdict(r.separation && r.hopf_valid && r.core_is_hopf_subalgebra == Verdict::Verified);
            Ok(outcome(v, serde_json::to_value(&r).unwrap(), text))
        }
        "hopf" => {
            let n = param_u64(params, "level", 2)? as u32;
            let p = param_u64(params, "char", 5)?;
            let k = crate::DifferenceField::prime(p, 0)?;
            let mut members = vec![
                ("example carrier".to_string(), gallery::example_carrier(&k)?),
                ("group-like".to_string(), gallery::group_like(&k)?),
                ("first factor".to_string(), gallery::first_factor(&k)?),
            ];
            members.extend(gallery::finite_members(&k));
            let mut rows = Vec::new();
            let mut text = Vec::new();
            let mut all = true;
            for (name, h) in &members {
                let c = strong_core_is_hopf_subalgebra(h, n)?;
                all &= c.verdict == Verdict::Verified;
                text.push(format!("{name}: {:?}, core dim {}", c.verdict, c.core_dim));
                rows.push(json!({"name": name, "hopf": h.to_json(), "core_check": c}));
            }
            Ok(outcome(bool_verdict(all), json!({"char": p, "level": n, "members": rows}), text.join("\n")))
        }
        "towers" => {
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for name in examples::NAMES {
                let t = examples::by_name(name).unwrap();
                let c = strong_core_finite_ext(&t)?;
                let ld = limit_degree(&t, 6)?;
                text.push(format!("{name}: explicit dim {}, strong core dim {}, limit degree {}", c.tower.dim(), c.dim(), ld.value));
                rows.push(json!({"name": name, "tower": t.to_json(), "core_dim": c.dim(), "limit_degree": ld}));
            }
            Ok(outcome(Verdict::Verified, json!({"towers": rows}), text.join("\n")))
        }
        other => Err(Error::Input(format!("unknown gallery '{other}'; known: example-core-not-hopf, hopf, towers"))),
    }
}

fn suite(name: &str, seed: u64) -> Result<Outcome> {
    let names: Vec<&str> = if name == "all" { suites::NAMES.to_vec() } else { vec![name] };
    let reports = names.iter().map(|n| suites::run(n, seed)).collect::<Result<Vec<_>>>()?;
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let mut text = Vec::new();
    for r in &reports {
        text.push(format!("{}: {} instances, {} failures", r.suite, r.instances, r.failures));
        for c in &r.checks {
            let tail = c.first_failure.as_ref().map(|f| format!(" (first: {f})")).unwrap_or_default();
            text.push(format!("  {}: {}/{} failed{tail}", c.name, c.failures, c.instances));
        }
    }
    let result = if reports.len() == 1 { serde_json::to_value(&reports[0]).unwrap() } else { json!({"seed": seed, "failures": failures, "suites": reports}) };
    Ok(outcome(bool_verdict(failures == 0), result, text.join("\n")))
}

pub fn certificate(command: &str, params: &Value, instance: &Value, o: &Outcome) -> Value {
    json!({
        "certificate": CERTIFICATE_TAG,
        "command": command,
        "params": params,
        "instance": instance,
        "verdict": o.verdict,
        "result": o.result,
    })
}

/// First path at which two JSON values differ.
pub fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, v) in x {
                match y.get(k) {
                    Some(w) => {
                        if let Some(d) = first_difference(v, w, &format!("{path}.{k}")) {
                            return Some(d);
                        }
                    }
                    None => return Some(format!("{path}.{k}")),
                }
            }
            y.keys().find(|k| !x.contains_key(*k)).map(|k| format!("{path}.{k}"))
        }
        (Value::Array(x), Value::Array(y)) => {
            for (i, (v, w)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(v, w, &format!("{path}[{i}]")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| format!("{path}[{}]", x.len().min(y.len())))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

/// Recompute a certificate; Verified when verdict and result agree.
pub fn verify_certificate(cert: &Value) -> Result<Outcome> {
    if cert.get("certificate").and_then(Value::as_str) != Some(CERTIFICATE_TAG) {
        return Err(Error::Input(format!("certificate: expected tag '{CERTIFICATE_TAG}'")));
    }
    let command = field(cert, "command", "certificate")?.as_str().ok_or_else(|| Error::Input("certificate.command: expected a string".into()))?;
    let params = field(cert, "params", "certificate")?;
    let instance = cert.get("instance").unwrap_or(&Value::Null);
    let o = execute(command, params, instance)?;
    let fresh = certificate(command, params, instance, &o);
    let diff = first_difference(&fresh["verdict"], &cert["verdict"], "verdict").or_else(|| first_difference(&fresh["result"], &cert["result"], "result"));
    let text = match &diff {
        None => format!("certificate for '{command}' re-verified"),
        Some(d) => format!("certificate for '{command}' differs at {d}"),
    };
    Ok(outcome(bool_verdict(diff.is_none()), json!({"command": command, "matches": diff.is_none(), "first_difference": diff}), text))
}

fn emit(format: Format, value: &Value, text: &str, verdict: Verdict) {
    use std::io::Write;
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value).unwrap(),
        Format::Text => format!("{text}\nverdict: {}", serde_json::to_value(verdict).unwrap().as_str().unwrap()),
    };
    // a closed pipe is not an error of the computation
    let _ = writeln!(std::io::stdout().lock(), "{out}");
}

/// Parse arguments, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let res = match &cli.command {
        Command::VerifyCert { file } => read_json(file).and_then(|c| verify_certificate(&c)).map(|o| (o.result.clone(), o)),
        cmd => request(cmd, cli.seed).and_then(|(c, p, i)| execute(&c, &p, &i).map(|o| (certificate(&c, &p, &i, &o), o))),
    };
    match res {
        Ok((value, o)) => {
            emit(cli.format, &value, &o.text, o.verdict);
            o.verdict.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
