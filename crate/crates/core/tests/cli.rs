//! End-to-end runs of the binary on the sample inputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigma-etale")).args(args).env_remove("SIGMA_ETALE_SEED").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_slice(&run(args).stdout).unwrap()
}

fn scratch(name: &str, body: &str) -> String {
    let p = std::env::temp_dir().join(format!("sigma-etale-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_codes_follow_verdicts() {
    let cases: &[(&[&str], i32)] = &[
        (&["check", &data("swap.json"), "--predicate", "ssetale"], 0),
        (&["check", &data("collapse.json"), "--predicate", "ssetale"], 2),
        (&["check", &data("collapse.json"), "--predicate", "sreduced"], 2),
        (&["check", &data("nilpotent.json"), "--predicate", "etale"], 2),
        (&["check", &data("nilpotent.json"), "--predicate", "sreduced"], 0),
        (&["ld", &data("radical2.json")], 0),
        (&["babbitt", "verify", &data("chain_radical2.json")], 0),
        (&["babbitt", "verify", &data("chain_corrupted.json")], 2),
        (&["compat", &data("f4_frob.json"), &data("f16_frob2.json")], 2),
        (&["hopf", "validate", &data("hopf_functions_z2.json")], 0),
        (&["hopf", "validate", &data("hopf_translation.json")], 2),
        (&["hopf", "core-check", &data("hopf_example.json")], 0),
        (&["core", &data("example_presentation.json"), "--level", "2"], 0),
        (&["gallery", "example-core-not-hopf", "--level", "2", "--char", "5"], 0),
    ];
    for (args, want) in cases {
        assert_eq!(code(args), *want, "{args:?}");
    }
}

#[test]
fn certificates_carry_the_run() {
    let c = json(&["ld", &data("radical2.json")]);
    assert_eq!(c["certificate"], "sigma-etale/1");
    assert_eq!(c["command"], "ld");
    assert_eq!(c["verdict"], "verified");
    assert_eq!(c["result"]["value"], 2);
    let g = json(&["gallery", "example-core-not-hopf", "--level", "2", "--char", "5"]);
    assert_eq!(g["result"]["core_dim"], 1);
    assert_eq!(g["result"]["etale_union_lower_bound"], 8);
}

#[test]
fn certificates_verify_and_tampering_is_caught() {
    for (i, args) in [
        vec!["check".to_string(), data("swap.json"), "--predicate".into(), "ssetale".into()],
        vec!["babbitt".into(), "verify".into(), data("chain_corrupted.json")],
        vec!["compat".into(), data("f4_frob.json"), data("f4_id.json")],
    ]
    .iter()
    .enumerate()
    {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        let cert = scratch(&format!("cert{i}.json"), std::str::from_utf8(&out.stdout).unwrap());
        assert_eq!(code(&["verify-cert", &cert]), 0, "{args:?}");
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["verdict"] = if v["verdict"] == "verified" { "refuted".into() } else { "verified".into() };
        let bad = scratch(&format!("bad{i}.json"), &v.to_string());
        let report = json(&["verify-cert", &bad]);
        assert_eq!(code(&["verify-cert", &bad]), 2);
        assert_eq!(report["first_difference"], "verdict");
    }
}

#[test]
fn malformed_input_is_an_input_error() {
    let truncated = scratch("truncated.json", "{\"base\":\"F5\",\"split\":[1,");
    let wrong_base = scratch("wrongbase.json", "{\"base\":\"F6\",\"split\":[1,0]}");
    for args in [
        vec!["check", truncated.as_str(), "--predicate", "etale"],
        vec!["check", wrong_base.as_str(), "--predicate", "etale"],
        vec!["check", "/nonexistent/file.json", "--predicate", "etale"],
        vec!["suite", "nosuch"],
        vec!["gallery", "nosuch"],
        vec!["verify-cert", truncated.as_str()],
    ] {
        assert_eq!(code(&args), 1, "{args:?}");
    }
}

#[test]
fn seeded_output_is_reproducible() {
    let a = run(&["--seed", "7", "suite", "babbitt"]).stdout;
    let b = run(&["--seed", "7", "suite", "babbitt"]).stdout;
    assert_eq!(a, b);
    let env = Command::new(env!("CARGO_BIN_EXE_sigma-etale")).args(["suite", "babbitt"]).env("SIGMA_ETALE_SEED", "7").output().unwrap();
    assert_eq!(env.stdout, a);
}

#[test]
fn text_format_ends_with_the_verdict() {
    let out = run(&["--format", "text", "check", &data("swap.json"), "--predicate", "etale"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.trim_end().lines().last(), Some("verdict: verified"));
}
