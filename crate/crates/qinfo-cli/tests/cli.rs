// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use qinfo::channels::Channel;
use qinfo::entropy::{markov_state, MarkovBlock};
use qinfo::matkit::{c, CMatrix};
use qinfo::qec::{pauli_on, repetition_code};
use qinfo::randkit::{random_channel, random_pure, random_state, stream_rng};
use qinfo::states::max_entangled;
use qinfo::zeroerr::OperatorSystem;
use qinfo_cli::canon::to_canonical;
use qinfo_cli::doc::{self, Document};
use qinfo_cli::{run, Outcome};
use serde_json::Value;
use tempfile::TempDir;

fn qinfo(args: &[&str]) -> Outcome {
    run(std::iter::once("qinfo").chain(args.iter().copied()))
}

fn report(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = qinfo(&full);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, to_canonical(v)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn real(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn werner_report() {
    let r = report(&["werner", "--d", "3", "--f", "0.5"]);
    assert_eq!(r["schmidt_number"], 2);
    assert_eq!(r["ppt"], false);
    assert_eq!(r["state"]["kind"], "state");
    assert_eq!(report(&["werner", "--d", "3", "--f", "0.2"])["schmidt_number"], 1);
    assert_eq!(report(&["werner", "--d", "3", "--f", "0.9"])["schmidt_number"], 3);
    let bad = qinfo(&["werner", "--d", "3", "--f", "1.5"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("F=1.5"), "{}", bad.stderr);
}

#[test]
fn theta_of_complete_graph_edge_list() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("k5.edges");
    let mut text = String::from("# complete graph on five vertices\n");
    for u in 0..5 {
        for v in u + 1..5 {
            text.push_str(&format!("{u} {v}\n"));
        }
    }
    std::fs::write(&p, text).unwrap();
    let r = report(&["theta", s(&p)]);
    assert!((real(&r, "value") - 1.0).abs() <= 1e-4, "{r}");
    assert_eq!(r["independence_number"], 1);

    let c5 = write(&dir, "c5.json", &serde_json::from_str(&qinfo(&["example", "c5"]).stdout).unwrap());
    let r = report(&["theta", s(&c5)]);
    let cos = (std::f64::consts::PI / 5.0).cos();
    assert!((real(&r, "value") - 5.0 * cos / (1.0 + cos)).abs() <= 1e-4);
    assert_eq!(r["independence_number"], 2);

    let sys = write(&dir, "ci2.json", &doc::system_value(&OperatorSystem::scalars(2)));
    let r = report(&["theta", s(&sys)]);
    assert!((real(&r, "value") - 4.0).abs() <= 1e-3);
    assert!(r.get("independence_number").is_none());

    std::fs::write(dir.path().join("bad.edges"), "0 1\n1 x\n").unwrap();
    let bad = qinfo(&["theta", s(&dir.path().join("bad.edges"))]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("line 2"), "{}", bad.stderr);
}

#[test]
fn shor_recovery_from_files() {
    let dir = TempDir::new().unwrap();
    let code = dir.path().join("shor.json");
    let errs = dir.path().join("one_paulis.json");
    std::fs::write(&code, qinfo(&["example", "shor-code"]).stdout).unwrap();
    std::fs::write(&errs, qinfo(&["example", "shor-errors"]).stdout).unwrap();
    let r = report(&["qec", "recover", s(&code), s(&errs), "--verify", "50"]);
    assert!(real(&r, "max_deviation") <= 1e-8, "{r}");
    assert_eq!(r["verified"], true);
    assert_eq!(r["error_count"], 28);
    let r = report(&["qec", "check", s(&code), s(&errs)]);
    assert_eq!(r["passes"], true);
}

#[test]
fn kl_violation_is_an_analysis_failure() {
    let dir = TempDir::new().unwrap();
    let code = write(&dir, "rep.json", &doc::code_value(&repetition_code(3)));
    let ops = vec![CMatrix::identity(8), pauli_on(3, 0, 'Z')];
    let errs = write(&dir, "z.json", &doc::errors_value(&ops, None));
    let out = qinfo(&["qec", "check", s(&code), s(&errs), "--json"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["status"], "failed");
    assert_eq!(v["reason"]["kind"], "KlViolated");
    assert_eq!(v["passes"], false);
    assert!(out.stderr.contains("KlViolated"));

    let out = qinfo(&["qec", "recover", s(&code), s(&errs), "--json"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["status"], "error");
    assert_eq!(v["reason"]["kind"], "KlViolated");

    let wrong = write(&dir, "small.json", &doc::errors_value(&[CMatrix::identity(4)], None));
    assert_eq!(qinfo(&["qec", "check", s(&code), s(&wrong)]).code, 2);
}

#[test]
fn malformed_inputs_exit_two_with_location() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{\n  \"kind\": \"state\",\n  \"dims\": [2]\n  \"rho\": 1\n}").unwrap();
    let out = qinfo(&["ssa", s(&p)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);

    let cases = [
        (r#"{"kind":"state","dims":[2],"rho":[[[1,0],[0,0]],[[0,0],[0,"x"]]]}"#, "rho[1][1][1]"),
        (r#"{"kind":"state","dims":[2],"rho":[[[1,0],[0,0]],[[0,0]]]}"#, "rho[1]"),
        (r#"{"kind":"state","dims":[2]}"#, "rho"),
        (r#"{"kind":"state","dims":[0],"vector":[]}"#, "dims"),
        (r#"{"kind":"state","dims":[2],"rho":[[[2,0],[0,0]],[[0,0],[0,0]]]}"#, "rho"),
        (r#"{"kind":"channel","din":2,"dout":2,"kraus":[[[[1,0]]]]}"#, "kraus"),
        (r#"{"kind":"graph","vertices":3,"edges":[[0,0]]}"#, "edges"),
        (r#"{"kind":"potato"}"#, "kind"),
        (r#"[1,2]"#, "JSON object"),
        (r#"{"kind":"code","isometry":{"rows":2,"cols":1,"entries":[[5,0,[1,0]]]}}"#, "isometry.entries[0]"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("case{k}.json"));
        std::fs::write(&p, text).unwrap();
        let out = qinfo(&["petz", s(&p), s(&p)]);
        assert_eq!(out.code, 2, "{text}");
        assert!(out.stderr.contains(needle), "{text}: {}", out.stderr);
        assert!(out.stdout.is_empty());
    }

    assert_eq!(qinfo(&["frobnicate"]).code, 2);
    assert_eq!(qinfo(&["werner", "--d", "three", "--f", "0.5"]).code, 2);
    assert_eq!(qinfo(&["ssa", "/nonexistent/state.json"]).code, 2);
    let help = qinfo(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("tailbound"));
}

#[test]
fn channel_analysis() {
    let dir = TempDir::new().unwrap();
    let g = 0.3f64;
    let k0 = CMatrix::from_real_diag(&[1.0, (1.0 - g).sqrt()]);
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(0, 1)] = c(g.sqrt(), 0.0);
    let damping = Channel::new(2, 2, vec![k0, k1]).unwrap();
    let p = write(&dir, "ad.json", &doc::channel_value(&damping));
    let r = report(&["channel", "analyze", s(&p)]);
    assert_eq!(r["cp"], true);
    assert_eq!(r["tp"], true);
    assert_eq!(r["unital"], false);
    assert_eq!(r["choi_rank"], 2);
    assert_eq!(r["complementary"]["din"], 2);
    assert_eq!(r["complementary"]["dout"], 2);

    let text = qinfo(&["channel", "analyze", s(&p)]);
    assert_eq!(text.code, 0);
    assert!(text.stdout.lines().any(|l| l.starts_with("choi_rank") && l.ends_with('2')));
}

#[test]
fn schmidt_report() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", &doc::pure_value(&max_entangled(2)));
    let r = report(&["schmidt", s(&bell)]);
    assert_eq!(r["schmidt_rank"], 2);
    assert!((real(&r, "entanglement_entropy") - 1.0).abs() < 1e-12);
    assert!((real(&r, "sum_squares") - 1.0).abs() < 1e-10);

    // A rank-one density matrix is accepted as a pure state.
    let psi = random_pure(&[2, 3, 2], &mut stream_rng(1, "cli.schmidt"));
    let dm = write(&dir, "psi.json", &doc::state_value(&psi.density()));
    let r = report(&["schmidt", s(&dm), "--cut", "2"]);
    assert_eq!(r["coefficients"].as_array().unwrap().len(), 2);
    assert_eq!(qinfo(&["schmidt", s(&dm), "--cut", "3"]).code, 2);

    let mixed = write(&dir, "mixed.json", &doc::state_value(&random_state(&[2, 2], &mut stream_rng(1, "m"))));
    assert_eq!(qinfo(&["schmidt", s(&mixed)]).code, 2);
}

#[test]
fn ssa_and_petz_reports() {
    let dir = TempDir::new().unwrap();
    let mut g = stream_rng(3, "cli.ssa");
    let blocks = vec![
        MarkovBlock { q: 0.4, left: random_pure(&[2, 2], &mut g).density(), right: random_state(&[1, 2], &mut g) },
        MarkovBlock { q: 0.6, left: random_state(&[2, 1], &mut g), right: random_pure(&[2, 2], &mut g).density() },
    ];
    let markov = write(&dir, "markov.json", &doc::state_value(&markov_state(&blocks).unwrap()));
    let r = report(&["ssa", s(&markov)]);
    assert_eq!(r["markov"], true);
    assert!(real(&r, "cmi") <= 1e-8);

    let bell_ac = max_entangled(2).density().with_dims(vec![2, 1, 2]).unwrap();
    let p = write(&dir, "bellac.json", &doc::state_value(&bell_ac));
    let r = report(&["ssa", s(&p)]);
    assert_eq!(r["markov"], false);
    assert!((real(&r, "cmi") - 2.0).abs() < 1e-10);

    let two = write(&dir, "two.json", &doc::state_value(&random_state(&[2, 2], &mut g)));
    assert_eq!(qinfo(&["ssa", s(&two)]).code, 2);

    let sigma = write(&dir, "sigma.json", &doc::state_value(&random_state(&[3], &mut g)));
    let ch = write(&dir, "ch.json", &doc::channel_value(&random_channel(3, 2, 2, &mut g)));
    let r = report(&["petz", s(&sigma), s(&ch)]);
    assert!(real(&r, "recovery_error") <= 1e-8, "{r}");
    assert_eq!(r["petz"]["din"], 2);
    assert_eq!(r["petz"]["dout"], 3);

    let cp = Channel::new(3, 3, vec![CMatrix::identity(3).scale_re(0.5)]).unwrap();
    let cp = write(&dir, "cp.json", &doc::channel_value(&cp));
    let out = qinfo(&["petz", s(&sigma), s(&cp), "--json"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["reason"]["kind"], "NotTracePreserving");
}

#[test]
fn randomize_report() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", &doc::pure_value(&max_entangled(2)));
    let r = report(&["randomize", s(&bell), "--n-unitaries", "4", "--sampler", "weyl"]);
    assert!(real(&r, "epsilon") <= 1e-12);
    assert_eq!(r["unitaries"].as_array().unwrap().len(), 4);
    let r = report(&["randomize", s(&bell), "--n-unitaries", "2"]);
    assert!(real(&r, "epsilon") > 0.01);
    assert_eq!(r["sampler"], "haar");
    assert_eq!(qinfo(&["randomize", s(&bell), "--n-unitaries", "0"]).code, 2);
}

#[test]
fn tailbound_report() {
    let r = report(&["tailbound", "--dist", "bernoulli", "--dim", "2", "--n", "50", "--alpha", "0.7", "--trials", "4000", "--seed", "9"]);
    assert_eq!(r["honored"], true);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["trials"], 4000);
    for key in ["n", "alpha", "mu", "empirical", "bound"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    let r = report(&["tailbound", "--dist", "psd", "--dim", "3", "--n", "40", "--alpha", "0.3", "--trials", "2000"]);
    assert_eq!(r["lower_tail"], true);
    assert_eq!(r["honored"], true);
    let bad = qinfo(&["tailbound", "--dist", "bernoulli", "--mu", "1.5", "--n", "5", "--alpha", "0.7"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let st = write(&dir, "st.json", &doc::state_value(&random_state(&[2, 3], &mut stream_rng(4, "cli.seed"))));
    let code = write(&dir, "rep.json", &doc::code_value(&repetition_code(3)));
    let mut flips = vec![CMatrix::identity(8)];
    flips.extend((0..3).map(|q| pauli_on(3, q, 'X')));
    let errs = write(&dir, "flips.json", &doc::errors_value(&flips, Some(&[0.7, 0.1, 0.1, 0.1])));
    let commands: Vec<Vec<&str>> = vec![
        vec!["randomize", s(&st), "--n-unitaries", "3", "--json"],
        vec!["randomize", s(&st), "--n-unitaries", "3", "--sampler", "weyl", "--json"],
        vec!["tailbound", "--dist", "psd", "--dim", "2", "--n", "20", "--alpha", "0.8", "--trials", "1500", "--json"],
        vec!["qec", "recover", s(&code), s(&errs), "--verify", "5", "--json"],
    ];
    for cmd in &commands {
        for seed in ["1", "77"] {
            let mut a = cmd.clone();
            a.extend(["--seed", seed]);
            let first = qinfo(&a);
            assert_eq!(first.code, 0, "{a:?}: {}", first.stderr);
            assert_eq!(first, qinfo(&a), "{a:?}");
        }
    }
    let a = qinfo(&["randomize", s(&st), "--n-unitaries", "3", "--json", "--seed", "1"]);
    let b = qinfo(&["randomize", s(&st), "--n-unitaries", "3", "--json", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn reports_roundtrip_byte_identical() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", &doc::pure_value(&max_entangled(2)));
    for args in [
        vec!["werner", "--d", "2", "--f", "0.3", "--json"],
        vec!["randomize", s(&bell), "--n-unitaries", "2", "--json"],
        vec!["schmidt", s(&bell), "--json"],
        vec!["example", "shor-code"],
        vec!["example", "shor-errors"],
    ] {
        let out = qinfo(&args).stdout;
        let reparsed: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(to_canonical(&reparsed) + "\n", out, "{args:?}");
    }
}

#[test]
fn documents_roundtrip() {
    let mut g = stream_rng(5, "cli.docs");
    let docs = vec![
        doc::state_value(&random_state(&[2, 3], &mut g)),
        doc::pure_value(&random_pure(&[3], &mut g)),
        doc::channel_value(&random_channel(2, 3, 2, &mut g)),
        doc::code_value(&repetition_code(5)),
        doc::errors_value(&[pauli_on(5, 2, 'Y')], Some(&[1.0])),
        serde_json::from_str(&qinfo(&["example", "k5"]).stdout).unwrap(),
        doc::system_value(&OperatorSystem::full(2)),
    ];
    for v in docs {
        let text = to_canonical(&v);
        let parsed = doc::parse_document(&text, "mem").unwrap();
        assert_eq!(to_canonical(&doc::document_value(&parsed)), text);
        assert_eq!(parsed.kind(), v["kind"].as_str().unwrap());
    }
    // Large sparse matrices use the entry-list form.
    let v = doc::code_value(&qinfo::qec::shor_code());
    assert!(v["isometry"].is_object());
    assert!(doc::code_value(&repetition_code(5))["isometry"].is_array());
    assert!(matches!(doc::parse_document(&to_canonical(&v), "mem").unwrap(), Document::Code(_)));
}

#[test]
fn binary_splits_streams() {
    let exe = env!("CARGO_BIN_EXE_qinfo");
    let ok = Command::new(exe).args(["werner", "--d", "2", "--f", "0.9", "--json"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stderr.is_empty());
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["schmidt_number"], 2);
    let bad = Command::new(exe).args(["ssa", "/nonexistent.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
}

fn arb_matrix() -> impl Strategy<Value = CMatrix> {
    (1usize..20, 1usize..20, 0.0f64..1.0).prop_flat_map(|(r, cdim, density)| {
        proptest::collection::vec((any::<f64>(), -1e6f64..1e6, 0.0f64..1.0), r * cdim).prop_map(move |raw| {
            let data = raw
                .into_iter()
                .map(|(a, b, keep)| {
                    let re = if a.is_finite() { a } else { 0.5 };
                    if keep < density { c(re, b) } else { c(0.0, 0.0) }
                })
                .collect();
            CMatrix::new(r, cdim, data).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_matrix_roundtrip(m in arb_matrix()) {
        let v = serde_json::json!({ "kind": "errors", "ops": [doc::matrix_value(&m)] });
        let text = to_canonical(&v);
        let reparsed: Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&to_canonical(&reparsed), &text);
        match doc::parse_document(&text, "mem").unwrap() {
            Document::Errors { ops, .. } => prop_assert_eq!(ops[0].data(), m.data()),
            other => prop_assert!(false, "parsed as {}", other.kind()),
        }
    }

    #[test]
    fn canonical_reals_roundtrip(x in any::<f64>()) {
        let v = qinfo_cli::canon::num(x);
        let text = to_canonical(&v);
        let back: Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(to_canonical(&back), text.clone());
        if x.is_finite() {
            prop_assert_eq!(back.as_f64().unwrap(), if x == 0.0 { 0.0 } else { x });
        }
    }
}
