use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use distcert::solver::{available, Z3_PRESET};
use serde_json::Value;

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances")
}

fn inst(name: &str) -> String {
    instances().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn running_args<'a>(spec: &'a str, mdp: &'a str, init: &'a str) -> Vec<&'a str> {
    vec!["--mdp", mdp, "--spec", spec, "--init", init]
}

fn solver_present() -> bool {
    let ok = available(Z3_PRESET);
    if !ok {
        eprintln!("z3 not found; skipping");
    }
    ok
}

#[test]
fn verify_writes_certificate_and_report() {
    if !solver_present() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.cert").display().to_string();
    let report = dir.path().join("r.json").display().to_string();
    let (mdp, spec, init, strat) = (
        inst("running.mdp"),
        inst("cav23-gf.spec"),
        inst("running.init"),
        inst("b-at-a.strategy"),
    );
    let mut args = vec!["verify"];
    args.extend(running_args(&spec, &mdp, &init));
    args.extend(["--strategy", &strat, "--cert-out", &cert, "--report", &report]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("verify: solved"));

    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["status"], "solved");
    assert_eq!(r["validation"]["verdict"], "validated");
    let attempts = r["attempts"].as_array().unwrap();
    assert!(!attempts.is_empty());
    let sha = attempts[0]["smt_sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    assert!(sha.chars().all(|c| c.is_ascii_hexdigit()));

    let text = fs::read_to_string(&cert).unwrap();
    assert!(text.contains("origin: given"));
    let mut check = vec!["check-cert"];
    check.extend(running_args(&spec, &mdp, &init));
    check.extend(["--cert", &cert]);
    let out = run(&check);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: validated"));

    let tampered = dir.path().join("bad.cert");
    let bad: String = text
        .lines()
        .map(|l| {
            if l.starts_with("rank 1: ") {
                "rank 1: V1 - 1\n".to_string()
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    fs::write(&tampered, bad).unwrap();
    let tampered = tampered.display().to_string();
    let mut check = vec!["check-cert"];
    check.extend(running_args(&spec, &mdp, &init));
    check.extend(["--cert", &tampered]);
    let out = run(&check);
    assert_eq!(out.status.code(), Some(1), "{}{}", stdout(&out), stderr(&out));
    assert!(!stdout(&out).contains("verdict: validated"));
}

#[test]
fn synthesis_produces_a_checkable_strategy() {
    if !solver_present() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("s.cert").display().to_string();
    let (mdp, spec, init) = (inst("running.mdp"), inst("cav23-until.spec"), inst("running.init"));
    let mut args = vec!["synthesize"];
    args.extend(running_args(&spec, &mdp, &init));
    args.extend(["--cert-out", &cert, "--json"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["status"], "solved");
    assert!(fs::read_to_string(&cert).unwrap().contains("origin: synthesized"));

    let mut sim = vec!["simulate"];
    sim.extend(running_args(&spec, &mdp, &init));
    sim.extend(["--cert", &cert, "--steps", "30", "--json"]);
    let out = run(&sim);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(s["steps"], 30);
    assert_eq!(s["letters"].as_array().unwrap().len(), 31);
    assert_ne!(s["verdict"], "inconsistent");
}

#[test]
fn unsatisfiable_specification_is_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("u.cert");
    let cert_s = cert.display().to_string();
    let (mdp, spec, init) = (inst("running.mdp"), inst("running-unsat.spec"), inst("running.init"));
    let mut args = vec!["synthesize"];
    args.extend(running_args(&spec, &mdp, &init));
    args.extend(["--cert-out", &cert_s, "--json"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["status"], "refuted");
    assert!(r["solution"].is_null());
    assert!(!cert.exists());
}

#[test]
fn simulation_of_given_strategy() {
    let (mdp, spec, init, strat) = (
        inst("running.mdp"),
        inst("cav23-gf.spec"),
        inst("running.init"),
        inst("b-at-a.strategy"),
    );
    let mut args = vec!["simulate"];
    args.extend(running_args(&spec, &mdp, &init));
    args.extend(["--strategy", &strat, "--steps", "12", "--json"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Under b@A from the uniform point μ₀(B) = μ₁(B) = 1/3 and μ₂(B) = 1/6.
    let letters = s["letters"].as_array().unwrap();
    assert_eq!(letters.len(), 13);
    assert_eq!(letters[0], 1);
    assert_eq!(letters[1], 1);
    assert_eq!(letters[2], 0);
    assert!(s["empty_at"].is_null());
}

#[test]
fn emit_smt_writes_the_system_and_stops() {
    let dir = tempfile::tempdir().unwrap();
    let smt = dir.path().join("x.smt2").display().to_string();
    let cert = dir.path().join("c.cert");
    let cert_s = cert.display().to_string();
    let (mdp, spec, init, strat) = (
        inst("running.mdp"),
        inst("cav23-gf.spec"),
        inst("running.init"),
        inst("b-at-a.strategy"),
    );
    let mut args = vec!["verify"];
    args.extend(running_args(&spec, &mdp, &init));
    args.extend(["--strategy", &strat, "--emit-smt", &smt, "--cert-out", &cert_s]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&smt).unwrap();
    assert!(text.contains("(declare-fun rank_q0_s0 () Real)"));
    assert!(text.contains("(check-sat)"));
    assert!(!text.contains("V0"));
    assert!(!cert.exists());
}

#[test]
fn describe_inline_specification() {
    let mdp = inst("running.mdp");
    let out = run(&[
        "describe",
        "--mdp",
        &mdp,
        "--spec",
        "G F \"V1>=0.249\"",
        "--init",
        "point:1/3,1/3,1/3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("locations: 2"));
    assert!(text.contains("transitions: 3"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let hoa = dir.path().join("rabin.hoa");
    fs::write(
        &hoa,
        "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"V0>=0.5\"\nAcceptance: 2 Fin(0) & Inf(1)\n\
         --BODY--\nState: 0\n[t] 0\n--END--\n",
    )
    .unwrap();
    let (mdp, init) = (inst("running.mdp"), inst("running.init"));
    let hoa = hoa.display().to_string();
    let out = run(&["describe", "--mdp", &mdp, "--spec", &hoa, "--init", &init]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unsupported acceptance"));

    let out = run(&["describe", "--mdp", "missing.mdp", "--spec", "G \"V0>=0\"", "--init", &init]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", "--mdp", &mdp]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["describe", "--mdp", &mdp, "--spec", "X \"V0>=0\"", "--init", &init]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gridworld_preset_matches_bundled_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("g");
    let out = run(&["gen-gridworld", "--preset", "3x3", "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for ext in ["mdp", "spec", "init"] {
        let generated = fs::read_to_string(out_dir.join(format!("gridworld.{ext}"))).unwrap();
        let bundled = fs::read_to_string(instances().join(format!("gridworld3.{ext}"))).unwrap();
        assert_eq!(generated, bundled, "{ext}");
    }

    let bad = dir.path().join("bad").display().to_string();
    let out = run(&["gen-gridworld", "--wall", "0,0", "--out", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pagerank_chain_is_stochastic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("p");
    let graph = inst("web.graph");
    let out = run(&["gen-pagerank", "--graph", &graph, "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let spec = fs::read_to_string(out_dir.join("pagerank.spec")).unwrap();
    assert!(spec.trim_start().starts_with("F G \"V"), "{spec}");
    let mdp = out_dir.join("pagerank.mdp").display().to_string();
    let init = out_dir.join("pagerank.init").display().to_string();
    let spec_path = out_dir.join("pagerank.spec").display().to_string();
    let out = run(&["describe", "--mdp", &mdp, "--spec", &spec_path, "--init", &init]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn bundled_instances_listed_and_written() {
    let out = run(&["instances"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["cav23-gf-verify", "cav23-until-synth", "gridworld3-synth", "running-unsat-synth"] {
        assert!(text.contains(name), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["instances", "--write", &dir.path().display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["running.mdp", "cav23-gf.spec", "gridworld3.mdp"] {
        let written = fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(written, fs::read_to_string(instances().join(f)).unwrap(), "{f}");
    }
}
