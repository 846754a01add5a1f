use std::time::Duration;

use distcert::solver::{available, invoke_solver, resolve_command, CVC5_PRESET, Z3_PRESET};
use distcert_core::rational::rat;
use distcert_core::smtlib::SolverStatus;

const SEC: Duration = Duration::from_secs(30);

fn z3() -> Option<&'static str> {
    if available(Z3_PRESET) {
        Some(Z3_PRESET)
    } else {
        eprintln!("z3 not found; skipping");
        None
    }
}

#[test]
fn presets_resolve() {
    assert_eq!(resolve_command(Some("z3")), Z3_PRESET);
    assert_eq!(resolve_command(Some("cvc5")), CVC5_PRESET);
    assert_eq!(resolve_command(Some("my-solver -q")), "my-solver -q");
}

#[test]
fn sat_model_is_exact() {
    let Some(cmd) = z3() else { return };
    let text = "(set-option :produce-models true)\n(set-logic QF_LRA)\n\
                (declare-fun x () Real)\n(declare-fun y () Real)\n\
                (assert (= (* 7 x) 2))\n(assert (= y (- x 1)))\n(check-sat)\n(get-model)\n";
    let out = invoke_solver(text, cmd, SEC, &["x", "y"]).unwrap();
    assert_eq!(out.status, SolverStatus::Sat);
    let model = out.model.unwrap();
    assert_eq!(model["x"], rat(2, 7));
    assert_eq!(model["y"], rat(-5, 7));
}

#[test]
fn unsat_has_no_model() {
    let Some(cmd) = z3() else { return };
    let text = "(set-logic QF_LRA)\n(declare-fun x () Real)\n\
                (assert (> x 1))\n(assert (< x 0))\n(check-sat)\n";
    let out = invoke_solver(text, cmd, SEC, &["x"]).unwrap();
    assert_eq!(out.status, SolverStatus::Unsat);
    assert!(out.model.is_none());
}

#[test]
fn nonlinear_sat() {
    let Some(cmd) = z3() else { return };
    let text = "(set-option :produce-models true)\n(set-logic QF_NRA)\n\
                (declare-fun x () Real)\n(assert (= (* x x) 4))\n(assert (> x 0))\n\
                (check-sat)\n(get-model)\n";
    let out = invoke_solver(text, cmd, SEC, &["x"]).unwrap();
    assert_eq!(out.status, SolverStatus::Sat);
    assert_eq!(out.model.unwrap()["x"], rat(2, 1));
}

#[test]
fn slow_process_is_killed_at_timeout() {
    if !available("sleep") {
        return;
    }
    let out = invoke_solver("(check-sat)\n", "sleep 30", Duration::from_millis(200), &[]).unwrap();
    assert_eq!(out.status, SolverStatus::Timeout);
    assert!(out.wall_time < Duration::from_secs(10));
}

#[test]
fn missing_binary_is_a_solver_error() {
    let out = invoke_solver("(check-sat)\n", "no-such-solver-binary", SEC, &[]).unwrap();
    assert_eq!(out.status, SolverStatus::SolverError);
    assert!(!available("no-such-solver-binary"));
}
