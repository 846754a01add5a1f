//! A [`NonlinearOracle`] backed by an external SMT solver.

use std::time::Duration;

use num_traits::Signed;

use distcert_core::lp::{Constraint as LinRow, Rel};
use distcert_core::poly::{Poly, VarPool};
use distcert_core::smtlib::{poly_term, SolverStatus};
use distcert_core::validate::{NonlinearOracle, OracleAnswer};

use crate::solver::invoke_solver;

/// Asks the solver for a point of the premise where the conclusion is
/// negative; unsat means the implication holds.
pub struct SmtOracle {
    pub cmd: String,
    pub timeout: Duration,
}

/// The query as SMT-LIB2 text.
pub fn oracle_query(n: usize, premise: &[LinRow], conclusion: &Poly) -> String {
    let pool = VarPool::new();
    let mut out = String::from("(set-option :produce-models true)\n(set-logic QF_NRA)\n");
    for i in 0..n {
        out.push_str(&format!("(declare-fun V{i} () Real)\n"));
    }
    for row in premise {
        let p = Poly::affine(&row.coeffs, &row.offset);
        let rel = match row.rel {
            Rel::Ge => ">=",
            Rel::Eq => "=",
        };
        out.push_str(&format!("(assert ({rel} {} 0))\n", poly_term(&p, &pool)));
    }
    out.push_str(&format!("(assert (< {} 0))\n", poly_term(conclusion, &pool)));
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

impl NonlinearOracle for SmtOracle {
    fn decide(&self, n: usize, premise: &[LinRow], conclusion: &Poly) -> OracleAnswer {
        let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        let query = oracle_query(n, premise, conclusion);
        match invoke_solver(&query, &self.cmd, self.timeout, &vars) {
            Ok(o) => match (o.status, o.model) {
                (SolverStatus::Unsat, _) => OracleAnswer::Holds,
                (SolverStatus::Sat, Some(m)) => {
                    let point: Vec<_> = names.iter().map(|v| m[v].clone()).collect();
                    match conclusion.eval_mu(&point) {
                        Ok(v) if v.is_negative() => OracleAnswer::Violated(point),
                        _ => OracleAnswer::Unknown,
                    }
                }
                _ => OracleAnswer::Unknown,
            },
            Err(_) => OracleAnswer::Unknown,
        }
    }
}
