//! SMT-LIB2 emission and model parsing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::farkas::ExistentialSystem;
use crate::lp::Rel;
use crate::poly::{Poly, Var, VarPool};
use crate::rational::{parse_rational, Rational};

/// Message for algebraic (irrational) model values.
pub const NON_RATIONAL: &str = "non-rational model; rerun with rational-model solver option";

/// Deterministic SMT-LIB2 text for a system: logic, one declaration per
/// unknown occurring in the system (in pool order), one assertion per
/// relation with its provenance as a comment, then `(check-sat)` and
/// `(get-model)`.
pub fn emit_smtlib(sys: &ExistentialSystem, pool: &VarPool) -> String {
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n");
    out.push_str("(set-logic QF_NRA)\n");
    for v in sys.vars() {
        let _ = writeln!(out, "(declare-fun {} () Real)", pool.name(v));
    }
    let mut last_origin: Option<&str> = None;
    for r in &sys.relations {
        if last_origin != Some(r.origin.as_str()) {
            let _ = writeln!(out, "; {}", r.origin);
            last_origin = Some(&r.origin);
        }
        let op = match r.rel {
            Rel::Ge => ">=",
            Rel::Eq => "=",
        };
        let _ = writeln!(out, "(assert ({op} {} 0))", poly_term(&r.poly, pool));
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

/// A rational literal: `5`, `(- 5)`, `(/ 1 3)`, `(- (/ 1 3))`.
pub fn rational_literal(r: &Rational) -> String {
    let abs = r.abs();
    let body = if abs.denom().is_one() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

pub fn poly_term(p: &Poly, pool: &VarPool) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(m, c)| {
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || m.is_one() {
                factors.push(rational_literal(c));
            }
            for &(v, e) in m.factors() {
                let name = match v {
                    Var::T(t) => pool.name(t).to_string(),
                    Var::Mu(i) => format!("V{i}"),
                };
                for _ in 0..e {
                    factors.push(name.clone());
                }
            }
            if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                format!("(* {})", factors.join(" "))
            }
        })
        .collect();
    match terms.len() {
        0 => "0".to_string(),
        1 => terms.into_iter().next().expect("one term"),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    SolverError,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Sat => "sat",
            SolverStatus::Unsat => "unsat",
            SolverStatus::Unknown => "unknown",
            SolverStatus::Timeout => "timeout",
            SolverStatus::SolverError => "solver-error",
        }
    }
}

/// Status from the first line-level answer in solver output.
pub fn parse_status(raw: &str) -> Option<SolverStatus> {
    raw.lines().map(str::trim).find_map(|l| match l {
        "sat" => Some(SolverStatus::Sat),
        "unsat" => Some(SolverStatus::Unsat),
        "unknown" => Some(SolverStatus::Unknown),
        "timeout" => Some(SolverStatus::Timeout),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parses a sequence of s-expressions; `;` comments and string literals
/// are skipped/kept as atoms.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = Vec::from([Vec::new()]);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().ok_or_else(|| Error::Model("unbalanced `)`".into()))?;
                stack
                    .last_mut()
                    .ok_or_else(|| Error::Model("unbalanced `)`".into()))?
                    .push(Sexp::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                let mut s = String::from("\"");
                for c in chars.by_ref() {
                    s.push(c);
                    if c == '"' {
                        break;
                    }
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' || d == ';' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut().expect("non-empty").push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::Model("unbalanced `(`".into()));
    }
    Ok(stack.pop().expect("root"))
}

fn eval_value(e: &Sexp) -> Result<Rational> {
    match e {
        Sexp::Atom(a) => parse_rational(a).map_err(|_| Error::Model(format!("unparseable value `{a}`"))),
        Sexp::List(items) => {
            let (head, args) = match items.split_first() {
                Some((Sexp::Atom(h), rest)) => (h.as_str(), rest),
                _ => return Err(Error::Model("malformed value".into())),
            };
            if head.starts_with("root-obj") || head == "root-of" || head.starts_with("_") {
                return Err(Error::Model(NON_RATIONAL.into()));
            }
            let vals: Vec<Rational> = args.iter().map(eval_value).collect::<Result<_>>()?;
            match (head, vals.as_slice()) {
                ("-", [x]) => Ok(-x.clone()),
                ("-", [x, rest @ ..]) => Ok(rest.iter().fold(x.clone(), |a, b| a - b)),
                ("+", _) => Ok(vals.iter().sum()),
                ("*", _) => Ok(vals.iter().fold(Rational::one(), |a, b| a * b)),
                ("/", [x, rest @ ..]) if !rest.is_empty() => {
                    if rest.iter().any(Zero::is_zero) {
                        return Err(Error::Model("division by zero in model".into()));
                    }
                    Ok(rest.iter().fold(x.clone(), |a, b| a / b))
                }
                _ => Err(Error::Model(format!("unsupported value form `{head}`"))),
            }
        }
    }
}

fn contains_algebraic(e: &Sexp) -> bool {
    match e {
        Sexp::Atom(a) => a.starts_with("root-obj") || a == "root-of",
        Sexp::List(items) => items.iter().any(contains_algebraic),
    }
}

/// Values of `(define-fun name () Real value)` entries for the requested
/// names. Every requested name must be defined.
pub fn parse_model(raw: &str, vars: &[&str]) -> Result<BTreeMap<String, Rational>> {
    let body = match raw.find('(') {
        Some(i) => &raw[i..],
        None => "",
    };
    let sexps = parse_sexps(body)?;
    let mut defs: BTreeMap<String, Sexp> = BTreeMap::new();
    collect_defs(&sexps, &mut defs);
    let mut out = BTreeMap::new();
    for &v in vars {
        let e = defs
            .get(v)
            .ok_or_else(|| Error::Model(format!("model has no value for `{v}`")))?;
        if contains_algebraic(e) {
            return Err(Error::Model(NON_RATIONAL.into()));
        }
        out.insert(v.to_string(), eval_value(e)?);
    }
    Ok(out)
}

fn collect_defs(items: &[Sexp], out: &mut BTreeMap<String, Sexp>) {
    for it in items {
        if let Sexp::List(xs) = it {
            match xs.as_slice() {
                [Sexp::Atom(d), Sexp::Atom(name), Sexp::List(args), _sort, value]
                    if d == "define-fun" && args.is_empty() =>
                {
                    out.insert(name.clone(), value.clone());
                }
                _ => collect_defs(xs, out),
            }
        }
    }
}

/// Error text reported by the solver as `(error "...")`, if any.
pub fn solver_error_message(raw: &str) -> Option<String> {
    let sexps = parse_sexps(raw).ok()?;
    sexps.iter().find_map(|s| match s {
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(h), Sexp::Atom(msg)] if h == "error" => {
                Some(msg.trim_matches('"').to_string())
            }
            _ => None,
        },
        _ => None,
    })
}

/// Integer literal helper for tests and generators.
pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convenience for building a model lookup over pool ids.
pub fn model_by_id(pool: &VarPool, model: &BTreeMap<String, Rational>) -> BTreeMap<u32, Rational> {
    model
        .iter()
        .filter_map(|(k, v)| pool.lookup(k).map(|id| (id, v.clone())))
        .collect()
}
