//! External SMT solver processes.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use distcert_core::smtlib::{parse_model, parse_status, solver_error_message, SolverStatus};
use distcert_core::Rational;

use crate::error::{Error, Result};

/// Default solver command, overridable through this variable.
pub const SOLVER_ENV: &str = "DISTCERT_SOLVER";

/// Presets; each reads the problem from standard input.
pub const Z3_PRESET: &str = "z3 -in -smt2";
pub const CVC5_PRESET: &str = "cvc5 --lang=smt2 --produce-models";

/// Resolves `z3`/`cvc5` to their presets; other text is a command line.
pub fn resolve_command(spec: Option<&str>) -> String {
    let spec = spec
        .map(str::to_string)
        .or_else(|| std::env::var(SOLVER_ENV).ok())
        .unwrap_or_else(|| "z3".into());
    match spec.trim() {
        "z3" => Z3_PRESET.into(),
        "cvc5" => CVC5_PRESET.into(),
        other => other.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    /// Present iff `status` is sat.
    pub model: Option<BTreeMap<String, Rational>>,
    pub raw: String,
    pub wall_time: Duration,
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut s = String::new();
        if let Some(mut r) = r {
            let _ = r.read_to_string(&mut s);
        }
        s
    })
}

/// Runs `cmd` on `text` through standard input. `vars` are the names whose
/// values are read from a sat model. A model that cannot be read is an
/// error; a process that cannot be spawned or answers without a status is
/// a solver-error outcome.
pub fn invoke_solver(text: &str, cmd: &str, timeout: Duration, vars: &[&str]) -> Result<SolverOutcome> {
    let start = Instant::now();
    let mut parts = cmd.split_whitespace();
    let prog = parts.next().ok_or_else(|| Error::Usage("empty solver command".into()))?;
    let spawned = Command::new(prog)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => {
            return Ok(SolverOutcome {
                status: SolverStatus::SolverError,
                model: None,
                raw: format!("cannot start `{cmd}`: {e}"),
                wall_time: start.elapsed(),
            })
        }
    };
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());
    let input = text.to_string();
    let stdin = child.stdin.take();
    let writer = thread::spawn(move || {
        if let Some(mut w) = stdin {
            let _ = w.write_all(input.as_bytes());
        }
    });
    let mut timed_out = false;
    let exit = loop {
        match child.try_wait() {
            Ok(Some(st)) => break Some(st),
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                timed_out = true;
                break None;
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(_) => break None,
        }
    };
    let _ = writer.join();
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    let wall_time = start.elapsed();
    let raw = if stderr.trim().is_empty() {
        stdout.clone()
    } else {
        format!("{stdout}{stderr}")
    };
    if timed_out {
        return Ok(SolverOutcome {
            status: SolverStatus::Timeout,
            model: None,
            raw,
            wall_time,
        });
    }
    let status = match parse_status(&stdout) {
        Some(s) => s,
        None => {
            let msg = solver_error_message(&stdout).unwrap_or_default();
            let code = exit.and_then(|e| e.code()).map_or("none".into(), |c| c.to_string());
            return Ok(SolverOutcome {
                status: SolverStatus::SolverError,
                model: None,
                raw: format!("exit status {code}: {msg}\n{raw}"),
                wall_time,
            });
        }
    };
    let model = match status {
        SolverStatus::Sat => Some(parse_model(&stdout, vars)?),
        _ => None,
    };
    Ok(SolverOutcome {
        status,
        model,
        raw,
        wall_time,
    })
}

/// Whether `cmd`'s program can be started.
pub fn available(cmd: &str) -> bool {
    let Some(prog) = cmd.split_whitespace().next() else {
        return false;
    };
    Command::new(prog)
        .arg("--version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok()
}
