//! Strategy files.
//!
//! Memoryless: `prob <state> <action> <probability>` per line; missing
//! pairs have probability zero. Distributional: an optional
//! `eps-den: <rational>` and `num <state> <action>: <affine expression>`
//! per available pair, giving `π(s,a)(μ) = num(s,a)(μ) / Σ_b num(s,b)(μ)`.

use std::collections::BTreeMap;

use distcert_core::mdp::{default_eps_den, AffineDistStrategy, AffineRow, MemorylessStrategy, Mdp, Strategy};
use distcert_core::rational::{format_rational, parse_rational};

use super::affine::{format_affine, parse_affine};
use crate::error::{Error, Result};

fn lookup(names: &[String], name: &str, what: &str, file: &str, line: usize) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::syntax(file, line, 1, format!("unknown {what} `{name}`")))
}

/// Strategy lines found in `text`, ignoring lines that start with other
/// keywords when `lenient` is set.
pub(crate) fn parse_strategy_lines(text: &str, mdp: &Mdp, file: &str, lenient: bool) -> Result<Option<Strategy>> {
    let n = mdp.num_states();
    let mut probs = BTreeMap::new();
    let mut nums = BTreeMap::new();
    let mut eps = None;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("prob ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::syntax(file, ln, 1, "expected `prob <state> <action> <probability>`"));
            }
            let s = lookup(mdp.states(), parts[0], "state", file, ln)?;
            let a = lookup(mdp.actions(), parts[1], "action", file, ln)?;
            let p = parse_rational(parts[2])
                .map_err(|_| Error::syntax(file, ln, 1, format!("bad probability `{}`", parts[2])))?;
            probs.insert((s, a), p);
        } else if let Some(rest) = line.strip_prefix("num ") {
            let (head, expr) = rest
                .split_once(':')
                .ok_or_else(|| Error::syntax(file, ln, 1, "expected `num <state> <action>: <expression>`"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::syntax(file, ln, 1, "expected `num <state> <action>: <expression>`"));
            }
            let s = lookup(mdp.states(), parts[0], "state", file, ln)?;
            let a = lookup(mdp.actions(), parts[1], "action", file, ln)?;
            let e = parse_affine(expr, n).map_err(|e| Error::syntax(file, ln, e.column, e.message))?;
            nums.insert((s, a), AffineRow {
                coeffs: e.coeffs,
                offset: e.offset,
            });
        } else if let Some(rest) = line.strip_prefix("eps-den:") {
            eps = Some(
                parse_rational(rest.trim())
                    .map_err(|_| Error::syntax(file, ln, 1, format!("bad rational `{}`", rest.trim())))?,
            );
        } else if !lenient {
            return Err(Error::syntax(file, ln, 1, format!("unrecognized line `{line}`")));
        }
    }
    match (probs.is_empty(), nums.is_empty()) {
        (true, true) => Ok(None),
        (false, true) => Ok(Some(MemorylessStrategy::new(mdp, probs)?.into())),
        (true, false) => Ok(Some(
            AffineDistStrategy::new(mdp, nums, eps.unwrap_or_else(default_eps_den))?.into(),
        )),
        (false, false) => Err(Error::Usage(format!(
            "{file}: strategy mixes `prob` and `num` lines"
        ))),
    }
}

pub fn parse_strategy(text: &str, mdp: &Mdp, file: &str) -> Result<Strategy> {
    parse_strategy_lines(text, mdp, file, false)?
        .ok_or_else(|| Error::Usage(format!("{file}: no strategy entries")))
}

/// Writes a strategy, one entry per line in `(state, action)` order.
pub fn write_strategy(strategy: &Strategy, mdp: &Mdp) -> String {
    let mut out = String::new();
    match strategy {
        Strategy::Memoryless(m) => {
            for (&(s, a), p) in m.entries() {
                out.push_str(&format!(
                    "prob {} {} {}\n",
                    mdp.states()[s],
                    mdp.actions()[a],
                    format_rational(p)
                ));
            }
        }
        Strategy::AffineDist(d) => {
            out.push_str(&format!("eps-den: {}\n", format_rational(d.eps_den())));
            for (&(s, a), r) in d.numerators() {
                out.push_str(&format!(
                    "num {} {}: {}\n",
                    mdp.states()[s],
                    mdp.actions()[a],
                    format_affine(&r.coeffs, &r.offset)
                ));
            }
        }
    }
    out
}
