//! Certificate files.
//!
//! ```text
//! states: 3
//! locations: 2
//! origin: given
//! rank 0: 250*V0 + 750*V2 + 1
//! inv 0 0: V0 + 1
//! prob A b 1
//! choice 0 1 -> 1
//! ```
//!
//! `rank q` and `inv q k` are the ranking and invariant rows of automaton
//! state `q`; strategy lines follow the strategy format; `choice q l -> q′`
//! records the successor used for location `q` and letter mask `l`.

use distcert_core::constraints::SuccessorChoice;
use distcert_core::logic::Letter;
use distcert_core::mdp::{AffineRow, Mdp};
use distcert_core::solution::{CertificateSolution, StrategyOrigin};

use super::affine::{format_affine, parse_affine};
use super::strategy::{parse_strategy_lines, write_strategy};
use crate::error::{Error, Result};

pub fn write_certificate(sol: &CertificateSolution, mdp: &Mdp) -> String {
    let mut out = String::new();
    out.push_str(&format!("states: {}\n", sol.num_states()));
    out.push_str(&format!("locations: {}\n", sol.num_locations()));
    let origin = match sol.origin {
        StrategyOrigin::Given => "given",
        StrategyOrigin::Synthesized => "synthesized",
    };
    out.push_str(&format!("origin: {origin}\n"));
    for (q, r) in sol.ranking.iter().enumerate() {
        out.push_str(&format!("rank {q}: {}\n", format_affine(&r.coeffs, &r.offset)));
    }
    for (q, rows) in sol.invariant.iter().enumerate() {
        for (k, r) in rows.iter().enumerate() {
            out.push_str(&format!("inv {q} {k}: {}\n", format_affine(&r.coeffs, &r.offset)));
        }
    }
    out.push_str(&write_strategy(&sol.strategy, mdp));
    for (&(q, l), &q2) in &sol.choice {
        out.push_str(&format!("choice {q} {} -> {q2}\n", l.0));
    }
    out
}

fn index(s: &str, file: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::syntax(file, line, 1, format!("bad index `{}`", s.trim())))
}

pub fn parse_certificate(text: &str, mdp: &Mdp, file: &str) -> Result<CertificateSolution> {
    let n = mdp.num_states();
    let mut locations: Option<usize> = None;
    let mut origin = StrategyOrigin::Given;
    let mut ranking: Vec<Option<AffineRow>> = Vec::new();
    let mut invariant: Vec<Vec<Option<AffineRow>>> = Vec::new();
    let mut choice = SuccessorChoice::new();
    let row = |expr: &str, line: usize| -> Result<AffineRow> {
        let e = parse_affine(expr, n).map_err(|e| Error::syntax(file, line, e.column, e.message))?;
        Ok(AffineRow {
            coeffs: e.coeffs,
            offset: e.offset,
        })
    };
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("states:") {
            if index(rest, file, ln)? != n {
                return Err(Error::syntax(file, ln, 1, format!("certificate is for {} states, MDP has {n}", rest.trim())));
            }
        } else if let Some(rest) = line.strip_prefix("locations:") {
            let k = index(rest, file, ln)?;
            locations = Some(k);
            ranking = vec![None; k];
            invariant = vec![Vec::new(); k];
        } else if let Some(rest) = line.strip_prefix("origin:") {
            origin = match rest.trim() {
                "given" => StrategyOrigin::Given,
                "synthesized" => StrategyOrigin::Synthesized,
                other => return Err(Error::syntax(file, ln, 1, format!("unknown origin `{other}`"))),
            };
        } else if let Some(rest) = line.strip_prefix("rank ") {
            let (q, expr) = rest
                .split_once(':')
                .ok_or_else(|| Error::syntax(file, ln, 1, "expected `rank <q>: <expression>`"))?;
            let q = index(q, file, ln)?;
            let slot = ranking
                .get_mut(q)
                .ok_or_else(|| Error::syntax(file, ln, 1, format!("location {q} out of range")))?;
            *slot = Some(row(expr, ln)?);
        } else if let Some(rest) = line.strip_prefix("inv ") {
            let (head, expr) = rest
                .split_once(':')
                .ok_or_else(|| Error::syntax(file, ln, 1, "expected `inv <q> <k>: <expression>`"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::syntax(file, ln, 1, "expected `inv <q> <k>: <expression>`"));
            }
            let q = index(parts[0], file, ln)?;
            let k = index(parts[1], file, ln)?;
            let rows = invariant
                .get_mut(q)
                .ok_or_else(|| Error::syntax(file, ln, 1, format!("location {q} out of range")))?;
            if rows.len() <= k {
                rows.resize(k + 1, None);
            }
            rows[k] = Some(row(expr, ln)?);
        } else if let Some(rest) = line.strip_prefix("choice ") {
            let (head, tail) = rest
                .split_once("->")
                .ok_or_else(|| Error::syntax(file, ln, 1, "expected `choice <q> <letter> -> <q>`"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::syntax(file, ln, 1, "expected `choice <q> <letter> -> <q>`"));
            }
            let q = index(parts[0], file, ln)?;
            let l = index(parts[1], file, ln)? as u32;
            choice.insert((q, Letter(l)), index(tail, file, ln)?);
        }
    }
    let k = locations.ok_or_else(|| Error::syntax(file, 1, 1, "missing `locations:`"))?;
    let ranking = ranking
        .into_iter()
        .enumerate()
        .map(|(q, r)| r.ok_or_else(|| Error::Usage(format!("{file}: missing `rank {q}`"))))
        .collect::<Result<Vec<_>>>()?;
    let invariant = invariant
        .into_iter()
        .enumerate()
        .map(|(q, rows)| {
            if rows.is_empty() {
                return Err(Error::Usage(format!("{file}: missing `inv {q} 0`")));
            }
            rows.into_iter()
                .enumerate()
                .map(|(i, r)| r.ok_or_else(|| Error::Usage(format!("{file}: missing `inv {q} {i}`"))))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let strategy = parse_strategy_lines(text, mdp, file, true)?
        .ok_or_else(|| Error::Usage(format!("{file}: certificate has no strategy lines")))?;
    debug_assert_eq!(ranking.len(), k);
    Ok(CertificateSolution {
        ranking,
        invariant,
        strategy,
        origin,
        choice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::mdp::parse_mdp;
    use distcert_core::mdp::MemorylessStrategy;
    use distcert_core::rational::{int, rat};

    #[test]
    fn round_trip() {
        let mdp = parse_mdp(
            "states: A B C\nactions: a b\ntrans A a -> A:1\ntrans A b -> B:1\ntrans B a -> C:1\ntrans C a -> C:1/2 A:1/2\n",
            "x",
        )
        .unwrap();
        let row = |c: [i64; 3], o: (i64, i64)| AffineRow {
            coeffs: c.iter().map(|&x| int(x)).collect(),
            offset: rat(o.0, o.1),
        };
        let sol = CertificateSolution {
            ranking: vec![row([250, 0, 750], (1, 1)), row([0, 0, 0], (0, 1))],
            invariant: vec![vec![row([1, -1, 0], (1, 2))], vec![row([0, 0, 0], (0, 1))]],
            strategy: MemorylessStrategy::deterministic(&mdp, &[1, 0, 0]).unwrap().into(),
            origin: StrategyOrigin::Synthesized,
            choice: SuccessorChoice::from([((0, Letter(1)), 1)]),
        };
        let text = write_certificate(&sol, &mdp);
        assert!(text.contains("rank 0: 250*V0 + 750*V2 + 1\n"));
        assert_eq!(parse_certificate(&text, &mdp, "c").unwrap(), sol);
        assert!(parse_certificate(&text.replace("rank 1: 0\n", ""), &mdp, "c").is_err());
    }
}
