//! MDP text format.
//!
//! ```text
//! # comment
//! states: A B C
//! actions: a b
//! trans A a -> A:1
//! trans C a -> C:1/2 A:1/2
//! ```
//!
//! The order of `states:` fixes the state enumeration.

use distcert_core::mdp::{Mdp, SparseRow};
use distcert_core::rational::{format_rational, parse_rational};

use crate::error::{Error, Result};

fn col(line: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

/// Parses and validates an MDP; `file` names the source in messages.
pub fn parse_mdp(text: &str, file: &str) -> Result<Mdp> {
    let mut states: Option<Vec<String>> = None;
    let mut actions: Option<Vec<String>> = None;
    let mut trans: Vec<(usize, usize, SparseRow)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("states:") {
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return Err(Error::syntax(file, ln, col(raw, trimmed), "no states listed"));
            }
            states = Some(names);
        } else if let Some(rest) = trimmed.strip_prefix("actions:") {
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return Err(Error::syntax(file, ln, col(raw, trimmed), "no actions listed"));
            }
            actions = Some(names);
        } else if let Some(rest) = trimmed.strip_prefix("trans ") {
            let (Some(st), Some(act)) = (&states, &actions) else {
                return Err(Error::syntax(
                    file,
                    ln,
                    col(raw, trimmed),
                    "`trans` before `states:` and `actions:`",
                ));
            };
            let (head, tail) = rest.split_once("->").ok_or_else(|| {
                Error::syntax(file, ln, col(raw, rest), "expected `->`")
            })?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::syntax(
                    file,
                    ln,
                    col(raw, head),
                    "expected `trans <state> <action> -> ...`",
                ));
            }
            let s = st.iter().position(|x| x == parts[0]).ok_or_else(|| {
                Error::syntax(file, ln, col(raw, parts[0]), format!("unknown state `{}`", parts[0]))
            })?;
            let a = act.iter().position(|x| x == parts[1]).ok_or_else(|| {
                Error::syntax(file, ln, col(raw, parts[1]), format!("unknown action `{}`", parts[1]))
            })?;
            let mut row = Vec::new();
            for item in tail.split_whitespace() {
                let (t, p) = item.split_once(':').ok_or_else(|| {
                    Error::syntax(file, ln, col(raw, item), "expected `<state>:<probability>`")
                })?;
                let ti = st.iter().position(|x| x == t).ok_or_else(|| {
                    Error::syntax(file, ln, col(raw, item), format!("unknown state `{t}`"))
                })?;
                let pr = parse_rational(p).map_err(|_| {
                    Error::syntax(file, ln, col(raw, item), format!("bad probability `{p}`"))
                })?;
                row.push((ti, pr));
            }
            if row.is_empty() {
                return Err(Error::syntax(file, ln, col(raw, tail), "empty successor list"));
            }
            trans.push((s, a, row));
        } else {
            return Err(Error::syntax(
                file,
                ln,
                col(raw, trimmed),
                format!("unrecognized line `{trimmed}`"),
            ));
        }
    }
    let states = states.ok_or_else(|| Error::syntax(file, 1, 1, "missing `states:`"))?;
    let actions = actions.ok_or_else(|| Error::syntax(file, 1, 1, "missing `actions:`"))?;
    Ok(Mdp::new(states, actions, trans)?)
}

/// Writes an MDP in the text format, rows in `(state, action)` order.
pub fn write_mdp(mdp: &Mdp) -> String {
    let mut out = format!("states: {}\nactions: {}\n", mdp.states().join(" "), mdp.actions().join(" "));
    for (s, a) in mdp.state_actions() {
        let row = mdp.row(s, a).expect("available pair");
        let succ: Vec<String> = row
            .iter()
            .enumerate()
            .filter(|(_, p)| !num_traits::Zero::is_zero(*p))
            .map(|(t, p)| format!("{}:{}", mdp.states()[t], format_rational(p)))
            .collect();
        out.push_str(&format!(
            "trans {} {} -> {}\n",
            mdp.states()[s],
            mdp.actions()[a],
            succ.join(" ")
        ));
    }
    out
}
