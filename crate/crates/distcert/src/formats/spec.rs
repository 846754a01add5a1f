//! Specifications: a subset of the Hanoi Omega-Automata format, or a
//! built-in LTL pattern whose propositions are quoted atoms.
//!
//! ```text
//! HOA: v1
//! States: 2
//! Start: 0
//! AP: 1 "V1 >= 0.249"
//! acc-name: Buchi
//! Acceptance: 1 Inf(0)
//! --BODY--
//! State: 0
//! [!0] 0
//! [0] 1
//! State: 1 {0}
//! [t] 0
//! --END--
//! ```

use distcert_core::logic::{AffineAtom, Edge, Label, Nba};
use distcert_core::patterns::parse_ltl_pattern;

use super::affine::{format_atom, parse_atom};
use crate::error::{Error, Result};

struct LabelParser<'a> {
    chars: Vec<char>,
    pos: usize,
    file: &'a str,
    line: usize,
    base: usize,
}

impl LabelParser<'_> {
    fn fail(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.file, self.line, self.base + self.pos + 1, msg)
    }

    fn skip(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn or(&mut self) -> Result<Label> {
        let mut items = vec![self.and()?];
        loop {
            self.skip();
            if self.chars.get(self.pos) == Some(&'|') {
                self.pos += 1;
                items.push(self.and()?);
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            Label::Or(items)
        })
    }

    fn and(&mut self) -> Result<Label> {
        let mut items = vec![self.unary()?];
        loop {
            self.skip();
            if self.chars.get(self.pos) == Some(&'&') {
                self.pos += 1;
                items.push(self.unary()?);
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            Label::And(items)
        })
    }

    fn unary(&mut self) -> Result<Label> {
        self.skip();
        match self.chars.get(self.pos).copied() {
            Some('!') => {
                self.pos += 1;
                Ok(Label::negate(self.unary()?))
            }
            Some('t') => {
                self.pos += 1;
                Ok(Label::True)
            }
            Some('f') => {
                self.pos += 1;
                Ok(Label::False)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.or()?;
                self.skip();
                if self.chars.get(self.pos) != Some(&')') {
                    return Err(self.fail("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                Ok(Label::ap(s.parse().map_err(|_| self.fail("bad proposition index"))?))
            }
            Some('@') => Err(self.fail("unsupported HOA feature: aliases")),
            Some(c) => Err(self.fail(format!("unexpected `{c}` in label"))),
            None => Err(self.fail("unexpected end of label")),
        }
    }
}

fn quoted_strings(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = s;
    while let Some(i) = rest.find('"') {
        let after = &rest[i + 1..];
        match after.find('"') {
            Some(j) => {
                out.push(after[..j].to_string());
                rest = &after[j + 1..];
            }
            None => break,
        }
    }
    out
}

/// Parses the HOA subset over an MDP with `n` states.
pub fn parse_hoa(text: &str, n: usize, file: &str) -> Result<Nba> {
    let mut n_states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut ap: Vec<AffineAtom> = Vec::new();
    let mut acceptance_ok = false;
    let mut in_body = false;
    let mut ended = false;
    let mut current: Option<usize> = None;
    let mut names: Vec<Option<String>> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut edges = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || ended {
            continue;
        }
        if !in_body {
            if line == "--BODY--" {
                let ns = n_states.ok_or_else(|| Error::syntax(file, ln, 1, "missing `States:`"))?;
                if !acceptance_ok {
                    return Err(Error::syntax(file, ln, 1, "missing `Acceptance: 1 Inf(0)`"));
                }
                names = vec![None; ns];
                accepting = vec![false; ns];
                in_body = true;
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::syntax(file, ln, 1, format!("expected `key: value`, found `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "HOA" => {
                    if value != "v1" {
                        return Err(Error::syntax(file, ln, 6, format!("unsupported HOA version `{value}`")));
                    }
                }
                "States" => {
                    n_states = Some(value.parse().map_err(|_| Error::syntax(file, ln, 9, "bad state count"))?);
                }
                "Start" => {
                    if start.is_some() || value.contains('&') {
                        return Err(Error::syntax(file, ln, 1, "unsupported HOA feature: multiple or alternating initial states"));
                    }
                    start = Some(value.parse().map_err(|_| Error::syntax(file, ln, 8, "bad start state"))?);
                }
                "AP" => {
                    let count: usize = value
                        .split_whitespace()
                        .next()
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| Error::syntax(file, ln, 5, "expected the number of propositions"))?;
                    let atoms = quoted_strings(value);
                    if atoms.len() != count {
                        return Err(Error::syntax(
                            file,
                            ln,
                            5,
                            format!("`AP:` declares {count} propositions but lists {}", atoms.len()),
                        ));
                    }
                    for a in atoms {
                        let col = raw.find(&a).map_or(1, |c| c + 1);
                        ap.push(parse_atom(&a, n).map_err(|e| Error::syntax(file, ln, col + e.column - 1, e.message))?);
                    }
                }
                "acc-name" => {
                    if value != "Buchi" {
                        return Err(Error::syntax(file, ln, 11, format!("unsupported acceptance `{value}`")));
                    }
                }
                "Acceptance" => {
                    let compact: String = value.split_whitespace().collect();
                    if compact != "1Inf(0)" {
                        return Err(Error::syntax(file, ln, 13, format!("unsupported acceptance `{value}`")));
                    }
                    acceptance_ok = true;
                }
                "Alias" => return Err(Error::syntax(file, ln, 1, "unsupported HOA feature: aliases")),
                "name" | "tool" | "properties" | "controllable-AP" => {}
                other => {
                    return Err(Error::syntax(file, ln, 1, format!("unsupported HOA header `{other}`")));
                }
            }
            continue;
        }
        if line == "--END--" {
            ended = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("State:") {
            let rest = rest.trim();
            let idx_str = rest.split_whitespace().next().unwrap_or("");
            let q: usize = idx_str
                .parse()
                .map_err(|_| Error::syntax(file, ln, 8, "bad state index"))?;
            if q >= names.len() {
                return Err(Error::syntax(file, ln, 8, format!("state {q} out of range")));
            }
            names[q] = quoted_strings(rest).into_iter().next();
            if let Some(open) = rest.find('{') {
                let close = rest.find('}').ok_or_else(|| Error::syntax(file, ln, 1, "unclosed `{`"))?;
                let sets: Vec<&str> = rest[open + 1..close].split_whitespace().collect();
                if sets != ["0"] {
                    return Err(Error::syntax(file, ln, 1, "unsupported acceptance sets on state"));
                }
                accepting[q] = true;
            }
            current = Some(q);
            continue;
        }
        let src = current.ok_or_else(|| Error::syntax(file, ln, 1, "edge before any `State:`"))?;
        if !line.starts_with('[') {
            return Err(Error::syntax(file, ln, 1, "unsupported HOA feature: implicit edge labels"));
        }
        let close = line.find(']').ok_or_else(|| Error::syntax(file, ln, 1, "unclosed `[`"))?;
        let base = raw.find('[').unwrap_or(0) + 1;
        let mut lp = LabelParser {
            chars: line[1..close].chars().collect(),
            pos: 0,
            file,
            line: ln,
            base,
        };
        let label = lp.or()?;
        lp.skip();
        if lp.pos != lp.chars.len() {
            return Err(lp.fail("trailing input in label"));
        }
        let tail = line[close + 1..].trim();
        if tail.contains('{') {
            return Err(Error::syntax(file, ln, close + 2, "unsupported transition-based acceptance"));
        }
        if tail.contains('&') {
            return Err(Error::syntax(file, ln, close + 2, "unsupported HOA feature: alternation"));
        }
        let dst: usize = tail
            .parse()
            .map_err(|_| Error::syntax(file, ln, close + 2, format!("bad edge target `{tail}`")))?;
        edges.push(Edge { src, label, dst });
    }
    if !in_body {
        return Err(Error::syntax(file, 1, 1, "missing `--BODY--`"));
    }
    let state_names = names
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.unwrap_or_else(|| i.to_string()))
        .collect();
    Ok(Nba::new(state_names, ap, edges, start.unwrap_or(0), accepting)?)
}

fn label_text(l: &Label) -> String {
    match l {
        Label::True => "t".into(),
        Label::False => "f".into(),
        Label::Ap(i) => i.to_string(),
        Label::Not(inner) => format!("!{}", label_text(inner)),
        Label::And(xs) => format!("({})", xs.iter().map(label_text).collect::<Vec<_>>().join(" & ")),
        Label::Or(xs) => format!("({})", xs.iter().map(label_text).collect::<Vec<_>>().join(" | ")),
    }
}

/// Writes an automaton in the HOA subset.
pub fn write_hoa(nba: &Nba) -> String {
    let mut out = String::from("HOA: v1\n");
    out.push_str(&format!("States: {}\nStart: {}\n", nba.num_states(), nba.initial()));
    let atoms: Vec<String> = nba.ap().iter().map(|a| format!("\"{}\"", format_atom(a))).collect();
    out.push_str(&format!("AP: {}", nba.ap().len()));
    for a in atoms {
        out.push(' ');
        out.push_str(&a);
    }
    out.push_str("\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\n");
    for q in 0..nba.num_states() {
        let mark = if nba.is_accepting(q) { " {0}" } else { "" };
        out.push_str(&format!("State: {q}{mark}\n"));
        for e in nba.edges().iter().filter(|e| e.src == q) {
            out.push_str(&format!("[{}] {}\n", label_text(&e.label), e.dst));
        }
    }
    out.push_str("--END--\n");
    out
}

/// Parses an LTL pattern whose propositions are double-quoted atoms, as in
/// `G F "V1>=0.249"`. Identical atom strings share a proposition.
pub fn parse_pattern_spec(text: &str, n: usize) -> Result<Nba> {
    let mut rewritten = String::new();
    let mut bindings: Vec<(String, AffineAtom)> = Vec::new();
    let mut sources: Vec<String> = Vec::new();
    let mut rest = text;
    let mut consumed = 0;
    while let Some(i) = rest.find('"') {
        rewritten.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let j = after
            .find('"')
            .ok_or_else(|| Error::syntax("spec", 1, consumed + i + 1, "unterminated quote"))?;
        let src = &after[..j];
        let name = match sources.iter().position(|s| s == src) {
            Some(k) => format!("ap{k}"),
            None => {
                let atom = parse_atom(src, n)
                    .map_err(|e| Error::syntax("spec", 1, consumed + i + 1 + e.column, e.message))?;
                sources.push(src.to_string());
                let name = format!("ap{}", sources.len() - 1);
                bindings.push((name.clone(), atom));
                name
            }
        };
        rewritten.push(' ');
        rewritten.push_str(&name);
        rewritten.push(' ');
        consumed += i + j + 2;
        rest = &after[j + 1..];
    }
    rewritten.push_str(rest);
    parse_ltl_pattern(&rewritten, &bindings).map_err(|e| match e {
        distcert_core::Error::UnknownPattern(_) => {
            Error::Core(distcert_core::Error::UnknownPattern(text.trim().to_string()))
        }
        other => Error::Core(other),
    })
}

/// A specification given inline or as file contents: HOA when the text
/// starts with `HOA:`, a quoted-atom LTL pattern otherwise.
pub fn parse_spec(text: &str, n: usize, file: &str) -> Result<Nba> {
    if text.trim_start().starts_with("HOA:") {
        parse_hoa(text, n, file)
    } else {
        parse_pattern_spec(text.trim(), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use distcert_core::logic::Letter;

    const FIG2: &str = "HOA: v1\nStates: 2\nStart: 0\nAP: 1 \"V1 >= 0.249\"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0\n[!0] 0\n[0] 1\nState: 1 {0}\n[t] 0\n--END--\n";

    #[test]
    fn figure_two_automaton() {
        let nba = parse_hoa(FIG2, 3, "fig2.hoa").unwrap();
        assert_eq!(nba.num_states(), 2);
        assert_eq!(nba.delta(0, Letter(1)), &[1]);
        assert_eq!(nba.delta(0, Letter(0)), &[0]);
        assert_eq!(nba.delta(1, Letter(0)), &[0]);
        assert!(nba.is_accepting(1));
        let pattern = parse_spec("G F \"V1>=0.249\"", 3, "x").unwrap();
        for q in 0..2 {
            for l in [Letter(0), Letter(1)] {
                assert_eq!(nba.delta(q, l), pattern.delta(q, l));
            }
        }
        assert_eq!(parse_hoa(&write_hoa(&nba), 3, "x").unwrap().ap(), nba.ap());
    }

    #[test]
    fn true_self_loop() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";
        let nba = parse_hoa(text, 3, "x").unwrap();
        assert!(nba.accepts_lasso(&[], &[Letter(0)]));
    }

    #[test]
    fn rabin_rejected() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Rabin 1\nAcceptance: 2 Fin(0) & Inf(1)\n--BODY--\n--END--\n";
        let e = parse_hoa(text, 3, "x").unwrap_err();
        assert!(e.to_string().contains("unsupported acceptance"), "{e}");
    }

    #[test]
    fn transition_acceptance_rejected() {
        let text = FIG2.replace("[t] 0", "[t] 0 {0}");
        let e = parse_hoa(&text, 3, "x").unwrap_err();
        assert!(e.to_string().contains("transition-based"), "{e}");
    }

    #[test]
    fn conjunction_pattern() {
        let nba = parse_spec("G F \"V11>=0.9\" & G \"V9<=0.5\"", 12, "x").unwrap();
        assert_eq!(nba.ap().len(), 2);
        assert_eq!(nba.num_states(), 2);
    }

    #[test]
    fn shared_atoms_and_errors() {
        let nba = parse_spec("G (\"V0>=1/2\" -> F \"V0>=1/2\")", 2, "x").unwrap();
        assert_eq!(nba.ap().len(), 1);
        assert!(parse_spec("X \"V0>=0\"", 2, "x").is_err());
        assert!(parse_spec("G \"V5>=0\"", 2, "x").is_err());
    }
}
