//! Built-in LTL pattern library.
//!
//! Only a fixed table of shapes is recognized; anything else must be
//! translated externally and supplied as an automaton.
//!
//! | pattern            | states |
//! |--------------------|--------|
//! | `G p`              | 1      |
//! | `F p`              | 2      |
//! | `G F p`            | 2      |
//! | `F G p`            | 2      |
//! | `p U q`            | 2      |
//! | `G (p -> F q)`     | 2      |
//! | `(G F p) & (G q)`  | 2      |
//!
//! `p` and `q` are propositions bound by name, optionally negated with `!`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::logic::{AffineAtom, Edge, Label, Nba};

/// Parsed LTL formula over named propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ltl {
    True,
    Prop(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Globally(Box<Ltl>),
    Eventually(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Arrow,
    Open,
    Close,
}

fn tokenize(text: &str) -> Option<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '!' => {
                chars.next();
                out.push(Tok::Not);
            }
            '&' => {
                chars.next();
                if chars.peek() == Some(&'&') {
                    chars.next();
                }
                out.push(Tok::And);
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return None;
                }
                out.push(Tok::Arrow);
            }
            '(' => {
                chars.next();
                out.push(Tok::Open);
            }
            ')' => {
                chars.next();
                out.push(Tok::Close);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            _ => return None,
        }
    }
    Some(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn implies(&mut self) -> Option<Ltl> {
        let lhs = self.and()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.next();
            let rhs = self.implies()?;
            return Some(Ltl::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Some(lhs)
    }

    fn and(&mut self) -> Option<Ltl> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.next();
            let rhs = self.until()?;
            lhs = Ltl::And(Box::new(lhs), Box::new(rhs));
        }
        Some(lhs)
    }

    fn until(&mut self) -> Option<Ltl> {
        let lhs = self.unary()?;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "U") {
            self.next();
            let rhs = self.unary()?;
            return Some(Ltl::Until(Box::new(lhs), Box::new(rhs)));
        }
        Some(lhs)
    }

    fn unary(&mut self) -> Option<Ltl> {
        match self.next()? {
            Tok::Not => Some(Ltl::Not(Box::new(self.unary()?))),
            Tok::Open => {
                let inner = self.implies()?;
                (self.next()? == Tok::Close).then_some(inner)
            }
            Tok::Ident(s) => match s.as_str() {
                "G" => Some(Ltl::Globally(Box::new(self.unary()?))),
                "F" => Some(Ltl::Eventually(Box::new(self.unary()?))),
                "true" => Some(Ltl::True),
                "U" => None,
                _ => Some(Ltl::Prop(s)),
            },
            _ => None,
        }
    }
}

/// Parses an LTL formula in the pattern syntax (`G`, `F`, `U`, `!`, `&`,
/// `->`, parentheses).
pub fn parse_ltl(text: &str) -> Option<Ltl> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.implies()?;
    (p.pos == p.toks.len()).then_some(f)
}

/// Literal `p` or `!p` naming a bound proposition.
fn literal(f: &Ltl) -> Option<(&str, bool)> {
    match f {
        Ltl::Prop(p) => Some((p, true)),
        Ltl::Not(inner) => match &**inner {
            Ltl::Prop(p) => Some((p, false)),
            _ => None,
        },
        _ => None,
    }
}

enum Shape<'a> {
    Always(Lit<'a>),
    Eventually(Lit<'a>),
    InfinitelyOften(Lit<'a>),
    EventuallyAlways(Lit<'a>),
    Until(Lit<'a>, Lit<'a>),
    Response(Lit<'a>, Lit<'a>),
    RecurrenceSafety(Lit<'a>, Lit<'a>),
}

type Lit<'a> = (&'a str, bool);

fn gf(f: &Ltl) -> Option<Lit<'_>> {
    match f {
        Ltl::Globally(i) => match &**i {
            Ltl::Eventually(j) => literal(j),
            _ => None,
        },
        _ => None,
    }
}

fn g(f: &Ltl) -> Option<Lit<'_>> {
    match f {
        Ltl::Globally(i) => literal(i),
        _ => None,
    }
}

fn shape(f: &Ltl) -> Option<Shape<'_>> {
    use Ltl::*;
    if let Some(p) = gf(f) {
        return Some(Shape::InfinitelyOften(p));
    }
    if let Some(p) = g(f) {
        return Some(Shape::Always(p));
    }
    match f {
        Eventually(i) => {
            if let Some(p) = literal(i) {
                return Some(Shape::Eventually(p));
            }
            if let Globally(j) = &**i {
                return literal(j).map(Shape::EventuallyAlways);
            }
            None
        }
        Until(a, b) => Some(Shape::Until(literal(a)?, literal(b)?)),
        Globally(i) => match &**i {
            Implies(a, b) => match &**b {
                Eventually(c) => Some(Shape::Response(literal(a)?, literal(c)?)),
                _ => None,
            },
            _ => None,
        },
        And(a, b) => {
            if let (Some(p), Some(q)) = (gf(a), g(b)) {
                return Some(Shape::RecurrenceSafety(p, q));
            }
            if let (Some(q), Some(p)) = (g(a), gf(b)) {
                return Some(Shape::RecurrenceSafety(p, q));
            }
            None
        }
        _ => None,
    }
}

/// Builds the automaton for a recognized pattern. `bindings` maps names to
/// atoms; the automaton's AP lists the used atoms in order of appearance.
pub fn parse_ltl_pattern(text: &str, bindings: &[(String, AffineAtom)]) -> Result<Nba> {
    let unknown = || Error::UnknownPattern(text.trim().to_string());
    let f = parse_ltl(text).ok_or_else(unknown)?;
    let sh = shape(&f).ok_or_else(unknown)?;
    let mut ap: Vec<AffineAtom> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut lit = |(name, positive): Lit<'_>| -> Result<Label> {
        let i = match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                let atom = bindings
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, a)| a.clone())
                    .ok_or_else(|| {
                        Error::InvalidAutomaton(alloc::format!("unbound proposition `{name}`"))
                    })?;
                names.push(name.to_string());
                ap.push(atom);
                ap.len() - 1
            }
        };
        Ok(if positive {
            Label::ap(i)
        } else {
            Label::negate(Label::ap(i))
        })
    };
    let not = |l: &Label| Label::negate(l.clone());
    let and = |a: &Label, b: &Label| Label::And(vec![a.clone(), b.clone()]);
    let or = |a: &Label, b: &Label| Label::Or(vec![a.clone(), b.clone()]);
    let e = |src, label, dst| Edge { src, label, dst };
    let (n, edges, accepting): (usize, Vec<Edge>, Vec<bool>) = match sh {
        Shape::Always(p) => {
            let p = lit(p)?;
            (1, vec![e(0, p, 0)], vec![true])
        }
        Shape::Eventually(p) => {
            let p = lit(p)?;
            (
                2,
                vec![e(0, not(&p), 0), e(0, p, 1), e(1, Label::True, 1)],
                vec![false, true],
            )
        }
        Shape::InfinitelyOften(p) => {
            let p = lit(p)?;
            (
                2,
                vec![e(0, not(&p), 0), e(0, p, 1), e(1, Label::True, 0)],
                vec![false, true],
            )
        }
        Shape::EventuallyAlways(p) => {
            let p = lit(p)?;
            (
                2,
                vec![e(0, Label::True, 0), e(0, p.clone(), 1), e(1, p, 1)],
                vec![false, true],
            )
        }
        Shape::Until(p, q) => {
            let p = lit(p)?;
            let q = lit(q)?;
            (
                2,
                vec![e(0, and(&p, &not(&q)), 0), e(0, q, 1), e(1, Label::True, 1)],
                vec![false, true],
            )
        }
        Shape::Response(p, q) => {
            let p = lit(p)?;
            let q = lit(q)?;
            (
                2,
                vec![
                    e(0, or(&not(&p), &q), 0),
                    e(0, and(&p, &not(&q)), 1),
                    e(1, q.clone(), 0),
                    e(1, not(&q), 1),
                ],
                vec![true, false],
            )
        }
        Shape::RecurrenceSafety(p, q) => {
            let p = lit(p)?;
            let q = lit(q)?;
            let stay = and(&q, &not(&p));
            let hit = and(&q, &p);
            (
                2,
                vec![e(0, stay.clone(), 0), e(0, hit.clone(), 1), e(1, stay, 0), e(1, hit, 1)],
                vec![false, true],
            )
        }
    };
    let states = (0..n).map(|i| i.to_string()).collect();
    Nba::new(states, ap, edges, 0, accepting)
}

/// Explicit LTL semantics on the lasso word `stem · cycle^ω`, with letters
/// given as the sets of true proposition names.
pub fn eval_lasso(f: &Ltl, stem: &[Vec<String>], cycle: &[Vec<String>]) -> bool {
    let len = stem.len() + cycle.len();
    let letters: Vec<&Vec<String>> = stem.iter().chain(cycle).collect();
    let next = |i: usize| if i + 1 < len { i + 1 } else { stem.len() };
    sat_positions(f, &letters, &next)[0]
}

fn sat_positions(
    f: &Ltl,
    letters: &[&Vec<String>],
    next: &dyn Fn(usize) -> usize,
) -> Vec<bool> {
    let len = letters.len();
    let rec = |g: &Ltl| sat_positions(g, letters, next);
    match f {
        Ltl::True => vec![true; len],
        Ltl::Prop(p) => letters.iter().map(|l| l.iter().any(|x| x == p)).collect(),
        Ltl::Not(g) => rec(g).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => rec(a).iter().zip(rec(b)).map(|(x, y)| *x && y).collect(),
        Ltl::Implies(a, b) => rec(a).iter().zip(rec(b)).map(|(x, y)| !*x || y).collect(),
        Ltl::Eventually(g) => until_positions(&vec![true; len], &rec(g), len, next),
        Ltl::Globally(g) => {
            let neg: Vec<bool> = rec(g).into_iter().map(|b| !b).collect();
            until_positions(&vec![true; len], &neg, len, next)
                .into_iter()
                .map(|b| !b)
                .collect()
        }
        Ltl::Until(a, b) => until_positions(&rec(a), &rec(b), len, next),
    }
}

/// Least fixed point of `b ∨ (a ∧ X ·)` over the lasso positions.
fn until_positions(a: &[bool], b: &[bool], len: usize, next: &dyn Fn(usize) -> usize) -> Vec<bool> {
    let mut sat = b.to_vec();
    loop {
        let mut changed = false;
        for i in 0..len {
            if !sat[i] && a[i] && sat[next(i)] {
                sat[i] = true;
                changed = true;
            }
        }
        if !changed {
            return sat;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fixtures::b_atom;
    use crate::logic::Letter;
    use crate::rational::{int, rat};

    fn bindings() -> Vec<(String, AffineAtom)> {
        vec![
            ("p".to_string(), b_atom()),
            (
                "q".to_string(),
                AffineAtom::new(vec![int(0), int(0), int(1)], rat(-1, 4)),
            ),
        ]
    }

    #[test]
    fn state_counts() {
        let b = bindings();
        for (text, n) in [
            ("G p", 1),
            ("F p", 2),
            ("G F p", 2),
            ("F G p", 2),
            ("p U q", 2),
            ("G (p -> F q)", 2),
            ("(G F p) & (G q)", 2),
            ("G F p & G q", 2),
            ("G F !p", 2),
        ] {
            assert_eq!(parse_ltl_pattern(text, &b).unwrap().num_states(), n, "{text}");
        }
    }

    #[test]
    fn infinitely_often_matches_reference_automaton() {
        let nba = parse_ltl_pattern("G F p", &bindings()).unwrap();
        assert_eq!(nba.ap().len(), 1);
        assert_eq!(nba.delta(0, Letter(0)), &[0]);
        assert_eq!(nba.delta(0, Letter(1)), &[1]);
        assert_eq!(nba.delta(1, Letter(0)), &[0]);
        assert_eq!(nba.delta(1, Letter(1)), &[0]);
        assert!(nba.is_accepting(1) && !nba.is_accepting(0));
    }

    #[test]
    fn safety_self_loop_only_on_p() {
        let nba = parse_ltl_pattern("G p", &bindings()).unwrap();
        assert_eq!(nba.delta(0, Letter(1)), &[0]);
        assert!(nba.delta(0, Letter(0)).is_empty());
    }

    #[test]
    fn unknown_shapes_point_to_hoa() {
        let err = parse_ltl_pattern("G G p", &bindings()).unwrap_err();
        assert!(alloc::format!("{err}").contains("HOA"));
        assert!(parse_ltl_pattern("p U", &bindings()).is_err());
        assert!(parse_ltl_pattern("G r", &bindings()).is_err());
    }

    #[test]
    fn lasso_semantics_basics() {
        let f = parse_ltl("G F p").unwrap();
        let p = || vec!["p".to_string()];
        assert!(eval_lasso(&f, &[], &[p()]));
        assert!(!eval_lasso(&f, &[p()], &[vec![]]));
        let u = parse_ltl("p U q").unwrap();
        assert!(eval_lasso(&u, &[p(), p()], &[vec!["q".to_string()]]));
        assert!(!eval_lasso(&u, &[], &[p()]));
    }
}
