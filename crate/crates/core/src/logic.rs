//! Affine atomic propositions, letters and Büchi automata over them.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, Constraint, LpOutcome};
use crate::mdp::Distribution;
use crate::rational::Rational;

/// Default cap on the number of atomic propositions for letter enumeration.
pub const DEFAULT_AP_CAP: usize = 10;

/// Hard limit for explicit transition tables (`2^|AP|` letters per state).
pub const MAX_AP: usize = 16;

/// `coeffs·μ + offset ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineAtom {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
}

impl AffineAtom {
    pub fn new(coeffs: Vec<Rational>, offset: Rational) -> Self {
        Self { coeffs, offset }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value(&self, mu: &[Rational]) -> Rational {
        self.coeffs.iter().zip(mu).map(|(c, m)| c * m).sum::<Rational>() + &self.offset
    }

    /// Closed negation `−coeffs·μ − offset ≥ 0`.
    pub fn negated(&self) -> AffineAtom {
        AffineAtom {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            offset: -self.offset.clone(),
        }
    }

    pub fn to_constraint(&self) -> Constraint {
        Constraint::ge(self.coeffs.clone(), self.offset.clone())
    }
}

pub fn eval_atom(atom: &AffineAtom, mu: &Distribution) -> Result<bool> {
    if atom.dim() != mu.len() {
        return Err(Error::Dimension {
            expected: atom.dim(),
            got: mu.len(),
        });
    }
    Ok(!atom.value(mu.mass()).is_negative())
}

/// Set of atomic proposition indices, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Letter(pub u32);

impl Letter {
    pub fn empty() -> Self {
        Letter(0)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Letter(self.0 | 1 << i)
    }

    pub fn indices(self, n_ap: usize) -> impl Iterator<Item = usize> {
        (0..n_ap).filter(move |&i| self.contains(i))
    }

    pub fn all(n_ap: usize) -> impl Iterator<Item = Letter> {
        (0..1u32 << n_ap).map(Letter)
    }
}

/// Exactly the atoms satisfied at `mu` (negation is strict).
pub fn letter_of(ap: &[AffineAtom], mu: &Distribution) -> Result<Letter> {
    let mut l = Letter::empty();
    for (i, a) in ap.iter().enumerate() {
        if eval_atom(a, mu)? {
            l = l.with(i);
        }
    }
    Ok(l)
}

/// Closed guard of a letter: atoms in the letter as stated, the others
/// negated with `<` relaxed to `≤`.
pub fn guard_of(letter: Letter, ap: &[AffineAtom]) -> Vec<AffineAtom> {
    ap.iter()
        .enumerate()
        .map(|(i, a)| {
            if letter.contains(i) {
                a.clone()
            } else {
                a.negated()
            }
        })
        .collect()
}

/// Constraints describing the probability simplex over `n` states.
pub fn simplex_constraints(n: usize) -> Vec<Constraint> {
    let mut rows: Vec<Constraint> = (0..n)
        .map(|i| {
            let mut c = vec![Rational::zero(); n];
            c[i] = Rational::one();
            Constraint::ge(c, Rational::zero())
        })
        .collect();
    rows.push(Constraint::eq(vec![Rational::one(); n], -Rational::one()));
    rows
}

/// Whether some distribution realizes `letter` under strict semantics.
pub fn letter_satisfiable(letter: Letter, ap: &[AffineAtom], n: usize) -> bool {
    // variables: μ_0..μ_{n-1}, t; negated atoms need value ≤ −t with t > 0
    let width = n + 1;
    let mut rows: Vec<Constraint> = simplex_constraints(n)
        .into_iter()
        .map(|mut c| {
            c.coeffs.push(Rational::zero());
            c
        })
        .collect();
    let mut t_bound = vec![Rational::zero(); width];
    t_bound[n] = -Rational::one();
    rows.push(Constraint::ge(t_bound, Rational::one()));
    for (i, a) in ap.iter().enumerate() {
        let mut coeffs = a.coeffs.clone();
        if letter.contains(i) {
            coeffs.push(Rational::zero());
            rows.push(Constraint::ge(coeffs, a.offset.clone()));
        } else {
            let mut neg: Vec<Rational> = coeffs.iter().map(|c| -c).collect();
            neg.push(-Rational::one());
            rows.push(Constraint::ge(neg, -a.offset.clone()));
        }
    }
    let mut objective = vec![Rational::zero(); width];
    objective[n] = -Rational::one();
    match lp::minimize(width, &objective, &Rational::zero(), &rows) {
        LpOutcome::Optimal { value, .. } => value.is_negative(),
        LpOutcome::Unbounded => true,
        LpOutcome::Infeasible => false,
    }
}

/// Letters realizable by some distribution on the simplex, in mask order.
pub fn satisfiable_letters(ap: &[AffineAtom], n: usize, cap: usize) -> Result<Vec<Letter>> {
    if ap.len() > cap {
        return Err(Error::TooManyPropositions {
            count: ap.len(),
            cap,
        });
    }
    if let Some(a) = ap.iter().find(|a| a.dim() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: a.dim(),
        });
    }
    Ok(Letter::all(ap.len())
        .filter(|&l| letter_satisfiable(l, ap, n))
        .collect())
}

/// Boolean edge label over AP indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    True,
    False,
    Ap(usize),
    Not(Box<Label>),
    And(Vec<Label>),
    Or(Vec<Label>),
}

impl Label {
    pub fn ap(i: usize) -> Self {
        Label::Ap(i)
    }

    pub fn negate(l: Label) -> Self {
        Label::Not(Box::new(l))
    }

    pub fn eval(&self, letter: Letter) -> bool {
        match self {
            Label::True => true,
            Label::False => false,
            Label::Ap(i) => letter.contains(*i),
            Label::Not(l) => !l.eval(letter),
            Label::And(ls) => ls.iter().all(|l| l.eval(letter)),
            Label::Or(ls) => ls.iter().any(|l| l.eval(letter)),
        }
    }

    pub fn max_ap(&self) -> Option<usize> {
        match self {
            Label::True | Label::False => None,
            Label::Ap(i) => Some(*i),
            Label::Not(l) => l.max_ap(),
            Label::And(ls) | Label::Or(ls) => ls.iter().filter_map(Label::max_ap).max(),
        }
    }

    /// Disjunctive normal form; contradictory cubes are dropped and
    /// duplicates removed.
    pub fn to_cubes(&self) -> Vec<Cube> {
        let mut out = self.dnf(false);
        out.sort();
        out.dedup();
        out
    }

    fn dnf(&self, negate: bool) -> Vec<Cube> {
        match (self, negate) {
            (Label::True, false) | (Label::False, true) => vec![Cube::default()],
            (Label::True, true) | (Label::False, false) => vec![],
            (Label::Ap(i), false) => vec![Cube {
                pos: 1 << i,
                neg: 0,
            }],
            (Label::Ap(i), true) => vec![Cube {
                pos: 0,
                neg: 1 << i,
            }],
            (Label::Not(l), n) => l.dnf(!n),
            (Label::And(ls), false) | (Label::Or(ls), true) => {
                let mut acc = vec![Cube::default()];
                for l in ls {
                    let part = l.dnf(negate);
                    let mut next = Vec::new();
                    for a in &acc {
                        for b in &part {
                            let c = Cube {
                                pos: a.pos | b.pos,
                                neg: a.neg | b.neg,
                            };
                            if c.pos & c.neg == 0 {
                                next.push(c);
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
            (Label::Or(ls), false) | (Label::And(ls), true) => {
                ls.iter().flat_map(|l| l.dnf(negate)).collect()
            }
        }
    }
}

/// Conjunction of literals: atoms in `pos` hold, atoms in `neg` fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cube {
    pub pos: u32,
    pub neg: u32,
}

impl Cube {
    pub fn matches(&self, letter: Letter) -> bool {
        letter.0 & self.pos == self.pos && letter.0 & self.neg == 0
    }

    /// Closed guard of the cube (unconstrained atoms are omitted).
    pub fn guard(&self, ap: &[AffineAtom]) -> Vec<AffineAtom> {
        let mut out = Vec::new();
        for (i, a) in ap.iter().enumerate() {
            if self.pos >> i & 1 == 1 {
                out.push(a.clone());
            } else if self.neg >> i & 1 == 1 {
                out.push(a.negated());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
}

/// Nondeterministic Büchi automaton over letters `2^AP` with state-based
/// acceptance. The transition relation is tabulated per letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    states: Vec<String>,
    ap: Vec<AffineAtom>,
    edges: Vec<Edge>,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<Vec<usize>>>,
}

impl Nba {
    pub fn new(
        states: Vec<String>,
        ap: Vec<AffineAtom>,
        edges: Vec<Edge>,
        initial: usize,
        accepting: Vec<bool>,
    ) -> Result<Self> {
        let nq = states.len();
        if nq == 0 {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        if initial >= nq {
            return Err(Error::InvalidAutomaton(format!(
                "initial state {initial} out of range"
            )));
        }
        if accepting.len() != nq {
            return Err(Error::InvalidAutomaton(
                "acceptance marks do not cover all states".into(),
            ));
        }
        if ap.len() > MAX_AP {
            return Err(Error::TooManyPropositions {
                count: ap.len(),
                cap: MAX_AP,
            });
        }
        if let Some(a) = ap.iter().find(|a| a.dim() != ap[0].dim()) {
            return Err(Error::Dimension {
                expected: ap[0].dim(),
                got: a.dim(),
            });
        }
        for e in &edges {
            if e.src >= nq || e.dst >= nq {
                return Err(Error::InvalidAutomaton(format!(
                    "edge {} -> {} leaves the state set",
                    e.src, e.dst
                )));
            }
            if let Some(i) = e.label.max_ap() {
                if i >= ap.len() {
                    return Err(Error::InvalidAutomaton(format!(
                        "label mentions undeclared proposition {i}"
                    )));
                }
            }
        }
        let mut delta = vec![vec![Vec::new(); 1 << ap.len()]; nq];
        for e in &edges {
            for l in Letter::all(ap.len()) {
                if e.label.eval(l) {
                    delta[e.src][l.0 as usize].push(e.dst);
                }
            }
        }
        for row in delta.iter_mut() {
            for succ in row.iter_mut() {
                succ.sort_unstable();
                succ.dedup();
            }
        }
        Ok(Self {
            states,
            ap,
            edges,
            initial,
            accepting,
            delta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn ap(&self) -> &[AffineAtom] {
        &self.ap
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    /// Successors of `q` on `letter`, sorted.
    pub fn delta(&self, q: usize, letter: Letter) -> &[usize] {
        &self.delta[q][letter.0 as usize]
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().flatten().all(|s| s.len() <= 1)
    }

    /// Advances a set of automaton states by one letter.
    pub fn advance(&self, current: &BTreeSet<usize>, letter: Letter) -> BTreeSet<usize> {
        current
            .iter()
            .flat_map(|&q| self.delta(q, letter).iter().copied())
            .collect()
    }

    /// Whether `stem · loop^ω` is accepted (loop non-empty).
    pub fn accepts_lasso(&self, stem: &[Letter], cycle: &[Letter]) -> bool {
        assert!(!cycle.is_empty(), "lasso loop must be non-empty");
        let mut cur: BTreeSet<usize> = BTreeSet::from([self.initial]);
        for &l in stem {
            cur = self.advance(&cur, l);
        }
        // product graph nodes (q, position in loop)
        let k = cycle.len();
        let nq = self.num_states();
        let node = |q: usize, i: usize| q * k + i;
        let succ = |v: usize| -> Vec<usize> {
            let (q, i) = (v / k, v % k);
            self.delta(q, cycle[i])
                .iter()
                .map(|&q2| node(q2, (i + 1) % k))
                .collect()
        };
        let mut reach = vec![false; nq * k];
        let mut stack: Vec<usize> = cur.iter().map(|&q| node(q, 0)).collect();
        while let Some(v) = stack.pop() {
            if reach[v] {
                continue;
            }
            reach[v] = true;
            stack.extend(succ(v));
        }
        // an accepting node reachable from itself
        (0..nq * k).any(|v| {
            if !reach[v] || !self.accepting[v / k] {
                return false;
            }
            let mut seen = vec![false; nq * k];
            let mut stack = succ(v);
            while let Some(w) = stack.pop() {
                if w == v {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.extend(succ(w));
                }
            }
            false
        })
    }
}
