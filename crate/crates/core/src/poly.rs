//! Sparse exact polynomials over distribution variables `μ_i` and named
//! template unknowns.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A polynomial variable: a distribution coordinate or a template unknown
/// (an index into a [`VarPool`]). Distribution coordinates sort first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Mu(u32),
    T(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Ranking,
    Invariant,
    Strategy,
    Multiplier,
    /// Fresh initial-distribution coordinate in existential mode.
    InitPoint,
}

/// Registry of template unknowns. Names are unique; ids are dense.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarPool {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    index: BTreeMap<String, u32>,
}

impl VarPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a fresh unknown; panics on a duplicate name since naming is
    /// derived deterministically from indices.
    pub fn fresh(&mut self, name: String, kind: VarKind) -> u32 {
        let id = self.names.len() as u32;
        let prev = self.index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate template variable `{name}`");
        self.names.push(name);
        self.kinds.push(kind);
        id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn kind(&self, id: u32) -> VarKind {
        self.kinds[id as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.kinds.iter().filter(|k| **k == kind).count()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> {
        0..self.names.len() as u32
    }

    pub fn var_name(&self, v: Var) -> String {
        match v {
            Var::Mu(i) => format!("V{i}"),
            Var::T(t) => self.names[t as usize].clone(),
        }
    }
}

/// Power product with positive exponents, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mu_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::Mu(_)))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn template_degree(&self) -> u32 {
        self.degree() - self.mu_degree()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Splits into the μ part and the template part.
    pub fn split(&self) -> (Monomial, Monomial) {
        let (mu, t): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| matches!(v, Var::Mu(_)));
        (Monomial(mu), Monomial(t))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical sparse polynomial: merged monomials, no zero coefficients,
/// terms kept in graded order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn mu(i: usize) -> Self {
        Self::var(Var::Mu(i as u32))
    }

    pub fn tvar(id: u32) -> Self {
        Self::var(Var::T(id))
    }

    /// `coeffs·μ + offset` with concrete coefficients.
    pub fn affine(coeffs: &[Rational], offset: &Rational) -> Self {
        let mut p = Self::constant(offset.clone());
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(Var::Mu(i as u32)), c.clone());
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mu_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::mu_degree).max().unwrap_or(0)
    }

    pub fn template_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::template_degree).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn has_template_vars(&self) -> bool {
        self.template_degree() > 0
    }

    pub fn has_mu_vars(&self) -> bool {
        self.mu_degree() > 0
    }

    /// Template variables occurring in the polynomial, sorted.
    pub fn template_vars(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter())
            .filter_map(|(v, _)| match v {
                Var::T(t) => Some(*t),
                Var::Mu(_) => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Groups terms by their μ-monomial; each value is a polynomial in
    /// template variables only.
    pub fn by_mu_monomial(&self) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (mu, t) = m.split();
            out.entry(mu).or_default().add_term(t, c.clone());
        }
        out
    }

    /// Replaces each `μ_i` by `images[i]`.
    pub fn substitute_mu(&self, images: &[Poly]) -> Result<Poly> {
        let max_mu = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter())
            .filter_map(|(v, _)| match v {
                Var::Mu(i) => Some(*i as usize),
                Var::T(_) => None,
            })
            .max();
        if let Some(i) = max_mu {
            if i >= images.len() {
                return Err(Error::Dimension {
                    expected: i + 1,
                    got: images.len(),
                });
            }
        }
        Ok(self.substitute(|v| match v {
            Var::Mu(i) => Some(images[i as usize].clone()),
            Var::T(_) => None,
        }))
    }

    /// Replaces the variables for which `f` returns an image.
    pub fn substitute(&self, f: impl Fn(Var) -> Option<Poly>) -> Poly {
        let mut cache: BTreeMap<Var, Option<Poly>> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            let mut kept = Monomial::one();
            for &(v, e) in &m.0 {
                let image = cache.entry(v).or_insert_with(|| f(v));
                match image {
                    Some(p) => {
                        for _ in 0..e {
                            term = &term * &*p;
                        }
                    }
                    None => kept = kept.mul(&Monomial(vec![(v, e)])),
                }
            }
            if !kept.is_one() {
                term = term.mul_monomial(&kept);
            }
            out = out + term;
        }
        out
    }

    /// Substitutes concrete values for the template variables `f` knows.
    pub fn eval_template(&self, f: impl Fn(u32) -> Option<Rational>) -> Poly {
        self.substitute(|v| match v {
            Var::T(t) => f(t).map(Poly::constant),
            Var::Mu(_) => None,
        })
    }

    /// Exact evaluation under a total assignment.
    pub fn eval(&self, f: impl Fn(Var) -> Option<Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(x, e) in &m.0 {
                let val = f(x).ok_or_else(|| {
                    Error::Unassigned(match x {
                        Var::Mu(i) => format!("V{i}"),
                        Var::T(t) => format!("t{t}"),
                    })
                })?;
                for _ in 0..e {
                    v *= &val;
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Evaluates a template-free polynomial at a distribution vector.
    pub fn eval_mu(&self, mu: &[Rational]) -> Result<Rational> {
        self.eval(|v| match v {
            Var::Mu(i) => mu.get(i as usize).cloned(),
            Var::T(_) => None,
        })
    }

    /// Splits an affine, template-free polynomial into `(coeffs, offset)`.
    pub fn to_affine(&self, n: usize) -> Option<(Vec<Rational>, Rational)> {
        let mut coeffs = vec![Rational::zero(); n];
        let mut offset = Rational::zero();
        for (m, c) in &self.terms {
            match m.0.as_slice() {
                [] => offset = c.clone(),
                [(Var::Mu(i), 1)] if (*i as usize) < n => coeffs[*i as usize] = c.clone(),
                _ => return None,
            }
        }
        Some((coeffs, offset))
    }

    fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
