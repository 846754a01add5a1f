//! Elimination of the universal quantifier over distributions.
//!
//! A constraint `∀μ. ⋀ h_j(μ) ≥ 0 ⇒ g(μ) ≥ 0` becomes the requirement that
//! `g` equals a non-negative combination of products of premise rows,
//! identically in `μ`. Products of at most one row give Farkas' lemma; the
//! degree-`d` truncation of the multiplicative monoid gives Handelman's
//! representation. Degree one and Farkas produce the same system.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{premise_feasible, Constraint, ExistsConstraint, ForallConstraint};
use crate::error::{Error, Result};
use crate::lp::{self, Rel};
use crate::poly::{Poly, Var, VarKind, VarPool};
use crate::rational::Rational;
use num_traits::Zero;

/// Default limit on the number of monoid products per constraint.
pub const DEFAULT_MONOID_LIMIT: usize = 20_000;

/// Default Handelman degree.
pub const DEFAULT_HANDELMAN_DEGREE: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub poly: Poly,
    pub rel: Rel,
    pub origin: String,
}

/// Quantifier-free polynomial relations over template unknowns and
/// multipliers. No distribution variable occurs in any relation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExistentialSystem {
    pub relations: Vec<Relation>,
    /// Labels of constraints discharged because their premise is empty.
    pub discharged: Vec<String>,
}

impl ExistentialSystem {
    pub fn extend(&mut self, other: ExistentialSystem) {
        self.relations.extend(other.relations);
        self.discharged.extend(other.discharged);
    }

    /// Template unknowns occurring in some relation, sorted.
    pub fn vars(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .relations
            .iter()
            .flat_map(|r| r.poly.template_vars())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Farkas' lemma: multipliers `λ₀..λ_m ≥ 0` per conclusion row with
/// `g = λ₀ + Σ λ_j·h_j` identically in `μ`.
pub fn farkas_transform(pool: &mut VarPool, c: &ForallConstraint, n: usize) -> Result<ExistentialSystem> {
    if let Some(d) = c.conclusion.iter().map(Poly::mu_degree).max() {
        if d > 1 {
            return Err(Error::RequiresHandelman(d));
        }
    }
    eliminate(pool, c, 1, usize::MAX, n)
}

/// Handelman representation with monoid products of at most `degree` rows.
pub fn handelman_transform(
    pool: &mut VarPool,
    c: &ForallConstraint,
    degree: u32,
    monoid_limit: usize,
    n: usize,
) -> Result<ExistentialSystem> {
    let needed = c.conclusion.iter().map(Poly::mu_degree).max().unwrap_or(0);
    if needed > degree {
        return Err(Error::HandelmanDegree { degree, needed });
    }
    eliminate(pool, c, degree, monoid_limit, n)
}

/// Picks Farkas for affine conclusions and Handelman at
/// `max(degree, conclusion degree)` otherwise.
pub fn transform(
    pool: &mut VarPool,
    c: &ForallConstraint,
    degree: u32,
    monoid_limit: usize,
    n: usize,
) -> Result<ExistentialSystem> {
    let needed = c.conclusion.iter().map(Poly::mu_degree).max().unwrap_or(0);
    if needed <= 1 {
        farkas_transform(pool, c, n)
    } else {
        handelman_transform(pool, c, degree.max(needed), monoid_limit, n)
    }
}

/// Transforms a whole constraint list; existential parts pass through.
pub fn transform_all(
    pool: &mut VarPool,
    constraints: &[Constraint],
    degree: u32,
    monoid_limit: usize,
    n: usize,
) -> Result<ExistentialSystem> {
    let mut sys = ExistentialSystem::default();
    for c in constraints {
        match c {
            Constraint::Forall(f) => sys.extend(transform(pool, f, degree, monoid_limit, n)?),
            Constraint::Exists(e) => sys.extend(passthrough(e)),
        }
    }
    Ok(sys)
}

fn passthrough(e: &ExistsConstraint) -> ExistentialSystem {
    ExistentialSystem {
        relations: e
            .relations
            .iter()
            .map(|(p, rel)| Relation {
                poly: p.clone(),
                rel: *rel,
                origin: e.label.clone(),
            })
            .collect(),
        discharged: Vec::new(),
    }
}

/// Solves a system whose relations are all affine in the unknowns with the
/// exact simplex. `Ok(None)` means infeasible.
pub fn linear_model(sys: &ExistentialSystem) -> Result<Option<BTreeMap<u32, Rational>>> {
    let vars = sys.vars();
    let col: BTreeMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut rows = Vec::with_capacity(sys.relations.len());
    for r in &sys.relations {
        if r.poly.degree() > 1 {
            return Err(Error::Solver(format!("relation from `{}` is not linear", r.origin)));
        }
        let mut coeffs = vec![Rational::zero(); vars.len()];
        let mut offset = Rational::zero();
        for (m, c) in r.poly.terms() {
            match m.factors() {
                [] => offset = c.clone(),
                [(Var::T(t), 1)] => coeffs[col[t]] = c.clone(),
                _ => unreachable!("degree checked"),
            }
        }
        rows.push(lp::Constraint {
            coeffs,
            offset,
            rel: r.rel,
        });
    }
    Ok(lp::feasible_point(vars.len(), &rows)
        .map(|x| vars.iter().copied().zip(x).collect()))
}

/// Index multisets of size `≤ degree` over `m` rows: by size, then
/// lexicographically.
pub fn monoid_indices(m: usize, degree: u32) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::new();
        for prefix in &layer {
            let start = prefix.last().copied().unwrap_or(0);
            for j in start..m {
                let mut v = prefix.clone();
                v.push(j);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn monoid_size(m: usize, degree: u32) -> usize {
    // C(m + d, d), saturating
    let mut size: u128 = 1;
    for k in 1..=degree as u128 {
        size = size * (m as u128 + k) / k;
        if size > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    size as usize
}

fn eliminate(
    pool: &mut VarPool,
    c: &ForallConstraint,
    degree: u32,
    monoid_limit: usize,
    n: usize,
) -> Result<ExistentialSystem> {
    let size = monoid_size(c.premise.len(), degree);
    if size > monoid_limit {
        return Err(Error::MonoidTooLarge {
            size,
            limit: monoid_limit,
        });
    }
    let template_free = c.premise.iter().all(|p| !p.has_template_vars());
    if template_free && !premise_feasible(&c.premise, n)? {
        return Ok(ExistentialSystem {
            relations: Vec::new(),
            discharged: vec![c.label.clone()],
        });
    }
    let indices = monoid_indices(c.premise.len(), degree);
    let products: Vec<Poly> = indices
        .iter()
        .map(|ix| ix.iter().fold(Poly::one(), |acc, &j| acc * c.premise[j].clone()))
        .collect();
    let mut relations = Vec::new();
    for (row, g) in c.conclusion.iter().enumerate() {
        let origin = format!("{} row {row}", c.label);
        let mut residual = g.clone();
        for (k, h) in products.iter().enumerate() {
            let lam = pool.fresh(format!("lam_{}_r{row}_m{k}", c.label), VarKind::Multiplier);
            let lam = Poly::tvar(lam);
            relations.push(Relation {
                poly: lam.clone(),
                rel: Rel::Ge,
                origin: origin.clone(),
            });
            residual = residual - lam * h.clone();
        }
        for (_, coeff) in residual.by_mu_monomial() {
            relations.push(Relation {
                poly: coeff,
                rel: Rel::Eq,
                origin: origin.clone(),
            });
        }
    }
    Ok(ExistentialSystem {
        relations,
        discharged: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::simplex_premise;
    use crate::rational::{int, rat};

    fn check(sys: &ExistentialSystem, pool: &VarPool, values: &BTreeMap<&str, Rational>) -> bool {
        sys.relations.iter().all(|r| {
            let v = r
                .poly
                .eval(|v| match v {
                    Var::T(t) => Some(values.get(pool.name(t)).cloned().unwrap_or_default()),
                    Var::Mu(_) => None,
                })
                .unwrap();
            match r.rel {
                Rel::Ge => v >= int(0),
                Rel::Eq => v == int(0),
            }
        })
    }

    #[test]
    fn interval_example() {
        // x ≥ 0, 1 − x ≥ 0 ⇒ 2 − x ≥ 0 via 1 + (1 − x)
        let c = ForallConstraint {
            label: "t".into(),
            premise: vec![Poly::mu(0), &Poly::one() - &Poly::mu(0)],
            conclusion: vec![Poly::affine(&[int(-1)], &int(2))],
        };
        let mut pool = VarPool::new();
        let sys = farkas_transform(&mut pool, &c, 1).unwrap();
        assert_eq!(pool.len(), 3);
        let mut vals = BTreeMap::new();
        vals.insert("lam_t_r0_m0", int(1));
        vals.insert("lam_t_r0_m2", int(1));
        assert!(check(&sys, &pool, &vals));
        vals.insert("lam_t_r0_m2", int(0));
        assert!(!check(&sys, &pool, &vals));
    }

    #[test]
    fn simplex_example() {
        // 2 − μ₁ − 2μ₂ = 2(1 − μ₁ − μ₂) + μ₁
        let c = ForallConstraint {
            label: "s".into(),
            premise: simplex_premise(2),
            conclusion: vec![Poly::affine(&[int(-1), int(-2)], &int(2))],
        };
        let mut pool = VarPool::new();
        let sys = farkas_transform(&mut pool, &c, 2).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert("lam_s_r0_m1", int(1));
        vals.insert("lam_s_r0_m4", int(2));
        assert!(check(&sys, &pool, &vals));
    }

    #[test]
    fn quadratic_conclusion_needs_handelman() {
        let c = ForallConstraint {
            label: "q".into(),
            premise: vec![Poly::mu(0), &Poly::one() - &Poly::mu(0)],
            conclusion: vec![Poly::mu(0) * (&Poly::one() - &Poly::mu(0))],
        };
        let mut pool = VarPool::new();
        assert_eq!(farkas_transform(&mut pool, &c, 1), Err(Error::RequiresHandelman(2)));
        let sys = handelman_transform(&mut pool, &c, 2, DEFAULT_MONOID_LIMIT, 1).unwrap();
        assert_eq!(pool.len(), 6);
        // monoid order: 1, x, 1−x, x², x(1−x), (1−x)²
        let mut vals = BTreeMap::new();
        vals.insert("lam_q_r0_m4", int(1));
        assert!(check(&sys, &pool, &vals));
    }

    #[test]
    fn monoid_enumeration() {
        assert_eq!(
            monoid_indices(2, 2),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![0, 0],
                vec![0, 1],
                vec![1, 1]
            ]
        );
        assert_eq!(monoid_size(2, 2), 6);
        assert_eq!(monoid_size(5, 2), 21);
    }

    #[test]
    fn degree_one_matches_farkas() {
        let c = ForallConstraint {
            label: "m".into(),
            premise: simplex_premise(3),
            conclusion: vec![Poly::affine(&[int(1), rat(-1, 2), int(0)], &int(1)) + Poly::tvar(0)],
        };
        let mut p1 = VarPool::new();
        p1.fresh("t".into(), VarKind::Ranking);
        let mut p2 = p1.clone();
        let a = farkas_transform(&mut p1, &c, 3).unwrap();
        let b = handelman_transform(&mut p2, &c, 1, DEFAULT_MONOID_LIMIT, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(p1, p2);
    }

    #[test]
    fn infeasible_premise_discharged() {
        let c = ForallConstraint {
            label: "x".into(),
            premise: vec![Poly::mu(0), Poly::affine(&[int(-1)], &int(-1))],
            conclusion: vec![Poly::constant(int(-1))],
        };
        let mut pool = VarPool::new();
        let sys = farkas_transform(&mut pool, &c, 1).unwrap();
        assert!(sys.relations.is_empty());
        assert_eq!(sys.discharged, vec![String::from("x")]);
    }

    #[test]
    fn false_conclusion_on_feasible_premise_has_no_witness() {
        let c = ForallConstraint {
            label: "f".into(),
            premise: simplex_premise(2),
            conclusion: vec![Poly::constant(int(-1))],
        };
        let mut pool = VarPool::new();
        let sys = farkas_transform(&mut pool, &c, 2).unwrap();
        assert_eq!(sys.relations.len(), 5 + 3);
        assert_eq!(linear_model(&sys).unwrap(), None);
        let ok = ForallConstraint {
            label: "g".into(),
            conclusion: vec![Poly::affine(&[int(-1), int(-2)], &int(2))],
            ..c
        };
        let sys = farkas_transform(&mut pool, &ok, 2).unwrap();
        assert!(linear_model(&sys).unwrap().is_some());
    }

    #[test]
    fn monoid_limit_enforced() {
        let c = ForallConstraint {
            label: "big".into(),
            premise: simplex_premise(40),
            conclusion: vec![Poly::mu(0) * Poly::mu(1)],
        };
        let mut pool = VarPool::new();
        let err = handelman_transform(&mut pool, &c, 4, DEFAULT_MONOID_LIMIT, 40);
        assert!(matches!(err, Err(Error::MonoidTooLarge { .. })));
    }
}
