//! Generation of the initial, Büchi-ranking and strategy-validity
//! constraints over template unknowns.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logic::{guard_of, simplex_constraints, Letter, Nba};
use crate::lp::{self, Constraint as LinRow, Rel};
use crate::mdp::Mdp;
use crate::poly::{Poly, VarKind, VarPool};
use crate::rational::Rational;
use crate::templates::{CertTemplate, StrategyTemplate, SymbolicStep};

/// Default cap on enumerated successor choices.
pub const DEFAULT_CHOICE_BUDGET: usize = 256;

/// `∀μ. ⋀ premise ≥ 0 ⇒ ⋀ conclusion ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForallConstraint {
    pub label: String,
    pub premise: Vec<Poly>,
    pub conclusion: Vec<Poly>,
}

/// Quantifier-free relations over template unknowns only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistsConstraint {
    pub label: String,
    pub relations: Vec<(Poly, Rel)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Forall(ForallConstraint),
    Exists(ExistsConstraint),
}

impl Constraint {
    pub fn label(&self) -> &str {
        match self {
            Constraint::Forall(c) => &c.label,
            Constraint::Exists(c) => &c.label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// The specification must hold from every initial distribution.
    Universal,
    /// The specification must hold from some initial distribution.
    Existential,
}

/// Initial distributions: an affine region of the simplex, or a finite
/// set of points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InitRegion {
    pub rows: Vec<LinRow>,
    pub points: Vec<Vec<Rational>>,
}

impl InitRegion {
    pub fn point(p: Vec<Rational>) -> Self {
        Self {
            rows: Vec::new(),
            points: vec![p],
        }
    }

    pub fn whole_simplex() -> Self {
        Self::default()
    }

    /// Checks dimensions and non-emptiness on the simplex. Points must be
    /// distributions satisfying every row.
    pub fn validate(&self, n: usize) -> Result<()> {
        for r in &self.rows {
            if r.coeffs.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: r.coeffs.len(),
                });
            }
        }
        for p in &self.points {
            if p.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: p.len(),
                });
            }
            let ok = simplex_constraints(n)
                .iter()
                .chain(&self.rows)
                .all(|c| c.holds(p));
            if !ok {
                return Err(Error::EmptyInitRegion);
            }
        }
        if self.points.is_empty() {
            let mut all = simplex_constraints(n);
            all.extend(self.rows.iter().cloned());
            if !lp::is_feasible(n, &all) {
                return Err(Error::EmptyInitRegion);
            }
        }
        Ok(())
    }

    /// Row-form pieces whose union is the region: one per point, or the
    /// region rows themselves.
    pub fn pieces(&self) -> Vec<Vec<LinRow>> {
        if self.points.is_empty() {
            return vec![self.rows.clone()];
        }
        self.points
            .iter()
            .map(|p| {
                (0..p.len())
                    .map(|i| {
                        let mut c = vec![Rational::zero(); p.len()];
                        c[i] = Rational::one();
                        LinRow::eq(c, -p[i].clone())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Premise polynomials for the simplex (the sum constraint as a pair).
pub fn simplex_premise(n: usize) -> Vec<Poly> {
    let mut out: Vec<Poly> = (0..n).map(Poly::mu).collect();
    let sum = (0..n).fold(Poly::zero(), |acc, i| acc + Poly::mu(i));
    out.push(&sum - &Poly::one());
    out.push(&Poly::one() - &sum);
    out
}

/// Linear rows as premise polynomials, equalities split into pairs.
pub fn rows_premise(rows: &[LinRow]) -> Vec<Poly> {
    let mut out = Vec::new();
    for r in rows {
        let p = Poly::affine(&r.coeffs, &r.offset);
        if r.rel == Rel::Eq {
            out.push(p.clone());
            out.push(-p);
        } else {
            out.push(p);
        }
    }
    out
}

fn location_rows(t: &CertTemplate, q: usize, images: &[Poly], scale: &Poly) -> Vec<Poly> {
    let mut rows = vec![t.ranking[q].at(images, scale)];
    rows.extend(t.invariant[q].iter().map(|r| r.at(images, scale)));
    rows
}

fn identity_images(n: usize) -> Vec<Poly> {
    (0..n).map(Poly::mu).collect()
}

/// Initial condition: `C(q₀,·) ≥ 0` and the invariant rows of `q₀` on the
/// initial region.
pub fn gen_initial(
    pool: &mut VarPool,
    mode: InitMode,
    init: &InitRegion,
    t: &CertTemplate,
    q0: usize,
    n: usize,
) -> Result<Vec<Constraint>> {
    init.validate(n)?;
    let one = Poly::one();
    match mode {
        InitMode::Universal => {
            let pieces = init.pieces();
            let single = pieces.len() == 1;
            Ok(pieces
                .into_iter()
                .enumerate()
                .map(|(k, rows)| {
                    let mut premise = simplex_premise(n);
                    premise.extend(rows_premise(&rows));
                    Constraint::Forall(ForallConstraint {
                        label: if single {
                            "init".into()
                        } else {
                            format!("init_p{k}")
                        },
                        premise,
                        conclusion: location_rows(t, q0, &identity_images(n), &one),
                    })
                })
                .collect())
        }
        InitMode::Existential => {
            let mut relations = Vec::new();
            let point: Vec<Poly> = match init.points.len() {
                0 => {
                    let vars: Vec<Poly> = (0..n)
                        .map(|i| Poly::tvar(pool.fresh(format!("init_s{i}"), VarKind::InitPoint)))
                        .collect();
                    for p in simplex_premise(n) {
                        relations.push((p.substitute_mu(&vars)?, Rel::Ge));
                    }
                    for r in &init.rows {
                        let p = Poly::affine(&r.coeffs, &r.offset).substitute_mu(&vars)?;
                        relations.push((p, r.rel));
                    }
                    vars
                }
                1 => init.points[0].iter().cloned().map(Poly::constant).collect(),
                k => {
                    let sel: Vec<Poly> = (0..k)
                        .map(|j| Poly::tvar(pool.fresh(format!("init_sel{j}"), VarKind::InitPoint)))
                        .collect();
                    let mut total = Poly::zero();
                    for s in &sel {
                        relations.push((s * &(s - &one), Rel::Eq));
                        total = total + s.clone();
                    }
                    relations.push((total - one.clone(), Rel::Eq));
                    (0..n)
                        .map(|i| {
                            init.points
                                .iter()
                                .zip(&sel)
                                .fold(Poly::zero(), |acc, (p, s)| acc + s.scale(&p[i]))
                        })
                        .collect()
                }
            };
            for row in location_rows(t, q0, &point, &one) {
                relations.push((row, Rel::Ge));
            }
            Ok(vec![Constraint::Exists(ExistsConstraint {
                label: "init".into(),
                relations,
            })])
        }
    }
}

/// One automaton successor per `(location, letter)` pair.
pub type SuccessorChoice = BTreeMap<(usize, Letter), usize>;

/// Which template-dependent rows enter Büchi premises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PremiseMode {
    /// Premise is the simplex and the letter guard; the ranking and
    /// invariant rows of the source location are kept only where the
    /// conclusion is `false`. Dropping premise rows strengthens the
    /// constraint, so solutions stay sound.
    Minimal,
    /// Premise includes `C(q,μ) ≥ 0` and the invariant rows of `q`.
    Full,
}

/// Ranking condition for location `q` on letter `letter` with the chosen
/// successor (`None` when the automaton has no successor).
#[allow(clippy::too_many_arguments)]
pub fn gen_buchi(
    nba: &Nba,
    q: usize,
    letter: Letter,
    succ: Option<usize>,
    t: &CertTemplate,
    step: &SymbolicStep,
    mode: PremiseMode,
    n: usize,
) -> ForallConstraint {
    let mut premise = simplex_premise(n);
    for g in guard_of(letter, nba.ap()) {
        premise.push(Poly::affine(&g.coeffs, &g.offset));
    }
    let own = location_rows(t, q, &identity_images(n), &Poly::one());
    let Some(q2) = succ else {
        premise.extend(own);
        return ForallConstraint {
            label: format!("buchi_q{q}_l{}_none", letter.0),
            premise,
            conclusion: vec![Poly::constant(-Rational::one())],
        };
    };
    if mode == PremiseMode::Full {
        premise.extend(own.iter().cloned());
    }
    let den = &step.denominator;
    let mut conclusion = location_rows(t, q2, &step.images, den);
    if !nba.is_accepting(q) {
        let decrease = (&own[0] - &Poly::one()) * den.clone() - conclusion[0].clone();
        conclusion.push(decrease);
    }
    ForallConstraint {
        label: format!("buchi_q{q}_l{}_q{q2}", letter.0),
        premise,
        conclusion,
    }
}

/// Locations reachable from the initial one through satisfiable letters.
pub fn reachable_locations(nba: &Nba, letters: &[Letter]) -> Vec<usize> {
    let mut seen = BTreeSet::from([nba.initial()]);
    let mut stack = vec![nba.initial()];
    while let Some(q) = stack.pop() {
        for &l in letters {
            for &q2 in nba.delta(q, l) {
                if seen.insert(q2) {
                    stack.push(q2);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Branch points of the successor relation, in `(q, letter)` order.
pub fn branch_points(nba: &Nba, locations: &[usize], letters: &[Letter]) -> Vec<((usize, Letter), Vec<usize>)> {
    let mut out = Vec::new();
    for &q in locations {
        for &l in letters {
            let succ = nba.delta(q, l);
            if !succ.is_empty() {
                out.push(((q, l), succ.to_vec()));
            }
        }
    }
    out
}

/// Successor choices in lexicographic order (first branch point most
/// significant), at most `budget` of them. The flag reports whether the
/// enumeration was cut short.
pub fn enumerate_choices(
    nba: &Nba,
    locations: &[usize],
    letters: &[Letter],
    budget: usize,
) -> (Vec<SuccessorChoice>, bool) {
    let points = branch_points(nba, locations, letters);
    let mut digits = vec![0usize; points.len()];
    let mut out = Vec::new();
    loop {
        if out.len() == budget {
            return (out, true);
        }
        out.push(
            points
                .iter()
                .zip(&digits)
                .map(|((key, succ), &d)| (*key, succ[d]))
                .collect(),
        );
        let mut i = points.len();
        loop {
            if i == 0 {
                return (out, false);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < points[i].1.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Strategy validity: a simplex over actions per state (memoryless), or
/// non-negative numerators and denominators at least `ε` on the simplex
/// (distributional).
pub fn gen_strategy_validity(st: &StrategyTemplate, mdp: &Mdp) -> Vec<Constraint> {
    let n = mdp.num_states();
    match st {
        StrategyTemplate::Fixed(_) => Vec::new(),
        StrategyTemplate::Memoryless { prob } => (0..n)
            .map(|s| {
                let mut relations = Vec::new();
                let mut total = Poly::zero();
                for &a in mdp.available(s) {
                    let p = Poly::tvar(prob[&(s, a)]);
                    relations.push((p.clone(), Rel::Ge));
                    total = total + p;
                }
                relations.push((total - Poly::one(), Rel::Eq));
                Constraint::Exists(ExistsConstraint {
                    label: format!("strategy_s{s}"),
                    relations,
                })
            })
            .collect(),
        StrategyTemplate::Distributional {
            numerators,
            eps_den,
        } => {
            let mut out = Vec::new();
            for s in 0..n {
                let acts = mdp.available(s);
                let mut den = Poly::zero();
                for &a in acts {
                    let num = numerators[&(s, a)].poly();
                    den = den + num.clone();
                    if acts.len() > 1 {
                        out.push(Constraint::Forall(ForallConstraint {
                            label: format!("strategy_s{s}_a{a}"),
                            premise: simplex_premise(n),
                            conclusion: vec![num],
                        }));
                    }
                }
                out.push(Constraint::Forall(ForallConstraint {
                    label: format!("strategy_s{s}_den"),
                    premise: simplex_premise(n),
                    conclusion: vec![den - Poly::constant(eps_den.clone())],
                }));
            }
            out
        }
    }
}

/// Whether a template-free affine premise has a solution.
pub fn premise_feasible(premise: &[Poly], n: usize) -> Result<bool> {
    let mut rows = Vec::with_capacity(premise.len());
    for p in premise {
        if p.has_template_vars() {
            return Err(Error::TemplatePremise);
        }
        let (coeffs, offset) = p.to_affine(n).ok_or(Error::TemplatePremise)?;
        rows.push(LinRow::ge(coeffs, offset));
    }
    Ok(lp::is_feasible(n, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fixtures::{b_atom, gf_nba};
    use crate::logic::satisfiable_letters;
    use crate::mdp::fixtures::*;
    use crate::rational::{int, rat};
    use crate::templates::{make_cert_template, make_strategy_template, symbolic_step, StrategyClass};

    fn third_point() -> InitRegion {
        InitRegion::point(vec![rat(1, 3); 3])
    }

    #[test]
    fn singleton_init_as_equality_pairs() {
        let mut pool = VarPool::new();
        let t = make_cert_template(&mut pool, 2, 3, 1);
        let cs = gen_initial(&mut pool, InitMode::Universal, &third_point(), &t, 0, 3).unwrap();
        assert_eq!(cs.len(), 1);
        let Constraint::Forall(c) = &cs[0] else { panic!() };
        assert_eq!(c.premise.len(), 5 + 6);
        assert_eq!(c.conclusion.len(), 2);
        let whole = gen_initial(&mut pool, InitMode::Universal, &InitRegion::whole_simplex(), &t, 0, 3)
            .unwrap();
        let Constraint::Forall(c) = &whole[0] else { panic!() };
        assert_eq!(c.premise, simplex_premise(3));
    }

    #[test]
    fn existential_init_introduces_point_vars() {
        let mut pool = VarPool::new();
        let t = make_cert_template(&mut pool, 2, 3, 1);
        let before = pool.len();
        let cs = gen_initial(
            &mut pool,
            InitMode::Existential,
            &InitRegion::whole_simplex(),
            &t,
            0,
            3,
        )
        .unwrap();
        assert_eq!(pool.len(), before + 3);
        let Constraint::Exists(c) = &cs[0] else { panic!() };
        assert_eq!(c.relations.len(), 5 + 2);
        assert!(c.relations.iter().all(|(p, _)| !p.has_mu_vars()));
    }

    #[test]
    fn empty_init_rejected() {
        let mut pool = VarPool::new();
        let t = make_cert_template(&mut pool, 1, 2, 1);
        let init = InitRegion {
            rows: vec![LinRow::ge(vec![int(1), int(1)], int(-3))],
            points: vec![],
        };
        assert_eq!(
            gen_initial(&mut pool, InitMode::Universal, &init, &t, 0, 2),
            Err(Error::EmptyInitRegion)
        );
    }

    #[test]
    fn buchi_rows_per_location_kind() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let mut pool = VarPool::new();
        let t = make_cert_template(&mut pool, 2, 3, 1);
        let step = symbolic_step(&mdp, &StrategyTemplate::Fixed(b_at_a(&mdp)));
        let c = gen_buchi(&nba, 0, Letter(1), Some(1), &t, &step, PremiseMode::Full, 3);
        assert_eq!(c.conclusion.len(), 3);
        assert_eq!(c.premise.len(), 5 + 1 + 2);
        let c = gen_buchi(&nba, 1, Letter(0), Some(0), &t, &step, PremiseMode::Full, 3);
        assert_eq!(c.conclusion.len(), 2);
        let c = gen_buchi(&nba, 1, Letter(0), Some(0), &t, &step, PremiseMode::Minimal, 3);
        assert_eq!(c.premise.len(), 5 + 1);
        let c = gen_buchi(&nba, 0, Letter(0), None, &t, &step, PremiseMode::Minimal, 3);
        assert_eq!(c.conclusion, vec![Poly::constant(int(-1))]);
        assert_eq!(c.premise.len(), 5 + 1 + 2);
    }

    #[test]
    fn buchi_constraint_count_for_running_example() {
        let nba = gf_nba(b_atom());
        let letters = satisfiable_letters(nba.ap(), 3, 10).unwrap();
        let locs = reachable_locations(&nba, &letters);
        assert_eq!(branch_points(&nba, &locs, &letters).len(), 4);
    }

    #[test]
    fn choice_enumeration() {
        let nba = gf_nba(b_atom());
        let letters = vec![Letter(0), Letter(1)];
        let (c, cut) = enumerate_choices(&nba, &[0, 1], &letters, DEFAULT_CHOICE_BUDGET);
        assert_eq!(c.len(), 1);
        assert!(!cut);
        let fg = crate::patterns::parse_ltl_pattern(
            "F G p",
            &[("p".into(), b_atom())],
        )
        .unwrap();
        let (c, _) = enumerate_choices(&fg, &[0, 1], &letters, DEFAULT_CHOICE_BUDGET);
        // q0 branches on {p} only
        assert_eq!(c.len(), 2);
        assert_eq!(c[0][&(0, Letter(1))], 0);
        assert_eq!(c[1][&(0, Letter(1))], 1);
        let (c, cut) = enumerate_choices(&fg, &[0, 1], &letters, 1);
        assert_eq!(c.len(), 1);
        assert!(cut);
    }

    #[test]
    fn memoryless_validity() {
        let mdp = running_example();
        let mut pool = VarPool::new();
        let st = make_strategy_template(&mut pool, &mdp, StrategyClass::Memoryless, None).unwrap();
        let cs = gen_strategy_validity(&st, &mdp);
        assert_eq!(cs.len(), 3);
        let Constraint::Exists(a) = &cs[0] else { panic!() };
        assert_eq!(a.relations.len(), 3);
        let Constraint::Exists(b) = &cs[1] else { panic!() };
        assert_eq!(b.relations.len(), 2);
        assert_eq!(b.relations[1].1, Rel::Eq);
    }

    #[test]
    fn distributional_validity_counts() {
        let mdp = running_example();
        let mut pool = VarPool::new();
        let st =
            make_strategy_template(&mut pool, &mdp, StrategyClass::Distributional, None).unwrap();
        let cs = gen_strategy_validity(&st, &mdp);
        let at_a = cs.iter().filter(|c| c.label().starts_with("strategy_s0")).count();
        let at_b = cs.iter().filter(|c| c.label().starts_with("strategy_s1")).count();
        assert_eq!((at_a, at_b), (3, 1));
    }

    #[test]
    fn premise_feasibility() {
        let mut p = simplex_premise(3);
        assert!(premise_feasible(&p, 3).unwrap());
        let mut q = p.clone();
        q.push(Poly::affine(&[int(0), int(1), int(0)], &rat(-249, 1000)));
        q.push(Poly::affine(&[int(0), int(-1), int(0)], &rat(1, 5)));
        assert!(!premise_feasible(&q, 3).unwrap());
        p.extend(rows_premise(&third_point().pieces()[0]));
        assert!(premise_feasible(&p, 3).unwrap());
        p.push(Poly::tvar(0));
        assert_eq!(premise_feasible(&p, 3), Err(Error::TemplatePremise));
    }
}
