//! Independent validation of concrete certificates and a simulation-side
//! monitor.
//!
//! Affine conditions are decided exactly by minimizing each conclusion row
//! over its premise polytope. Conditions that are polynomial in `μ`
//! (distributional strategies) go to an optional [`NonlinearOracle`] and
//! otherwise to a sampled check.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{reachable_locations, InitMode, InitRegion};
use crate::error::{Error, Result};
use crate::logic::{guard_of, letter_of, satisfiable_letters, simplex_constraints, Letter, Nba, DEFAULT_AP_CAP};
use crate::lp::{self, Constraint as LinRow, LpOutcome};
use crate::mdp::{step, AffineRow, Distribution, Mdp, Strategy};
use crate::poly::Poly;
use crate::rational::Rational;
use crate::solution::CertificateSolution;
use crate::templates::{symbolic_step, StrategyTemplate};

/// Answer of an external decision procedure for
/// `∀μ. premise ≥ 0 ⇒ conclusion ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Holds,
    Violated(Vec<Rational>),
    Unknown,
}

/// Decides polynomial implications over linear premises.
pub trait NonlinearOracle {
    fn decide(&self, n: usize, premise: &[LinRow], conclusion: &Poly) -> OracleAnswer;
}

/// Sampling used when no oracle decides a polynomial condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    pub grid_denominator: u32,
    pub random_points: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            grid_denominator: 20,
            random_points: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    /// Decided exactly.
    Proved,
    /// No violation among the sampled points.
    Sampled,
    /// Premise is empty on the simplex.
    Vacuous,
    Failed,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Proved => "proved",
            CheckStatus::Sampled => "sampled",
            CheckStatus::Vacuous => "vacuous",
            CheckStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub label: String,
    pub status: CheckStatus,
    /// Successor location that discharged a ranking condition.
    pub successor: Option<usize>,
    /// Whether the recorded successor choice was the one that passed.
    pub matches_choice: Option<bool>,
    /// A distribution violating the condition.
    pub witness: Option<Vec<Rational>>,
    pub detail: String,
}

impl CheckOutcome {
    fn new(label: String, status: CheckStatus) -> Self {
        Self {
            label,
            status,
            successor: None,
            matches_choice: None,
            witness: None,
            detail: String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Validated,
    ValidatedSampled,
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Validated => "validated",
            Verdict::ValidatedSampled => "validated (sampled)",
            Verdict::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
    /// Letters realizable under strict semantics; ranking conditions are
    /// checked on their closed guards.
    pub strict_letters: Vec<Letter>,
}

impl ValidationReport {
    pub fn verdict(&self) -> Verdict {
        if self.checks.iter().any(|c| c.status == CheckStatus::Failed) {
            Verdict::Rejected
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Sampled) {
            Verdict::ValidatedSampled
        } else {
            Verdict::Validated
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Failed)
    }
}

fn row_constraint(r: &AffineRow) -> LinRow {
    LinRow::ge(r.coeffs.clone(), r.offset.clone())
}

/// `Some(witness)` when `row` is negative somewhere on the premise.
fn violation(n: usize, premise: &[LinRow], row: &AffineRow) -> Option<Vec<Rational>> {
    match lp::minimize(n, &row.coeffs, &row.offset, premise) {
        LpOutcome::Optimal { value, point } if value.is_negative() => Some(point),
        LpOutcome::Unbounded => lp::feasible_point(n, premise),
        _ => None,
    }
}

/// The transformer matrix of a memoryless strategy: `(Mμ)_i = Σ_j m[i][j]·μ_j`.
fn linear_map(mdp: &Mdp, strategy: &Strategy) -> Option<Vec<Vec<Rational>>> {
    let Strategy::Memoryless(m) = strategy else {
        return None;
    };
    let n = mdp.num_states();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for (&(j, a), p) in m.entries() {
        let row = mdp.row(j, a).expect("validated strategy");
        for (i, pr) in row.iter().enumerate() {
            if !pr.is_zero() {
                out[i][j] += p * pr;
            }
        }
    }
    Some(out)
}

/// `row ∘ M` as an affine row.
fn compose(row: &AffineRow, m: &[Vec<Rational>]) -> AffineRow {
    let n = row.coeffs.len();
    let coeffs = (0..n)
        .map(|j| {
            row.coeffs
                .iter()
                .enumerate()
                .map(|(i, r)| r * &m[i][j])
                .sum()
        })
        .collect();
    AffineRow {
        coeffs,
        offset: row.offset.clone(),
    }
}

fn sub_rows(a: &AffineRow, b: &AffineRow, k: &Rational) -> AffineRow {
    AffineRow {
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        offset: &a.offset - &b.offset + k,
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Points of the premise polytope used by the sampled check: a rational
/// grid, seeded random points, and LP vertices.
fn sample_points(n: usize, premise: &[LinRow], cfg: &SampleConfig) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let den = BigInt::from(cfg.grid_denominator.max(1));
    for c in compositions(cfg.grid_denominator.max(1), n) {
        out.push(
            c.into_iter()
                .map(|k| Rational::new(BigInt::from(k), den.clone()))
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_points {
        let ks: Vec<u64> = (0..n).map(|_| rng.next_u64() % 1001).collect();
        let total: u64 = ks.iter().sum();
        if total == 0 {
            continue;
        }
        out.push(
            ks.into_iter()
                .map(|k| Rational::new(BigInt::from(k), BigInt::from(total)))
                .collect(),
        );
    }
    for i in 0..n {
        for sign in [1i64, -1] {
            let mut obj = vec![Rational::zero(); n];
            obj[i] = Rational::from_integer(BigInt::from(sign));
            if let LpOutcome::Optimal { point, .. } = lp::minimize(n, &obj, &Rational::zero(), premise) {
                out.push(point);
            }
        }
    }
    out.retain(|p| premise.iter().all(|c| c.holds(p)));
    out
}

/// Rows required at `(q, μ)` for successor `q2`, as functions evaluated at
/// concrete `μ` and `μ′`.
fn sampled_violation(
    mdp: &Mdp,
    sol: &CertificateSolution,
    accepting: bool,
    q: usize,
    q2: usize,
    points: &[Vec<Rational>],
) -> Result<Option<Vec<Rational>>> {
    for p in points {
        let mu = Distribution::new(p.clone())?;
        let next = step(mdp, &sol.strategy, &mu)?;
        let rows = sol.location_rows(q2);
        let bad = rows.iter().any(|r| r.eval(next.mass()).is_negative())
            || (!accepting
                && (sol.ranking[q].eval(p) - Rational::one() - sol.ranking[q2].eval(next.mass()))
                    .is_negative());
        if bad {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

fn affine_poly(r: &AffineRow, images: &[Poly], den: &Poly) -> Poly {
    let mut p = den.scale(&r.offset);
    for (c, img) in r.coeffs.iter().zip(images) {
        p = p + img.scale(c);
    }
    p
}

/// Checks the initial and ranking conditions of a concrete certificate.
pub fn check_certificate(
    sol: &CertificateSolution,
    mdp: &Mdp,
    nba: &Nba,
    init: &InitRegion,
    mode: InitMode,
    oracle: Option<&dyn NonlinearOracle>,
    sampling: &SampleConfig,
) -> Result<ValidationReport> {
    let n = mdp.num_states();
    sol.check_dimensions(nba.num_states(), n)?;
    init.validate(n)?;
    let mut checks = Vec::new();
    checks.push(strategy_check(sol, mdp));
    checks.extend(initial_checks(sol, nba.initial(), init, mode, n));

    let letters = satisfiable_letters(nba.ap(), n, DEFAULT_AP_CAP)?;
    let linear = linear_map(mdp, &sol.strategy);
    let poly_step = if linear.is_none() {
        Some(symbolic_step(mdp, &StrategyTemplate::Fixed(sol.strategy.clone())))
    } else {
        None
    };
    for q in reachable_locations(nba, &letters) {
        for &l in &letters {
            let label = format!("buchi_q{q}_l{}", l.0);
            let mut premise = simplex_constraints(n);
            premise.extend(guard_of(l, nba.ap()).iter().map(|a| a.to_constraint()));
            premise.extend(sol.location_rows(q).into_iter().map(row_constraint));
            let Some(feasible) = lp::feasible_point(n, &premise) else {
                checks.push(CheckOutcome::new(label, CheckStatus::Vacuous));
                continue;
            };
            let succ = nba.delta(q, l);
            if succ.is_empty() {
                let mut c = CheckOutcome::new(label, CheckStatus::Failed);
                c.witness = Some(feasible);
                c.detail = "no automaton successor, but the premise is non-empty".into();
                checks.push(c);
                continue;
            }
            let recorded = sol.choice.get(&(q, l)).copied();
            let mut order: Vec<usize> = recorded.into_iter().filter(|r| succ.contains(r)).collect();
            order.extend(succ.iter().copied().filter(|s| Some(*s) != recorded));
            let accepting = nba.is_accepting(q);
            let mut first_witness = None;
            let mut passed = None;
            for &q2 in &order {
                let (status, witness) = match &linear {
                    Some(m) => {
                        let mut rows: Vec<AffineRow> =
                            sol.location_rows(q2).into_iter().map(|r| compose(r, m)).collect();
                        if !accepting {
                            let next_rank = rows[0].clone();
                            rows.push(sub_rows(&sol.ranking[q], &next_rank, &-Rational::one()));
                        }
                        let w = rows.iter().find_map(|r| violation(n, &premise, r));
                        (CheckStatus::Proved, w)
                    }
                    None => {
                        let st = poly_step.as_ref().expect("nonlinear step");
                        decide_nonlinear(mdp, sol, st, accepting, q, q2, &premise, oracle, sampling)?
                    }
                };
                match witness {
                    None => {
                        passed = Some((q2, status));
                        break;
                    }
                    Some(w) => {
                        first_witness.get_or_insert(w);
                    }
                }
            }
            let mut c = match passed {
                Some((q2, status)) => {
                    let mut c = CheckOutcome::new(label, status);
                    c.successor = Some(q2);
                    c.matches_choice = recorded.map(|r| r == q2);
                    c
                }
                None => {
                    let mut c = CheckOutcome::new(label, CheckStatus::Failed);
                    c.witness = first_witness;
                    c.detail = "no successor satisfies the ranking condition".into();
                    c
                }
            };
            if c.status != CheckStatus::Failed && c.matches_choice == Some(false) {
                c.detail = "passed with a successor other than the recorded one".into();
            }
            checks.push(c);
        }
    }
    Ok(ValidationReport {
        checks,
        strict_letters: letters,
    })
}

#[allow(clippy::too_many_arguments)]
fn decide_nonlinear(
    mdp: &Mdp,
    sol: &CertificateSolution,
    st: &crate::templates::SymbolicStep,
    accepting: bool,
    q: usize,
    q2: usize,
    premise: &[LinRow],
    oracle: Option<&dyn NonlinearOracle>,
    sampling: &SampleConfig,
) -> Result<(CheckStatus, Option<Vec<Rational>>)> {
    let n = mdp.num_states();
    if let Some(o) = oracle {
        let mut conclusions: Vec<Poly> = sol
            .location_rows(q2)
            .into_iter()
            .map(|r| affine_poly(r, &st.images, &st.denominator))
            .collect();
        if !accepting {
            let own = Poly::affine(&sol.ranking[q].coeffs, &sol.ranking[q].offset);
            let d = (own - Poly::one()) * st.denominator.clone() - conclusions[0].clone();
            conclusions.push(d);
        }
        let mut all_hold = true;
        for c in &conclusions {
            match o.decide(n, premise, c) {
                OracleAnswer::Holds => {}
                OracleAnswer::Violated(w) => return Ok((CheckStatus::Proved, Some(w))),
                OracleAnswer::Unknown => all_hold = false,
            }
        }
        if all_hold {
            return Ok((CheckStatus::Proved, None));
        }
    }
    let points = sample_points(n, premise, sampling);
    let w = sampled_violation(mdp, sol, accepting, q, q2, &points)?;
    Ok((CheckStatus::Sampled, w))
}

fn strategy_check(sol: &CertificateSolution, mdp: &Mdp) -> CheckOutcome {
    let ok = match &sol.strategy {
        Strategy::Memoryless(m) => crate::mdp::MemorylessStrategy::new(mdp, m.entries().clone()).is_ok(),
        Strategy::AffineDist(d) => {
            crate::mdp::AffineDistStrategy::new(mdp, d.numerators().clone(), d.eps_den().clone()).is_ok()
        }
    };
    let status = if ok {
        CheckStatus::Proved
    } else {
        CheckStatus::Failed
    };
    CheckOutcome::new("strategy".into(), status)
}

fn initial_checks(
    sol: &CertificateSolution,
    q0: usize,
    init: &InitRegion,
    mode: InitMode,
    n: usize,
) -> Vec<CheckOutcome> {
    let rows = sol.location_rows(q0);
    match mode {
        InitMode::Universal => {
            let pieces = init.pieces();
            let single = pieces.len() == 1;
            pieces
                .into_iter()
                .enumerate()
                .map(|(k, piece)| {
                    let label = if single {
                        "init".into()
                    } else {
                        format!("init_p{k}")
                    };
                    let mut premise = simplex_constraints(n);
                    premise.extend(piece);
                    match rows.iter().find_map(|r| violation(n, &premise, r)) {
                        None => CheckOutcome::new(label, CheckStatus::Proved),
                        Some(w) => {
                            let mut c = CheckOutcome::new(label, CheckStatus::Failed);
                            c.witness = Some(w);
                            c.detail = "certificate row negative on the initial region".into();
                            c
                        }
                    }
                })
                .collect()
        }
        InitMode::Existential => {
            let found = if init.points.is_empty() {
                let mut premise = simplex_constraints(n);
                premise.extend(init.rows.iter().cloned());
                premise.extend(rows.iter().map(|r| row_constraint(r)));
                lp::feasible_point(n, &premise)
            } else {
                init.points
                    .iter()
                    .find(|p| rows.iter().all(|r| !r.eval(p).is_negative()))
                    .cloned()
            };
            let mut c = CheckOutcome::new(
                "init".into(),
                if found.is_some() {
                    CheckStatus::Proved
                } else {
                    CheckStatus::Failed
                },
            );
            match found {
                Some(p) => {
                    c.detail = format!("satisfied at {}", crate::rational::format_vector(&p));
                }
                None => c.detail = "no initial distribution satisfies the certificate rows".into(),
            }
            vec![c]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorVerdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl MonitorVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MonitorVerdict::Consistent => "consistent",
            MonitorVerdict::Inconsistent => "inconsistent",
            MonitorVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorReport {
    /// `letter_of(μ_i)` for `i = 0..=steps`.
    pub letters: Vec<Letter>,
    /// Steps after which some accepting automaton state is reachable.
    pub accepting_steps: Vec<usize>,
    /// First step `i` with `‖μ_{i+1} − μ_i‖_∞ < tol`, if the run ended
    /// converged.
    pub converged_at: Option<usize>,
    pub limit_letter: Option<Letter>,
    /// First step at which the reachable automaton set became empty.
    pub empty_at: Option<usize>,
    pub verdict: MonitorVerdict,
    pub final_distribution: Distribution,
}

/// Default convergence tolerance, `10⁻⁹` in max norm.
pub fn default_tolerance() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}

/// Runs `steps` transformer steps from `mu0`, reading `letter_of(μ_i)` into
/// the automaton's subset run.
///
/// The verdict is `inconsistent` once the reachable set is empty. A run
/// whose letters settle (the trajectory converged, or the last letter held
/// for the second half of the run) is judged by whether the lasso with that
/// letter repeated forever is accepted. Anything else is `inconclusive`.
pub fn simulate_monitor(
    mdp: &Mdp,
    strategy: &Strategy,
    mu0: &Distribution,
    nba: &Nba,
    steps: usize,
    tol: &Rational,
) -> Result<MonitorReport> {
    if steps == 0 {
        return Err(Error::InvalidDistribution("monitor needs at least one step".into()));
    }
    let mut mu = mu0.clone();
    let mut current = BTreeSet::from([nba.initial()]);
    let mut letters = Vec::with_capacity(steps + 1);
    let mut accepting_steps = Vec::new();
    let mut converged_at: Option<usize> = None;
    let mut empty_at = None;
    for i in 0..=steps {
        let l = letter_of(nba.ap(), &mu)?;
        letters.push(l);
        current = nba.advance(&current, l);
        if current.is_empty() {
            empty_at = Some(i);
            break;
        }
        if current.iter().any(|&q| nba.is_accepting(q)) {
            accepting_steps.push(i);
        }
        if i == steps {
            break;
        }
        let next = step(mdp, strategy, &mu)?;
        if &next.max_diff(&mu) < tol {
            converged_at.get_or_insert(i);
        } else {
            converged_at = None;
        }
        mu = next;
    }
    let last = *letters.last().expect("at least one letter");
    let half = letters.len() / 2;
    let settled = converged_at.is_some() || letters[half..].iter().all(|&l| l == last);
    let verdict = if empty_at.is_some() {
        MonitorVerdict::Inconsistent
    } else if settled {
        if nba.accepts_lasso(&letters, &[last]) {
            MonitorVerdict::Consistent
        } else {
            MonitorVerdict::Inconsistent
        }
    } else {
        MonitorVerdict::Inconclusive
    };
    Ok(MonitorReport {
        limit_letter: converged_at.map(|_| last),
        letters,
        accepting_steps,
        converged_at,
        empty_at,
        verdict,
        final_distribution: mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::SuccessorChoice;
    use crate::logic::fixtures::{b_atom, gf_nba};
    use crate::logic::AffineAtom;
    use crate::mdp::fixtures::*;
    use crate::mdp::{AffineDistStrategy, MemorylessStrategy};
    use crate::patterns::parse_ltl_pattern;
    use crate::rational::{int, rat};
    use crate::solution::StrategyOrigin;
    use alloc::collections::BTreeMap;

    fn affine(c: &[i64], off: i64) -> AffineRow {
        AffineRow {
            coeffs: c.iter().map(|&x| int(x)).collect(),
            offset: int(off),
        }
    }

    fn zero_row() -> AffineRow {
        affine(&[0, 0, 0], 0)
    }

    fn third() -> InitRegion {
        InitRegion::point(vec![rat(1, 3); 3])
    }

    fn trivial_solution(strategy: Strategy, nq: usize) -> CertificateSolution {
        CertificateSolution {
            ranking: vec![zero_row(); nq],
            invariant: vec![vec![zero_row()]; nq],
            strategy,
            origin: StrategyOrigin::Given,
            choice: SuccessorChoice::new(),
        }
    }

    #[test]
    fn initial_value_at_uniform_point() {
        let r = affine(&[250, 0, 750], 1);
        assert_eq!(r.eval(&[rat(1, 3), rat(1, 3), rat(1, 3)]), rat(1003, 3));
    }

    #[test]
    fn negative_initial_value_fails_with_witness() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let mut sol = trivial_solution(b_at_a(&mdp), 2);
        sol.ranking[0] = affine(&[0, 0, 0], -1);
        let rep = check_certificate(
            &sol,
            &mdp,
            &nba,
            &third(),
            InitMode::Universal,
            None,
            &SampleConfig::default(),
        )
        .unwrap();
        let init = rep.checks.iter().find(|c| c.label == "init").unwrap();
        assert_eq!(init.status, CheckStatus::Failed);
        assert_eq!(init.witness.as_deref(), Some(&[rat(1, 3), rat(1, 3), rat(1, 3)][..]));
        assert_eq!(rep.verdict(), Verdict::Rejected);
    }

    #[test]
    fn tautology_safety_certificate_passes() {
        let mdp = running_example();
        let taut = AffineAtom::new(vec![int(1), int(1), int(1)], int(0));
        let nba = parse_ltl_pattern("G p", &[("p".into(), taut)]).unwrap();
        let sol = trivial_solution(b_at_a(&mdp), nba.num_states());
        let rep = check_certificate(
            &sol,
            &mdp,
            &nba,
            &third(),
            InitMode::Universal,
            None,
            &SampleConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict(), Verdict::Validated, "{rep:?}");
    }

    #[test]
    fn nonaccepting_location_needs_decrease() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let sol = trivial_solution(b_at_a(&mdp), 2);
        let rep = check_certificate(
            &sol,
            &mdp,
            &nba,
            &third(),
            InitMode::Universal,
            None,
            &SampleConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict(), Verdict::Rejected);
        assert!(rep.failures().all(|c| c.label.starts_with("buchi_q")));
    }

    #[test]
    fn existential_init_finds_a_point() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let mut sol = trivial_solution(b_at_a(&mdp), 2);
        sol.ranking[0] = affine(&[1, 0, 0], 0);
        sol.ranking[0].offset = rat(-1, 2);
        let init = InitRegion {
            rows: Vec::new(),
            points: vec![vec![int(0), int(1), int(0)], vec![int(1), int(0), int(0)]],
        };
        let checks = initial_checks(&sol, 0, &init, InitMode::Existential, 3);
        assert_eq!(checks[0].status, CheckStatus::Proved);
        let checks = initial_checks(&sol, 0, &init, InitMode::Universal, 3);
        assert_eq!(checks.len(), 2);
        assert_eq!(checks[0].status, CheckStatus::Failed);
        let _ = nba;
    }

    #[test]
    fn monitor_running_example_consistent() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let mu0 = dist(&[(1, 3), (1, 3), (1, 3)]);
        let rep = simulate_monitor(&mdp, &b_at_a(&mdp), &mu0, &nba, 200, &default_tolerance()).unwrap();
        assert_eq!(rep.verdict, MonitorVerdict::Consistent);
        assert!(rep.converged_at.is_some());
        let target = [rat(1, 4), rat(1, 4), rat(1, 2)];
        let diff = rep
            .final_distribution
            .mass()
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap();
        assert!(diff < rat(1, 1_000_000));
        let mut mu = mu0.clone();
        for (i, l) in rep.letters.iter().enumerate() {
            assert_eq!(*l, letter_of(nba.ap(), &mu).unwrap(), "step {i}");
            mu = step(&mdp, &b_at_a(&mdp), &mu).unwrap();
        }
    }

    #[test]
    fn monitor_stay_strategy_inconsistent() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let stay: Strategy = MemorylessStrategy::deterministic(&mdp, &[0, 0, 0]).unwrap().into();
        let mu0 = dist(&[(1, 3), (1, 3), (1, 3)]);
        let rep = simulate_monitor(&mdp, &stay, &mu0, &nba, 200, &default_tolerance()).unwrap();
        assert_eq!(rep.verdict, MonitorVerdict::Inconsistent);
    }

    #[test]
    fn monitor_safety_fails_immediately() {
        let mdp = running_example();
        let p = AffineAtom::new(vec![int(0), int(1), int(0)], rat(-9, 10));
        let nba = parse_ltl_pattern("G p", &[("p".into(), p)]).unwrap();
        let mu0 = dist(&[(1, 3), (1, 3), (1, 3)]);
        let rep = simulate_monitor(&mdp, &b_at_a(&mdp), &mu0, &nba, 200, &default_tolerance()).unwrap();
        assert_eq!(rep.verdict, MonitorVerdict::Inconsistent);
        assert_eq!(rep.empty_at, Some(0));
    }

    #[test]
    fn monitor_tautology_consistent() {
        let mdp = running_example();
        let taut = AffineAtom::new(vec![int(0), int(0), int(0)], int(0));
        let nba = parse_ltl_pattern("G p", &[("p".into(), taut)]).unwrap();
        let mu0 = dist(&[(1, 1), (0, 1), (0, 1)]);
        for choice in [[0, 0, 0], [1, 0, 0]] {
            let st: Strategy = MemorylessStrategy::deterministic(&mdp, &choice).unwrap().into();
            let rep = simulate_monitor(&mdp, &st, &mu0, &nba, 20, &default_tolerance()).unwrap();
            assert_eq!(rep.verdict, MonitorVerdict::Consistent);
        }
    }

    #[test]
    fn distributional_conditions_are_sampled() {
        let mdp = running_example();
        let taut = AffineAtom::new(vec![int(0), int(0), int(0)], int(0));
        let nba = parse_ltl_pattern("G p", &[("p".into(), taut)]).unwrap();
        let numerators = BTreeMap::from([
            ((0, 0), affine(&[1, 0, 0], 0)),
            ((0, 1), affine(&[0, 1, 1], 0)),
            ((1, 0), affine(&[0, 0, 0], 1)),
            ((2, 0), affine(&[0, 0, 0], 1)),
        ]);
        let st = AffineDistStrategy::new(&mdp, numerators, rat(1, 1000)).unwrap();
        let sol = trivial_solution(st.into(), nba.num_states());
        let cfg = SampleConfig {
            random_points: 200,
            ..SampleConfig::default()
        };
        let rep = check_certificate(&sol, &mdp, &nba, &third(), InitMode::Universal, None, &cfg).unwrap();
        assert_eq!(rep.verdict(), Verdict::ValidatedSampled);
    }

    #[test]
    fn grid_size() {
        assert_eq!(compositions(20, 3).len(), 231);
    }
}
