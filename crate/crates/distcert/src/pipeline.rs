//! Verification and synthesis: encode, solve, extract and validate, over
//! successor choices and premise modes until a validated certificate
//! appears.

use std::time::{Duration, Instant};
use std::collections::BTreeSet;

use distcert_core::constraints::{InitMode, PremiseMode, SuccessorChoice};
use distcert_core::encode::{choices, encode, Counts, EncodeOptions, Problem, StrategySpec};
use distcert_core::heuristics::candidate_strategies;
use distcert_core::logic::letter_of;
use distcert_core::mdp::{Distribution, Strategy};
use distcert_core::smtlib::{emit_smtlib, model_by_id, SolverStatus};
use distcert_core::solution::{extract_solution, CertificateSolution, StrategyOrigin};
use distcert_core::templates::StrategyClass;
use distcert_core::validate::{
    check_certificate, default_tolerance, simulate_monitor, NonlinearOracle, SampleConfig, ValidationReport, Verdict,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::oracle::SmtOracle;
use crate::solver::invoke_solver;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);
pub const DEFAULT_CANDIDATES: usize = 8;
/// Steps a fixed strategy is simulated for when looking for a refutation.
pub const REFUTATION_STEPS: usize = 50;

/// Which synthesis stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    /// Deterministic candidate strategies first, then templates.
    Auto,
    /// Strategy templates only.
    Template,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub solver: String,
    /// Per solver invocation.
    pub timeout: Duration,
    pub encode: EncodeOptions,
    /// Premise modes to try in order; the encode option's mode is ignored.
    pub modes: Vec<PremiseMode>,
    pub search: Search,
    pub candidates: usize,
    pub sampling: SampleConfig,
}

impl PipelineConfig {
    pub fn new(solver: String) -> Self {
        Self {
            solver,
            timeout: DEFAULT_TIMEOUT,
            encode: EncodeOptions::default(),
            modes: vec![PremiseMode::Minimal, PremiseMode::Full],
            search: Search::Auto,
            candidates: DEFAULT_CANDIDATES,
            sampling: SampleConfig::default(),
        }
    }
}

pub fn mode_name(m: PremiseMode) -> &'static str {
    match m {
        PremiseMode::Minimal => "minimal",
        PremiseMode::Full => "full",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct CountsReport {
    pub template_vars: usize,
    pub strategy_vars: usize,
    pub multipliers: usize,
    pub forall_constraints: usize,
    pub exists_constraints: usize,
    pub relations: usize,
    pub discharged: usize,
    pub system_vars: usize,
}

impl From<Counts> for CountsReport {
    fn from(c: Counts) -> Self {
        Self {
            template_vars: c.template_vars,
            strategy_vars: c.strategy_vars,
            multipliers: c.multipliers,
            forall_constraints: c.forall_constraints,
            exists_constraints: c.exists_constraints,
            relations: c.relations,
            discharged: c.discharged,
            system_vars: c.system_vars,
        }
    }
}

/// One solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    /// `template`, or `candidate` for a fixed deterministic strategy.
    pub stage: String,
    pub candidate: Option<usize>,
    pub premise_mode: String,
    pub choice: usize,
    pub status: String,
    pub verdict: Option<String>,
    pub detail: Option<String>,
    pub counts: CountsReport,
    pub smt_sha256: String,
    pub smt_bytes: usize,
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub validate_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub solution: Option<CertificateSolution>,
    pub validation: Option<ValidationReport>,
    pub attempts: Vec<Attempt>,
    /// Why no certificate exists, when the automaton run dies on an
    /// initial trajectory.
    pub refutation: Option<String>,
    pub choices: usize,
    pub budget_cut: bool,
    /// Counts of the primary template formulation, for reporting.
    pub counts: CountsReport,
    pub total: Duration,
}

impl Outcome {
    pub fn solved(&self) -> bool {
        self.solution.is_some()
    }
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn sha256(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The SMT-LIB2 text for one choice and premise mode.
pub fn emit(problem: &Problem, choice: &SuccessorChoice, opts: &EncodeOptions) -> Result<String> {
    let e = encode(problem, choice, opts)?;
    Ok(emit_smtlib(&e.system, &e.pool))
}

fn oracle_for<'a>(strategy: &Strategy, o: &'a SmtOracle) -> Option<&'a dyn NonlinearOracle> {
    match strategy {
        Strategy::AffineDist(_) => Some(o),
        Strategy::Memoryless(_) => None,
    }
}

/// Validates `sol` against `problem`, deciding polynomial conditions with
/// the configured solver.
pub fn validate(sol: &CertificateSolution, problem: &Problem, cfg: &PipelineConfig) -> Result<ValidationReport> {
    let oracle = SmtOracle {
        cmd: cfg.solver.clone(),
        timeout: cfg.timeout,
    };
    Ok(check_certificate(
        sol,
        &problem.mdp,
        &problem.nba,
        &problem.init,
        problem.mode,
        oracle_for(&sol.strategy, &oracle),
        &cfg.sampling,
    )?)
}

struct Found {
    solution: CertificateSolution,
    validation: ValidationReport,
}

fn attempt(
    problem: &Problem,
    choice: (usize, &SuccessorChoice),
    mode: PremiseMode,
    stage: (&str, Option<usize>),
    cfg: &PipelineConfig,
    log: &mut Vec<Attempt>,
) -> Result<Option<Found>> {
    let t0 = Instant::now();
    let opts = EncodeOptions {
        premise_mode: mode,
        ..cfg.encode.clone()
    };
    let enc = encode(problem, choice.1, &opts)?;
    let text = emit_smtlib(&enc.system, &enc.pool);
    let names: Vec<String> = enc.system.vars().iter().map(|&v| enc.pool.name(v).to_string()).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let encode_time = t0.elapsed();
    let mut rec = Attempt {
        stage: stage.0.into(),
        candidate: stage.1,
        premise_mode: mode_name(mode).into(),
        choice: choice.0,
        status: String::new(),
        verdict: None,
        detail: None,
        counts: enc.counts.into(),
        smt_sha256: sha256(&text),
        smt_bytes: text.len(),
        encode_ms: ms(encode_time),
        solve_ms: 0.0,
        validate_ms: 0.0,
    };
    let t1 = Instant::now();
    let outcome = invoke_solver(&text, &cfg.solver, cfg.timeout, &vars);
    rec.solve_ms = ms(t1.elapsed());
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            rec.status = SolverStatus::SolverError.as_str().into();
            rec.detail = Some(e.to_string());
            log.push(rec);
            return Ok(None);
        }
    };
    rec.status = outcome.status.as_str().into();
    if outcome.status == SolverStatus::SolverError {
        rec.detail = Some(outcome.raw.lines().take(3).collect::<Vec<_>>().join(" "));
    }
    let Some(model) = outcome.model else {
        log.push(rec);
        return Ok(None);
    };
    let t2 = Instant::now();
    let sol = extract_solution(&model_by_id(&enc.pool, &model), &problem.mdp, &enc.cert, &enc.strategy, &enc.choice)?;
    let report = validate(&sol, problem, cfg)?;
    rec.validate_ms = ms(t2.elapsed());
    let verdict = report.verdict();
    rec.verdict = Some(verdict.as_str().into());
    if verdict == Verdict::Rejected {
        let labels: Vec<&str> = report.failures().map(|c| c.label.as_str()).collect();
        rec.detail = Some(format!("failed checks: {}", labels.join(", ")));
        log.push(rec);
        return Ok(None);
    }
    log.push(rec);
    Ok(Some(Found {
        solution: sol,
        validation: report,
    }))
}

/// Step at which the automaton run from `point` has no state left: under
/// the fixed strategy within `steps` steps, or at step 0 for any strategy.
fn dead_run(problem: &Problem, point: &[distcert_core::Rational], steps: usize) -> Result<Option<usize>> {
    let mu0 = Distribution::new(point.to_vec())?;
    match &problem.strategy {
        StrategySpec::Given(s) => {
            let r = simulate_monitor(&problem.mdp, s, &mu0, &problem.nba, steps, &default_tolerance())?;
            Ok(r.empty_at)
        }
        StrategySpec::Template { .. } => {
            let l = letter_of(problem.nba.ap(), &mu0)?;
            let start = BTreeSet::from([problem.nba.initial()]);
            Ok(problem.nba.advance(&start, l).is_empty().then_some(0))
        }
    }
}

/// A proof that the specification fails, from the initial points alone.
pub fn refute(problem: &Problem, steps: usize) -> Result<Option<String>> {
    let init = &problem.init;
    if !init.rows.is_empty() || init.points.is_empty() {
        return Ok(None);
    }
    let mut dead = Vec::new();
    for (k, p) in init.points.iter().enumerate() {
        dead.push(dead_run(problem, p, steps)?.map(|i| (k, i)));
    }
    let describe = |(k, i): (usize, usize)| format!("automaton run from initial point {k} is empty at step {i}");
    Ok(match problem.mode {
        InitMode::Universal => dead.into_iter().flatten().next().map(describe),
        InitMode::Existential => {
            if dead.iter().all(Option::is_some) {
                dead.into_iter().flatten().next().map(describe)
            } else {
                None
            }
        }
    })
}

/// Runs the stages in order and stops at the first validated certificate.
pub fn run(problem: &Problem, cfg: &PipelineConfig) -> Result<Outcome> {
    let start = Instant::now();
    let refutation = refute(problem, REFUTATION_STEPS)?;
    let (cs, budget_cut) = choices(problem, &cfg.encode)?;
    let first = cs.first().cloned().unwrap_or_default();
    let primary_mode = *cfg.modes.last().unwrap_or(&PremiseMode::Full);
    let counts = encode(
        problem,
        &first,
        &EncodeOptions {
            premise_mode: primary_mode,
            ..cfg.encode.clone()
        },
    )?
    .counts
    .into();
    let mut log = Vec::new();
    let mut found = None;
    if refutation.is_some() {
        return Ok(Outcome {
            solution: None,
            validation: None,
            attempts: log,
            refutation,
            choices: cs.len(),
            budget_cut,
            counts,
            total: start.elapsed(),
        });
    }

    if let StrategySpec::Template {
        class: StrategyClass::Memoryless,
        ..
    } = &problem.strategy
    {
        if cfg.search == Search::Auto {
            let cands = candidate_strategies(&problem.mdp, problem.nba.ap(), cfg.candidates);
            'cands: for (k, s) in cands.into_iter().enumerate() {
                let sub = Problem {
                    strategy: StrategySpec::Given(s.into()),
                    ..problem.clone()
                };
                for (ci, ch) in cs.iter().enumerate() {
                    if let Some(mut f) = attempt(&sub, (ci, ch), PremiseMode::Minimal, ("candidate", Some(k)), cfg, &mut log)? {
                        f.solution.origin = StrategyOrigin::Synthesized;
                        found = Some(f);
                        break 'cands;
                    }
                }
            }
        }
    }
    if found.is_none() {
        'modes: for &mode in &cfg.modes {
            for (ci, ch) in cs.iter().enumerate() {
                if let Some(f) = attempt(problem, (ci, ch), mode, ("template", None), cfg, &mut log)? {
                    found = Some(f);
                    break 'modes;
                }
            }
        }
    }
    let (solution, validation) = match found {
        Some(f) => (Some(f.solution), Some(f.validation)),
        None => (None, None),
    };
    Ok(Outcome {
        solution,
        validation,
        attempts: log,
        refutation: None,
        choices: cs.len(),
        budget_cut,
        counts,
        total: start.elapsed(),
    })
}
