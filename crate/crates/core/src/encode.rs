//! End-to-end encoding of a verification or synthesis problem, for one
//! successor choice, into an existential system.

use alloc::vec::Vec;

use crate::constraints::{
    enumerate_choices, gen_buchi, gen_initial, gen_strategy_validity, reachable_locations, Constraint,
    InitMode, InitRegion, PremiseMode, SuccessorChoice, DEFAULT_CHOICE_BUDGET,
};
use crate::error::Result;
use crate::farkas::{transform_all, ExistentialSystem, DEFAULT_HANDELMAN_DEGREE, DEFAULT_MONOID_LIMIT};
use crate::logic::{satisfiable_letters, Letter, Nba, DEFAULT_AP_CAP};
use crate::mdp::{Mdp, Strategy};
use crate::poly::{VarKind, VarPool};
use crate::rational::Rational;
use crate::templates::{make_cert_template, make_strategy_template, symbolic_step, CertTemplate, StrategyClass, StrategyTemplate};

/// The strategy to verify, or the class to synthesize from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Given(Strategy),
    Template {
        class: StrategyClass,
        eps_den: Option<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub mdp: Mdp,
    pub nba: Nba,
    pub init: InitRegion,
    pub mode: InitMode,
    pub strategy: StrategySpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOptions {
    pub invariant_size: usize,
    pub premise_mode: PremiseMode,
    pub handelman_degree: u32,
    pub monoid_limit: usize,
    pub ap_cap: usize,
    pub choice_budget: usize,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            invariant_size: 1,
            premise_mode: PremiseMode::Full,
            handelman_degree: DEFAULT_HANDELMAN_DEGREE,
            monoid_limit: DEFAULT_MONOID_LIMIT,
            ap_cap: DEFAULT_AP_CAP,
            choice_budget: DEFAULT_CHOICE_BUDGET,
        }
    }
}

/// Sizes of an encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    /// Certificate and strategy unknowns before quantifier elimination.
    pub template_vars: usize,
    pub strategy_vars: usize,
    pub multipliers: usize,
    pub forall_constraints: usize,
    pub exists_constraints: usize,
    /// Relations of the final system.
    pub relations: usize,
    pub discharged: usize,
    /// Unknowns declared in the emitted system.
    pub system_vars: usize,
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub pool: VarPool,
    pub cert: CertTemplate,
    pub strategy: StrategyTemplate,
    pub choice: SuccessorChoice,
    pub constraints: Vec<Constraint>,
    pub system: ExistentialSystem,
    pub counts: Counts,
}

/// Satisfiable letters and the locations reachable through them.
pub fn locations_and_letters(problem: &Problem, opts: &EncodeOptions) -> Result<(Vec<usize>, Vec<Letter>)> {
    let n = problem.mdp.num_states();
    let letters = satisfiable_letters(problem.nba.ap(), n, opts.ap_cap)?;
    let locs = reachable_locations(&problem.nba, &letters);
    Ok((locs, letters))
}

/// Successor choices to try, and whether the budget cut them short.
pub fn choices(problem: &Problem, opts: &EncodeOptions) -> Result<(Vec<SuccessorChoice>, bool)> {
    let (locs, letters) = locations_and_letters(problem, opts)?;
    Ok(enumerate_choices(&problem.nba, &locs, &letters, opts.choice_budget))
}

/// Templates, constraints and the quantifier-free system for one choice.
pub fn encode(problem: &Problem, choice: &SuccessorChoice, opts: &EncodeOptions) -> Result<Encoding> {
    let n = problem.mdp.num_states();
    let nba = &problem.nba;
    let (locs, letters) = locations_and_letters(problem, opts)?;
    let mut pool = VarPool::new();
    let cert = make_cert_template(&mut pool, nba.num_states(), n, opts.invariant_size);
    let strategy = match &problem.strategy {
        StrategySpec::Given(s) => StrategyTemplate::Fixed(s.clone()),
        StrategySpec::Template { class, eps_den } => {
            make_strategy_template(&mut pool, &problem.mdp, *class, eps_den.clone())?
        }
    };
    let step = symbolic_step(&problem.mdp, &strategy);
    let mut constraints = gen_initial(&mut pool, problem.mode, &problem.init, &cert, nba.initial(), n)?;
    let template_vars = pool.len();
    for &q in &locs {
        for &l in &letters {
            let succ = if nba.delta(q, l).is_empty() {
                None
            } else {
                Some(choice.get(&(q, l)).copied().unwrap_or(nba.delta(q, l)[0]))
            };
            let c = gen_buchi(nba, q, l, succ, &cert, &step, opts.premise_mode, n);
            constraints.push(Constraint::Forall(c));
        }
    }
    constraints.extend(gen_strategy_validity(&strategy, &problem.mdp));
    let system = transform_all(&mut pool, &constraints, opts.handelman_degree, opts.monoid_limit, n)?;
    let counts = Counts {
        template_vars,
        strategy_vars: strategy.num_vars(),
        multipliers: pool.count_kind(VarKind::Multiplier),
        forall_constraints: constraints
            .iter()
            .filter(|c| matches!(c, Constraint::Forall(_)))
            .count(),
        exists_constraints: constraints
            .iter()
            .filter(|c| matches!(c, Constraint::Exists(_)))
            .count(),
        relations: system.relations.len(),
        discharged: system.discharged.len(),
        system_vars: system.vars().len(),
    };
    Ok(Encoding {
        pool,
        cert,
        strategy,
        choice: choice.clone(),
        constraints,
        system,
        counts,
    })
}
