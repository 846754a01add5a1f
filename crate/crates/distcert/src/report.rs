//! Structured (JSON) and human-readable reports. Fields ending in `_ms` are
//! wall times; everything else is deterministic.

use distcert_core::logic::{Letter, Nba};
use distcert_core::mdp::Mdp;
use distcert_core::rational::{format_rational, format_vector};
use distcert_core::solution::{CertificateSolution, StrategyOrigin};
use distcert_core::validate::{MonitorReport, ValidationReport};
use distcert_core::Rational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::formats::strategy::write_strategy;
use crate::pipeline::{Attempt, CountsReport, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub states: usize,
    pub actions: usize,
    pub automaton_states: usize,
    pub atoms: usize,
}

impl InstanceSummary {
    pub fn new(mdp: &Mdp, nba: &Nba) -> Self {
        Self {
            states: mdp.num_states(),
            actions: mdp.actions().len(),
            automaton_states: nba.num_states(),
            atoms: nba.ap().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub label: String,
    pub status: String,
    pub successor: Option<usize>,
    pub matches_choice: Option<bool>,
    pub witness: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub verdict: String,
    pub strict_letters: Vec<u32>,
    pub checks: Vec<CheckReport>,
}

impl From<&ValidationReport> for ValidationSummary {
    fn from(r: &ValidationReport) -> Self {
        Self {
            verdict: r.verdict().as_str().into(),
            strict_letters: r.strict_letters.iter().map(|l| l.0).collect(),
            checks: r
                .checks
                .iter()
                .map(|c| CheckReport {
                    label: c.label.clone(),
                    status: c.status.as_str().into(),
                    successor: c.successor,
                    matches_choice: c.matches_choice,
                    witness: c.witness.as_deref().map(format_vector),
                    detail: c.detail.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSummary {
    pub origin: String,
    pub strategy: Vec<String>,
    pub ranking: Vec<String>,
    pub invariant: Vec<Vec<String>>,
}

fn row_text(coeffs: &[Rational], offset: &Rational) -> String {
    crate::formats::affine::format_affine(coeffs, offset)
}

impl SolutionSummary {
    pub fn new(sol: &CertificateSolution, mdp: &Mdp) -> Self {
        Self {
            origin: match sol.origin {
                StrategyOrigin::Given => "given".into(),
                StrategyOrigin::Synthesized => "synthesized".into(),
            },
            strategy: write_strategy(&sol.strategy, mdp).lines().map(str::to_string).collect(),
            ranking: sol.ranking.iter().map(|r| row_text(&r.coeffs, &r.offset)).collect(),
            invariant: sol
                .invariant
                .iter()
                .map(|rows| rows.iter().map(|r| row_text(&r.coeffs, &r.offset)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub validate_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub status: String,
    pub instance: InstanceSummary,
    pub choices: usize,
    pub budget_cut: bool,
    pub counts: CountsReport,
    pub refutation: Option<String>,
    pub solution: Option<SolutionSummary>,
    pub validation: Option<ValidationSummary>,
    pub attempts: Vec<Attempt>,
    pub timings: Timings,
}

impl RunReport {
    pub fn new(command: &str, mdp: &Mdp, nba: &Nba, o: &Outcome) -> Self {
        let sum = |f: fn(&Attempt) -> f64| (o.attempts.iter().map(f).fold(0.0, |a, b| a + b) * 1e3).round() / 1e3;
        Self {
            command: command.into(),
            status: if o.solved() {
                "solved"
            } else if o.refutation.is_some() {
                "refuted"
            } else {
                "not-solved"
            }
            .into(),
            instance: InstanceSummary::new(mdp, nba),
            choices: o.choices,
            budget_cut: o.budget_cut,
            counts: o.counts,
            refutation: o.refutation.clone(),
            solution: o.solution.as_ref().map(|s| SolutionSummary::new(s, mdp)),
            validation: o.validation.as_ref().map(ValidationSummary::from),
            attempts: o.attempts.clone(),
            timings: Timings {
                encode_ms: sum(|a| a.encode_ms),
                solve_ms: sum(|a| a.solve_ms),
                validate_ms: sum(|a| a.validate_ms),
                total_ms: (o.total.as_secs_f64() * 1e6).round() / 1e3,
            },
        }
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.status);
        let i = &self.instance;
        out.push_str(&format!(
            "instance: {} states, {} actions, {} automaton states, {} atoms\n",
            i.states, i.actions, i.automaton_states, i.atoms
        ));
        let c = &self.counts;
        out.push_str(&format!(
            "template: {} coefficients ({} strategy), {} universal and {} existential constraints\n",
            c.template_vars, c.strategy_vars, c.forall_constraints, c.exists_constraints
        ));
        out.push_str(&format!(
            "system: {} unknowns ({} multipliers), {} relations\n",
            c.system_vars, c.multipliers, c.relations
        ));
        out.push_str(&format!(
            "successor choices: {}{}\n",
            self.choices,
            if self.budget_cut { " (budget reached)" } else { "" }
        ));
        if let Some(r) = &self.refutation {
            out.push_str(&format!("refuted: {r}\n"));
        }
        out.push_str("attempts:\n");
        for a in &self.attempts {
            let stage = match a.candidate {
                Some(k) => format!("{} {k}", a.stage),
                None => a.stage.clone(),
            };
            out.push_str(&format!(
                "  {stage}, {} premises, choice {}: {}",
                a.premise_mode, a.choice, a.status
            ));
            if let Some(v) = &a.verdict {
                out.push_str(&format!(", {v}"));
            }
            if let Some(d) = &a.detail {
                out.push_str(&format!(" ({d})"));
            }
            out.push_str(&format!(" [{:.0} ms]\n", a.solve_ms));
        }
        if let Some(s) = &self.solution {
            out.push_str(&format!("strategy ({}):\n", s.origin));
            for l in &s.strategy {
                out.push_str(&format!("  {l}\n"));
            }
            for (q, r) in s.ranking.iter().enumerate() {
                out.push_str(&format!("  C(q{q}) = {r}\n"));
            }
            for (q, rows) in s.invariant.iter().enumerate() {
                for (k, r) in rows.iter().enumerate() {
                    out.push_str(&format!("  I{k}(q{q}) = {r}\n"));
                }
            }
        }
        if let Some(v) = &self.validation {
            out.push_str(&format!("validation: {}\n", v.verdict));
        }
        let t = &self.timings;
        out.push_str(&format!(
            "time: {:.0} ms (encode {:.0}, solve {:.0}, validate {:.0})\n",
            t.total_ms, t.encode_ms, t.solve_ms, t.validate_ms
        ));
        out
    }
}

pub fn validation_text(v: &ValidationSummary) -> String {
    let mut out = String::new();
    for c in &v.checks {
        out.push_str(&format!("{}: {}", c.label, c.status));
        if let Some(s) = c.successor {
            out.push_str(&format!(" via q{s}"));
        }
        if let Some(w) = &c.witness {
            out.push_str(&format!(" at ({w})"));
        }
        if !c.detail.is_empty() {
            out.push_str(&format!(" ({})", c.detail));
        }
        out.push('\n');
    }
    out.push_str(&format!("verdict: {}\n", v.verdict));
    out
}

/// Exact text when short, otherwise nine decimals.
fn short_rational(r: &Rational) -> String {
    let exact = format_rational(r);
    if exact.len() <= 24 {
        exact
    } else {
        format!("{:.9}", r.to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub steps: usize,
    pub letters: Vec<u32>,
    pub accepting_steps: Vec<usize>,
    pub converged_at: Option<usize>,
    pub limit_letter: Option<u32>,
    pub empty_at: Option<usize>,
    pub verdict: String,
    pub final_distribution: Vec<String>,
}

impl SimulationReport {
    pub fn new(steps: usize, r: &MonitorReport) -> Self {
        Self {
            steps,
            letters: r.letters.iter().map(|l| l.0).collect(),
            accepting_steps: r.accepting_steps.clone(),
            converged_at: r.converged_at,
            limit_letter: r.limit_letter.map(|l: Letter| l.0),
            empty_at: r.empty_at,
            verdict: r.verdict.as_str().into(),
            final_distribution: r.final_distribution.mass().iter().map(short_rational).collect(),
        }
    }

    pub fn text(&self, states: &[String]) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        if let Some(e) = self.empty_at {
            out.push_str(&format!("automaton run empty at step {e}\n"));
        }
        match (self.converged_at, self.limit_letter) {
            (Some(c), Some(l)) => out.push_str(&format!("converged at step {c}, limit letter {l}\n")),
            _ => out.push_str("not converged\n"),
        }
        let shown: Vec<String> = self.letters.iter().take(20).map(u32::to_string).collect();
        out.push_str(&format!(
            "letters: {}{}\n",
            shown.join(" "),
            if self.letters.len() > 20 { " ..." } else { "" }
        ));
        out.push_str(&format!("accepting steps: {}\n", self.accepting_steps.len()));
        out.push_str("final distribution:\n");
        for (s, m) in states.iter().zip(&self.final_distribution) {
            out.push_str(&format!("  {s}: {m}\n"));
        }
        out
    }
}
