use alloc::string::String;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),
    #[error("row sum {sum} ≠ 1 for state `{state}`, action `{action}`")]
    RowSum {
        state: String,
        action: String,
        sum: Rational,
    },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("strategy denominator vanishes at state `{0}`")]
    ZeroDenominator(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("unrecognized LTL pattern `{0}`; supply the automaton as HOA instead")]
    UnknownPattern(String),
    #[error("{count} atomic propositions exceed the configured cap of {cap}")]
    TooManyPropositions { count: usize, cap: usize },
    #[error("initial region is empty on the probability simplex")]
    EmptyInitRegion,
    #[error("unknown automaton state {0}")]
    UnknownLocation(usize),
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("conclusion has μ-degree {0}; requires Handelman")]
    RequiresHandelman(u32),
    #[error("Handelman degree {degree} is below the conclusion degree {needed}")]
    HandelmanDegree { degree: u32, needed: u32 },
    #[error("Handelman monoid has {size} products, above the limit {limit}")]
    MonoidTooLarge { size: usize, limit: usize },
    #[error("premise row mentions template variables")]
    TemplatePremise,
    #[error("distributional strategies support at most {cap} states, got {got}")]
    TooManyStatesForDistributional { cap: usize, got: usize },
    #[error("model error: {0}")]
    Model(String),
    #[error("solver: {0}")]
    Solver(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
