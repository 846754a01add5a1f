//! Concrete certificates read back from solver models.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::constraints::SuccessorChoice;
use crate::error::{Error, Result};
use crate::mdp::{AffineDistStrategy, AffineRow, MemorylessStrategy, Mdp, Strategy};
use crate::rational::Rational;
use crate::templates::{AffineTemplate, CertTemplate, StrategyTemplate};

/// Where the strategy of a solution came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyOrigin {
    Given,
    Synthesized,
}

/// Ranking rows `C(q,·)`, invariant rows `I(q,·)`, the strategy and the
/// successor choice the constraints were generated with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateSolution {
    pub ranking: Vec<AffineRow>,
    pub invariant: Vec<Vec<AffineRow>>,
    pub strategy: Strategy,
    pub origin: StrategyOrigin,
    pub choice: SuccessorChoice,
}

impl CertificateSolution {
    pub fn num_locations(&self) -> usize {
        self.ranking.len()
    }

    pub fn num_states(&self) -> usize {
        self.ranking.first().map_or(0, |r| r.coeffs.len())
    }

    /// Rows that must be non-negative at location `q`: ranking first.
    pub fn location_rows(&self, q: usize) -> Vec<&AffineRow> {
        let mut out = Vec::with_capacity(1 + self.invariant[q].len());
        out.push(&self.ranking[q]);
        out.extend(self.invariant[q].iter());
        out
    }

    pub fn check_dimensions(&self, n_locations: usize, n_states: usize) -> Result<()> {
        if self.ranking.len() != n_locations || self.invariant.len() != n_locations {
            return Err(Error::Dimension {
                expected: n_locations,
                got: self.ranking.len().max(self.invariant.len()),
            });
        }
        for r in self.ranking.iter().chain(self.invariant.iter().flatten()) {
            if r.coeffs.len() != n_states {
                return Err(Error::Dimension {
                    expected: n_states,
                    got: r.coeffs.len(),
                });
            }
        }
        Ok(())
    }
}

fn value(model: &BTreeMap<u32, Rational>, id: u32) -> Rational {
    model.get(&id).cloned().unwrap_or_else(Rational::zero)
}

fn row(model: &BTreeMap<u32, Rational>, t: &AffineTemplate) -> AffineRow {
    AffineRow {
        coeffs: t.coeffs.iter().map(|&v| value(model, v)).collect(),
        offset: value(model, t.offset),
    }
}

/// Instantiates the templates at a model. Unknowns absent from the model
/// never occurred in any relation and read as zero. Strategy-class
/// invariants are re-checked exactly; a violation is an error.
pub fn extract_solution(
    model: &BTreeMap<u32, Rational>,
    mdp: &Mdp,
    cert: &CertTemplate,
    st: &StrategyTemplate,
    choice: &SuccessorChoice,
) -> Result<CertificateSolution> {
    let ranking = cert.ranking.iter().map(|t| row(model, t)).collect();
    let invariant = cert
        .invariant
        .iter()
        .map(|rows| rows.iter().map(|t| row(model, t)).collect())
        .collect();
    let (strategy, origin) = match st {
        StrategyTemplate::Fixed(s) => (s.clone(), StrategyOrigin::Given),
        StrategyTemplate::Memoryless { prob } => {
            let p = prob.iter().map(|(&k, &v)| (k, value(model, v))).collect();
            let m = MemorylessStrategy::new(mdp, p)?;
            (Strategy::Memoryless(m), StrategyOrigin::Synthesized)
        }
        StrategyTemplate::Distributional {
            numerators,
            eps_den,
        } => {
            let rows = numerators.iter().map(|(&k, t)| (k, row(model, t))).collect();
            let d = AffineDistStrategy::new(mdp, rows, eps_den.clone())?;
            (Strategy::AffineDist(d), StrategyOrigin::Synthesized)
        }
    };
    Ok(CertificateSolution {
        ranking,
        invariant,
        strategy,
        origin,
        choice: choice.clone(),
    })
}
