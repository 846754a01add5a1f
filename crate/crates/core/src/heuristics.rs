//! Deterministic candidate strategies tried before template search.
//!
//! Each candidate maximizes a discounted reward built from the coefficients
//! of the specification atoms: mass on states with positive coefficients
//! (or negative ones, for the complementary polarity) earns reward. Values
//! are computed in floating point; only the greedy action choice is kept,
//! and every candidate is re-checked exactly downstream.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::logic::AffineAtom;
use crate::mdp::{MemorylessStrategy, Mdp};

const DISCOUNT: f64 = 0.95;
const ITERATIONS: usize = 400;

fn greedy(mdp: &Mdp, reward: &[f64]) -> Vec<usize> {
    let n = mdp.num_states();
    let rows: Vec<Vec<(usize, Vec<f64>)>> = (0..n)
        .map(|s| {
            mdp.available(s)
                .iter()
                .map(|&a| {
                    let row = mdp.row(s, a).expect("available action");
                    (a, row.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect())
                })
                .collect()
        })
        .collect();
    let q_value = |v: &[f64], row: &[f64]| -> f64 {
        row.iter()
            .enumerate()
            .map(|(t, p)| p * (reward[t] + DISCOUNT * v[t]))
            .sum()
    };
    let mut v = vec![0.0; n];
    for _ in 0..ITERATIONS {
        v = rows
            .iter()
            .map(|acts| {
                acts.iter()
                    .map(|(_, row)| q_value(&v, row))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
    }
    rows.iter()
        .map(|acts| {
            let mut best = acts[0].0;
            let mut best_q = f64::NEG_INFINITY;
            for (a, row) in acts {
                let q = q_value(&v, row);
                if q > best_q + 1e-12 {
                    best = *a;
                    best_q = q;
                }
            }
            best
        })
        .collect()
}

fn reward_of(atom: &AffineAtom, sign: f64) -> Vec<f64> {
    atom.coeffs
        .iter()
        .map(|c| sign * c.to_f64().unwrap_or(0.0))
        .collect()
}

/// Up to `limit` distinct deterministic strategies: the one rewarding all
/// atoms at once, then each atom with either polarity.
pub fn candidate_strategies(mdp: &Mdp, ap: &[AffineAtom], limit: usize) -> Vec<MemorylessStrategy> {
    if mdp.is_chain() || ap.is_empty() {
        return Vec::new();
    }
    let n = mdp.num_states();
    let mut rewards = Vec::new();
    let mut combined = vec![0.0; n];
    for atom in ap {
        let r = reward_of(atom, 1.0);
        let scale = r.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        for (c, x) in combined.iter_mut().zip(&r) {
            *c += x / scale;
        }
    }
    rewards.push(combined);
    for atom in ap {
        rewards.push(reward_of(atom, 1.0));
        rewards.push(reward_of(atom, -1.0));
    }
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for r in rewards {
        if out.len() >= limit {
            break;
        }
        let choice = greedy(mdp, &r);
        if seen.contains(&choice) {
            continue;
        }
        if let Ok(s) = MemorylessStrategy::deterministic(mdp, &choice) {
            seen.push(choice);
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fixtures::b_atom;
    use crate::mdp::fixtures::*;
    use crate::mdp::Strategy;

    #[test]
    fn running_example_prefers_moving_to_b() {
        let mdp = running_example();
        let c = candidate_strategies(&mdp, &[b_atom()], 8);
        assert_eq!(Strategy::from(c[0].clone()), b_at_a(&mdp));
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].prob(0, 0), crate::rational::int(1));
    }

    #[test]
    fn limit_is_respected() {
        let mdp = running_example();
        assert_eq!(candidate_strategies(&mdp, &[b_atom()], 1).len(), 1);
        assert!(candidate_strategies(&mdp, &[], 4).is_empty());
    }
}
