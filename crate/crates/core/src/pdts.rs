//! Product of the distribution transformer with a Büchi automaton.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::constraints::InitRegion;
use crate::error::{Error, Result};
use crate::logic::{letter_of, satisfiable_letters, AffineAtom, Cube, Letter, Nba, DEFAULT_AP_CAP};
use crate::mdp::{step, Distribution, Mdp, Strategy};
use crate::rational::format_rational;

/// How the successor distribution is computed on a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateKind {
    /// Linear map of a concrete strategy.
    Fixed,
    /// Map of a strategy template with unknown parameters.
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdtsTransition {
    pub source: usize,
    pub target: usize,
    /// Letter cube labelling the transition.
    pub cube: Cube,
    /// Satisfiable letters covered by the cube.
    pub letters: Vec<Letter>,
    /// Closed guard, each atom meaning `≥ 0`.
    pub guard: Vec<AffineAtom>,
    pub update: UpdateKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdts {
    pub locations: Vec<String>,
    pub accepting: Vec<bool>,
    pub num_vars: usize,
    pub init_location: usize,
    pub init: InitRegion,
    pub transitions: Vec<PdtsTransition>,
}

/// Builds the product. Transitions come from the automaton's edge labels
/// in disjunctive normal form, one per cube realized by some satisfiable
/// letter.
pub fn build_pdts(mdp: &Mdp, nba: &Nba, init: &InitRegion, update: UpdateKind) -> Result<Pdts> {
    let n = mdp.num_states();
    if let Some(a) = nba.ap().iter().find(|a| a.dim() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: a.dim(),
        });
    }
    init.validate(n)?;
    let letters = satisfiable_letters(nba.ap(), n, DEFAULT_AP_CAP)?;
    let mut transitions = Vec::new();
    let mut seen = BTreeSet::new();
    for e in nba.edges() {
        for cube in e.label.to_cubes() {
            let covered: Vec<Letter> = letters.iter().copied().filter(|l| cube.matches(*l)).collect();
            if covered.is_empty() || !seen.insert((e.src, e.dst, cube)) {
                continue;
            }
            transitions.push(PdtsTransition {
                source: e.src,
                target: e.dst,
                cube,
                letters: covered,
                guard: cube.guard(nba.ap()),
                update,
            });
        }
    }
    Ok(Pdts {
        locations: nba.state_names().to_vec(),
        accepting: nba.accepting().to_vec(),
        num_vars: n,
        init_location: nba.initial(),
        init: init.clone(),
        transitions,
    })
}

impl Pdts {
    /// Number of `(q, σ, q′)` triples with `σ` satisfiable.
    pub fn letter_count(&self, nba: &Nba) -> usize {
        let letters: BTreeSet<Letter> = self
            .transitions
            .iter()
            .flat_map(|t| t.letters.iter().copied())
            .collect();
        (0..nba.num_states())
            .map(|q| letters.iter().map(|&l| nba.delta(q, l).len()).sum::<usize>())
            .sum()
    }

    /// Human-readable listing of locations and transitions.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "locations: {}", self.locations.len());
        for (q, name) in self.locations.iter().enumerate() {
            let mark = if self.accepting[q] { " (accepting)" } else { "" };
            let init = if q == self.init_location { " (initial)" } else { "" };
            let _ = writeln!(out, "  {q}: {name}{mark}{init}");
        }
        let _ = writeln!(out, "variables: {}", self.num_vars);
        let _ = writeln!(out, "transitions: {}", self.transitions.len());
        for t in &self.transitions {
            let guard = if t.guard.is_empty() {
                String::from("true")
            } else {
                t.guard
                    .iter()
                    .map(format_atom)
                    .collect::<Vec<_>>()
                    .join(" & ")
            };
            let update = match t.update {
                UpdateKind::Fixed => "fixed",
                UpdateKind::Symbolic => "symbolic",
            };
            let _ = writeln!(out, "  {} -> {} [{guard}] update={update}", t.source, t.target);
        }
        out
    }
}

fn format_atom(a: &AffineAtom) -> String {
    let mut parts = Vec::new();
    for (i, c) in a.coeffs.iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            parts.push(format!("{}*V{i}", format_rational(c)));
        }
    }
    parts.push(format_rational(&a.offset));
    format!("{} >= 0", parts.join(" + "))
}

/// Successor configurations of `(q, μ)` under strict letter semantics.
pub fn successor_states(
    mdp: &Mdp,
    nba: &Nba,
    strategy: &Strategy,
    q: usize,
    mu: &Distribution,
) -> Result<Vec<(usize, Distribution)>> {
    let letter = letter_of(nba.ap(), mu)?;
    let succ = nba.delta(q, letter);
    if succ.is_empty() {
        return Ok(Vec::new());
    }
    let next = step(mdp, strategy, mu)?;
    Ok(succ.iter().map(|&q2| (q2, next.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fixtures::{b_atom, gf_nba};
    use crate::logic::{Edge, Label};
    use crate::mdp::fixtures::*;
    use crate::mdp::MemorylessStrategy;
    use crate::rational::{int, rat};
    use alloc::string::ToString;
    use alloc::vec;

    fn third() -> InitRegion {
        InitRegion::point(vec![rat(1, 3); 3])
    }

    #[test]
    fn running_example_product() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let p = build_pdts(&mdp, &nba, &third(), UpdateKind::Fixed).unwrap();
        assert_eq!(p.locations.len(), 2);
        assert_eq!(p.num_vars, 3);
        assert_eq!(p.transitions.len(), 3);
        assert_eq!(p.letter_count(&nba), 4);
        assert!(p.describe().contains("1 -> 0 [true]"));
    }

    #[test]
    fn trivial_product() {
        let mdp = Mdp::new(
            vec!["s".to_string()],
            vec!["a".to_string()],
            vec![(0, 0, vec![(0, int(1))])],
        )
        .unwrap();
        let nba = Nba::new(
            vec!["0".to_string()],
            vec![],
            vec![Edge {
                src: 0,
                label: Label::True,
                dst: 0,
            }],
            0,
            vec![true],
        )
        .unwrap();
        let p = build_pdts(&mdp, &nba, &InitRegion::whole_simplex(), UpdateKind::Fixed).unwrap();
        assert_eq!(p.transitions.len(), 1);
    }

    #[test]
    fn dead_location_has_no_transitions() {
        let mdp = running_example();
        let nba = Nba::new(
            vec!["0".to_string()],
            vec![b_atom()],
            vec![],
            0,
            vec![true],
        )
        .unwrap();
        let p = build_pdts(&mdp, &nba, &third(), UpdateKind::Symbolic).unwrap();
        assert!(p.transitions.is_empty());
    }

    #[test]
    fn successors_follow_strict_letters() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let pi = b_at_a(&mdp);
        let mu = Distribution::uniform(3);
        let s = successor_states(&mdp, &nba, &pi, 0, &mu).unwrap();
        assert_eq!(s, vec![(1, dist(&[(1, 6), (1, 3), (1, 2)]))]);
        let s = successor_states(&mdp, &nba, &pi, 1, &dist(&[(1, 1), (0, 1), (0, 1)])).unwrap();
        assert_eq!(s[0].0, 0);
        let g = crate::patterns::parse_ltl_pattern("G p", &[("p".into(), b_atom())]).unwrap();
        let stay: Strategy = MemorylessStrategy::deterministic(&mdp, &[0, 0, 0]).unwrap().into();
        assert!(successor_states(&mdp, &g, &stay, 0, &dist(&[(1, 1), (0, 1), (0, 1)]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn empty_init_rejected() {
        let mdp = running_example();
        let nba = gf_nba(b_atom());
        let init = InitRegion::point(vec![int(1), int(1), int(0)]);
        assert!(build_pdts(&mdp, &nba, &init, UpdateKind::Fixed).is_err());
    }
}
