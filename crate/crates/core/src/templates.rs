//! Affine templates for the ranking function, the invariant and the
//! strategy, and the symbolic one-step transformer.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::mdp::{default_eps_den, Mdp, Strategy};
use crate::poly::{Poly, VarKind, VarPool};
use crate::rational::Rational;

/// Largest state count accepted for distributional strategy templates.
pub const DISTRIBUTIONAL_STATE_CAP: usize = 6;

/// `Σ_i t_i·μ_i + t_c` with unknown coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineTemplate {
    pub coeffs: Vec<u32>,
    pub offset: u32,
}

impl AffineTemplate {
    fn fresh(pool: &mut VarPool, prefix: &str, n: usize, kind: VarKind) -> Self {
        let coeffs = (0..n)
            .map(|i| pool.fresh(format!("{prefix}_s{i}"), kind))
            .collect();
        let offset = pool.fresh(format!("{prefix}_c"), kind);
        Self { coeffs, offset }
    }

    /// The template at the identity images, i.e. as a polynomial in `μ`.
    pub fn poly(&self) -> Poly {
        let mut p = Poly::tvar(self.offset);
        for (i, &t) in self.coeffs.iter().enumerate() {
            p = p + Poly::tvar(t) * Poly::mu(i);
        }
        p
    }

    /// `Σ_i t_i·images_i + t_c·scale`.
    pub fn at(&self, images: &[Poly], scale: &Poly) -> Poly {
        let mut p = Poly::tvar(self.offset) * scale.clone();
        for (img, &t) in images.iter().zip(&self.coeffs) {
            p = p + Poly::tvar(t) * img.clone();
        }
        p
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.coeffs.iter().copied().chain(core::iter::once(self.offset))
    }
}

/// Ranking rows (one per automaton state) and invariant rows (`n_i` per
/// automaton state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertTemplate {
    pub ranking: Vec<AffineTemplate>,
    pub invariant: Vec<Vec<AffineTemplate>>,
    pub n_i: usize,
}

pub fn make_cert_template(
    pool: &mut VarPool,
    n_locations: usize,
    n_states: usize,
    n_i: usize,
) -> CertTemplate {
    assert!(n_i >= 1, "invariant size must be positive");
    let ranking = (0..n_locations)
        .map(|q| AffineTemplate::fresh(pool, &format!("rank_q{q}"), n_states, VarKind::Ranking))
        .collect();
    let invariant = (0..n_locations)
        .map(|q| {
            (0..n_i)
                .map(|k| {
                    AffineTemplate::fresh(
                        pool,
                        &format!("inv_q{q}_k{k}"),
                        n_states,
                        VarKind::Invariant,
                    )
                })
                .collect()
        })
        .collect();
    CertTemplate {
        ranking,
        invariant,
        n_i,
    }
}

impl CertTemplate {
    pub fn num_vars(&self) -> usize {
        self.ranking.iter().map(|r| r.coeffs.len() + 1).sum::<usize>()
            + self
                .invariant
                .iter()
                .flatten()
                .map(|r| r.coeffs.len() + 1)
                .sum::<usize>()
    }
}

/// `C(q, images)` with the offset scaled by `1`.
pub fn ranking_at(t: &CertTemplate, q: usize, images: &[Poly]) -> Result<Poly> {
    let row = t.ranking.get(q).ok_or(Error::UnknownLocation(q))?;
    Ok(row.at(images, &Poly::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyClass {
    Memoryless,
    Distributional,
}

/// The strategy side of the problem: fixed (verification) or unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyTemplate {
    Fixed(Strategy),
    Memoryless {
        prob: BTreeMap<(usize, usize), u32>,
    },
    Distributional {
        numerators: BTreeMap<(usize, usize), AffineTemplate>,
        eps_den: Rational,
    },
}

pub fn make_strategy_template(
    pool: &mut VarPool,
    mdp: &Mdp,
    class: StrategyClass,
    eps_den: Option<Rational>,
) -> Result<StrategyTemplate> {
    match class {
        StrategyClass::Memoryless => {
            let prob = mdp
                .state_actions()
                .map(|(s, a)| ((s, a), pool.fresh(format!("pi_s{s}_a{a}"), VarKind::Strategy)))
                .collect();
            Ok(StrategyTemplate::Memoryless { prob })
        }
        StrategyClass::Distributional => {
            if mdp.num_states() > DISTRIBUTIONAL_STATE_CAP {
                return Err(Error::TooManyStatesForDistributional {
                    cap: DISTRIBUTIONAL_STATE_CAP,
                    got: mdp.num_states(),
                });
            }
            let n = mdp.num_states();
            let numerators = mdp
                .state_actions()
                .map(|(s, a)| {
                    let t = AffineTemplate::fresh(
                        pool,
                        &format!("num_s{s}_a{a}"),
                        n,
                        VarKind::Strategy,
                    );
                    ((s, a), t)
                })
                .collect();
            Ok(StrategyTemplate::Distributional {
                numerators,
                eps_den: eps_den.unwrap_or_else(default_eps_den),
            })
        }
    }
}

impl StrategyTemplate {
    pub fn num_vars(&self) -> usize {
        match self {
            StrategyTemplate::Fixed(_) => 0,
            StrategyTemplate::Memoryless { prob } => prob.len(),
            StrategyTemplate::Distributional { numerators, .. } => {
                numerators.values().map(|t| t.coeffs.len() + 1).sum()
            }
        }
    }
}

/// Successor images over a common denominator: the successor distribution
/// is `images / denominator`, with `denominator > 0` on the simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicStep {
    pub images: Vec<Poly>,
    pub denominator: Poly,
}

/// Symbolic `M^π(μ)`.
///
/// Memoryless strategies give images linear in `μ` and denominator `1`.
/// Distributional strategies multiply through by `Π_s D_s(μ)` over the
/// states with more than one available action; states with a single action
/// play it with probability one and contribute no factor.
pub fn symbolic_step(mdp: &Mdp, st: &StrategyTemplate) -> SymbolicStep {
    let n = mdp.num_states();
    let numerator = |s: usize, a: usize| -> Poly {
        match st {
            StrategyTemplate::Fixed(Strategy::Memoryless(m)) => Poly::constant(m.prob(s, a)),
            StrategyTemplate::Memoryless { prob } => Poly::tvar(prob[&(s, a)]),
            StrategyTemplate::Fixed(Strategy::AffineDist(d)) => d
                .numerator(s, a)
                .map(|r| Poly::affine(&r.coeffs, &r.offset))
                .unwrap_or_default(),
            StrategyTemplate::Distributional { numerators, .. } => numerators[&(s, a)].poly(),
        }
    };
    let distributional = matches!(
        st,
        StrategyTemplate::Distributional { .. } | StrategyTemplate::Fixed(Strategy::AffineDist(_))
    );
    let choice_states: Vec<usize> = if distributional {
        (0..n).filter(|&s| mdp.available(s).len() > 1).collect()
    } else {
        Vec::new()
    };
    let state_den = |s: usize| -> Poly {
        mdp.available(s)
            .iter()
            .fold(Poly::zero(), |acc, &a| acc + numerator(s, a))
    };
    let dens: BTreeMap<usize, Poly> = choice_states.iter().map(|&s| (s, state_den(s))).collect();
    let others = |skip: Option<usize>| -> Poly {
        dens.iter()
            .filter(|(s, _)| Some(**s) != skip)
            .fold(Poly::one(), |acc, (_, d)| acc * d.clone())
    };
    let denominator = others(None);
    let mut images = vec_zero(n);
    for s in 0..n {
        let acts = mdp.available(s);
        let (weights, scale): (Vec<(usize, Poly)>, Poly) = if dens.contains_key(&s) {
            (acts.iter().map(|&a| (a, numerator(s, a))).collect(), others(Some(s)))
        } else if distributional {
            (vec_one(acts[0]), denominator.clone())
        } else {
            (acts.iter().map(|&a| (a, numerator(s, a))).collect(), Poly::one())
        };
        let mu_scale = Poly::mu(s) * scale;
        for (a, w) in weights {
            if w.is_zero() {
                continue;
            }
            let term = &mu_scale * &w;
            for (j, p) in mdp.row(s, a).expect("available").iter().enumerate() {
                if !num_traits::Zero::is_zero(p) {
                    images[j] = images[j].clone() + term.scale(p);
                }
            }
        }
    }
    SymbolicStep {
        images,
        denominator,
    }
}

fn vec_zero(n: usize) -> Vec<Poly> {
    (0..n).map(|_| Poly::zero()).collect()
}

fn vec_one(a: usize) -> Vec<(usize, Poly)> {
    alloc::vec![(a, Poly::one())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::fixtures::*;
    use crate::mdp::{step, AffineRow, AffineDistStrategy, Distribution, MemorylessStrategy};
    use crate::poly::Var;
    use crate::rational::{int, rat};

    #[test]
    fn variable_counts() {
        let mut pool = VarPool::new();
        let t = make_cert_template(&mut pool, 2, 3, 1);
        assert_eq!(t.num_vars(), 16);
        assert_eq!(pool.len(), 16);
        let mut pool = VarPool::new();
        assert_eq!(make_cert_template(&mut pool, 2, 3, 2).num_vars(), 24);
        let mut pool = VarPool::new();
        assert_eq!(make_cert_template(&mut pool, 1, 1, 1).num_vars(), 4);
    }

    #[test]
    fn memoryless_image_of_b() {
        let mdp = running_example();
        let mut pool = VarPool::new();
        let st = make_strategy_template(&mut pool, &mdp, StrategyClass::Memoryless, None).unwrap();
        let step = symbolic_step(&mdp, &st);
        let p_ab = pool.lookup("pi_s0_a1").unwrap();
        assert_eq!(step.images[1], Poly::tvar(p_ab) * Poly::mu(0));
        assert_eq!(step.denominator, Poly::one());
    }

    #[test]
    fn fixed_strategy_recovers_update() {
        let mdp = running_example();
        let st = StrategyTemplate::Fixed(b_at_a(&mdp));
        let step = symbolic_step(&mdp, &st);
        let half = rat(1, 2);
        assert_eq!(step.images[0], Poly::mu(2).scale(&half));
        assert_eq!(step.images[1], Poly::mu(0));
        assert_eq!(step.images[2], Poly::mu(1) + Poly::mu(2).scale(&half));
    }

    #[test]
    fn chain_images_are_strategy_free() {
        let mdp = crate::mdp::Mdp::new(
            alloc::vec!["x".into(), "y".into()],
            alloc::vec!["a".into()],
            alloc::vec![
                (0, 0, alloc::vec![(1, int(1))]),
                (1, 0, alloc::vec![(0, rat(1, 2)), (1, rat(1, 2))]),
            ],
        )
        .unwrap();
        let mut pool = VarPool::new();
        for class in [StrategyClass::Memoryless, StrategyClass::Distributional] {
            let st = make_strategy_template(&mut VarPool::new(), &mdp, class, None).unwrap();
            let step = symbolic_step(&mdp, &st);
            if class == StrategyClass::Distributional {
                assert!(step.images.iter().all(|p| !p.has_template_vars()));
            }
        }
        let st = make_strategy_template(&mut pool, &mdp, StrategyClass::Memoryless, None).unwrap();
        let step = symbolic_step(&mdp, &st);
        let fixed = step
            .images
            .iter()
            .map(|p| p.eval_template(|_| Some(int(1))))
            .collect::<Vec<_>>();
        assert!(fixed.iter().all(|p| !p.has_template_vars()));
    }

    #[test]
    fn distributional_images_are_quadratic() {
        let mdp = running_example();
        let mut pool = VarPool::new();
        let st =
            make_strategy_template(&mut pool, &mdp, StrategyClass::Distributional, None).unwrap();
        let step = symbolic_step(&mdp, &st);
        assert_eq!(step.images.iter().map(Poly::mu_degree).max(), Some(2));
        assert_eq!(step.denominator.mu_degree(), 1);
    }

    #[test]
    fn distributional_step_matches_concrete() {
        let mdp = running_example();
        let mut nums = BTreeMap::new();
        nums.insert(
            (0, 0),
            AffineRow {
                coeffs: alloc::vec![int(0), int(1), int(1)],
                offset: rat(1, 10),
            },
        );
        nums.insert(
            (0, 1),
            AffineRow {
                coeffs: alloc::vec![int(2), int(0), int(0)],
                offset: rat(1, 10),
            },
        );
        for s in [1, 2] {
            nums.insert(
                (s, 0),
                AffineRow {
                    coeffs: alloc::vec![int(0); 3],
                    offset: int(1),
                },
            );
        }
        let strat: Strategy = AffineDistStrategy::new(&mdp, nums, default_eps_den())
            .unwrap()
            .into();
        let sym = symbolic_step(&mdp, &StrategyTemplate::Fixed(strat.clone()));
        let mu = dist(&[(1, 5), (3, 10), (1, 2)]);
        let expected = step(&mdp, &strat, &mu).unwrap();
        let den = sym.denominator.eval_mu(mu.mass()).unwrap();
        for (j, img) in sym.images.iter().enumerate() {
            assert_eq!(img.eval_mu(mu.mass()).unwrap() / &den, expected[j]);
        }
    }

    #[test]
    fn memoryless_template_matches_concrete_step() {
        let mdp = running_example();
        let mut pool = VarPool::new();
        let st = make_strategy_template(&mut pool, &mdp, StrategyClass::Memoryless, None).unwrap();
        let sym = symbolic_step(&mdp, &st);
        let mut prob = BTreeMap::new();
        prob.insert((0, 0), rat(1, 3));
        prob.insert((0, 1), rat(2, 3));
        prob.insert((1, 0), int(1));
        prob.insert((2, 0), int(1));
        let concrete = MemorylessStrategy::new(&mdp, prob.clone()).unwrap();
        let StrategyTemplate::Memoryless { prob: vars } = &st else {
            unreachable!()
        };
        let mu = Distribution::uniform(3);
        let expected = step(&mdp, &concrete.into(), &mu).unwrap();
        for (j, img) in sym.images.iter().enumerate() {
            let v = img
                .eval(|v| match v {
                    Var::Mu(i) => Some(mu[i as usize].clone()),
                    Var::T(t) => vars
                        .iter()
                        .find(|(_, id)| **id == t)
                        .map(|(k, _)| prob[k].clone()),
                })
                .unwrap();
            assert_eq!(v, expected[j]);
        }
    }

    #[test]
    fn distributional_cap() {
        let names = |k: usize| (0..k).map(|i| format!("s{i}")).collect::<Vec<_>>();
        let mdp = Mdp::new(
            names(7),
            alloc::vec!["a".into()],
            (0..7).map(|s| (s, 0, alloc::vec![(s, int(1))])).collect(),
        )
        .unwrap();
        let err = make_strategy_template(&mut VarPool::new(), &mdp, StrategyClass::Distributional, None);
        assert!(matches!(err, Err(Error::TooManyStatesForDistributional { .. })));
    }
}
