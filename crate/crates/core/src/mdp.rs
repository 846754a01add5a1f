//! MDP data model and the one-step distribution transformer.
//!
//! An MDP under a strategy acts as a deterministic map on distributions
//! over its states: `μ' = Σ_{s,a} π(s,a)(μ)·μ(s)·P(s,a)`. Everything here is
//! exact; a [`Distribution`] always sums to exactly one.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};

/// Default lower bound on affine strategy denominators over the simplex.
pub fn default_eps_den() -> Rational {
    rat(1, 1000)
}

/// Finite MDP with an exact transition kernel.
///
/// Successor distribution as `(target, probability)` pairs.
pub type SparseRow = Vec<(usize, Rational)>;

/// The order of `states` fixes the enumeration `s_1..s_n` used by every
/// distribution vector, atom and template in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    states: Vec<String>,
    actions: Vec<String>,
    available: Vec<Vec<usize>>,
    kernel: BTreeMap<(usize, usize), Vec<Rational>>,
}

impl Mdp {
    /// Builds and validates an MDP from `(state, action, successor row)`
    /// entries. Rows are given sparsely as `(target, probability)` pairs.
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        transitions: Vec<(usize, usize, SparseRow)>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::InvalidMdp("no states".into()));
        }
        if actions.is_empty() {
            return Err(Error::InvalidMdp("no actions".into()));
        }
        check_unique(&states, "state")?;
        check_unique(&actions, "action")?;
        let mut kernel = BTreeMap::new();
        let mut available = vec![Vec::new(); n];
        for (s, a, row) in transitions {
            if s >= n {
                return Err(Error::InvalidMdp(format!("unknown state index {s}")));
            }
            if a >= actions.len() {
                return Err(Error::InvalidMdp(format!("unknown action index {a}")));
            }
            let mut dense = vec![Rational::zero(); n];
            for (t, p) in row {
                if t >= n {
                    return Err(Error::InvalidMdp(format!("unknown target index {t}")));
                }
                if p.is_negative() {
                    return Err(Error::InvalidMdp(format!(
                        "negative probability {} from `{}` under `{}`",
                        format_rational(&p),
                        states[s],
                        actions[a]
                    )));
                }
                dense[t] += p;
            }
            let sum: Rational = dense.iter().sum();
            if !sum.is_one() {
                return Err(Error::RowSum {
                    state: states[s].clone(),
                    action: actions[a].clone(),
                    sum,
                });
            }
            if kernel.insert((s, a), dense).is_some() {
                return Err(Error::InvalidMdp(format!(
                    "duplicate transition for `{}` under `{}`",
                    states[s], actions[a]
                )));
            }
            available[s].push(a);
        }
        for (s, acts) in available.iter_mut().enumerate() {
            if acts.is_empty() {
                return Err(Error::InvalidMdp(format!(
                    "state `{}` has no available action",
                    states[s]
                )));
            }
            acts.sort_unstable();
        }
        Ok(Self {
            states,
            actions,
            available,
            kernel,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Available actions at `s`, sorted by action index.
    pub fn available(&self, s: usize) -> &[usize] {
        &self.available[s]
    }

    /// Successor distribution `P(s, a)` as a dense row, if `a` is available.
    pub fn row(&self, s: usize, a: usize) -> Option<&[Rational]> {
        self.kernel.get(&(s, a)).map(Vec::as_slice)
    }

    /// True when every state has exactly one available action.
    pub fn is_chain(&self) -> bool {
        self.available.iter().all(|a| a.len() == 1)
    }

    /// Iterates `(s, a)` pairs with `a` available at `s`, in state-major order.
    pub fn state_actions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.available
            .iter()
            .enumerate()
            .flat_map(|(s, acts)| acts.iter().map(move |&a| (s, a)))
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::InvalidMdp(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

/// Probability vector over the MDP states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Distribution(Vec<Rational>);

impl Distribution {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        if let Some(p) = mass.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "negative entry {}",
                format_rational(p)
            )));
        }
        let sum: Rational = mass.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {}",
                format_rational(&sum)
            )));
        }
        Ok(Self(mass))
    }

    /// Point mass on state `s` of an `n`-state MDP.
    pub fn dirac(n: usize, s: usize) -> Self {
        let mut v = vec![Rational::zero(); n];
        v[s] = Rational::one();
        Self(v)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![rat(1, n as i64); n])
    }

    pub fn mass(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    /// Max-norm distance to another distribution of the same dimension.
    pub fn max_diff(&self, other: &Distribution) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(Rational::zero(), |m, d| if d > m { d } else { m })
    }
}

impl core::ops::Index<usize> for Distribution {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// State-based memoryless strategy: a fixed action distribution per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    prob: BTreeMap<(usize, usize), Rational>,
}

impl MemorylessStrategy {
    /// Validates against `mdp`: probabilities are non-negative, zero outside
    /// the available actions, and sum to one at every state. Missing entries
    /// read as zero.
    pub fn new(mdp: &Mdp, prob: BTreeMap<(usize, usize), Rational>) -> Result<Self> {
        let n = mdp.num_states();
        let mut sums = vec![Rational::zero(); n];
        for (&(s, a), p) in &prob {
            if s >= n || a >= mdp.actions().len() {
                return Err(Error::InvalidStrategy(format!("entry ({s}, {a}) out of range")));
            }
            if p.is_negative() {
                return Err(Error::InvalidStrategy(format!(
                    "negative probability at `{}`/`{}`",
                    mdp.states[s], mdp.actions[a]
                )));
            }
            if !p.is_zero() && !mdp.available(s).contains(&a) {
                return Err(Error::InvalidStrategy(format!(
                    "action `{}` not available at `{}`",
                    mdp.actions[a], mdp.states[s]
                )));
            }
            sums[s] += p;
        }
        for (s, sum) in sums.iter().enumerate() {
            if !sum.is_one() {
                return Err(Error::InvalidStrategy(format!(
                    "probabilities at `{}` sum to {}",
                    mdp.states[s],
                    format_rational(sum)
                )));
            }
        }
        let prob = prob.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(Self { prob })
    }

    /// Deterministic strategy from one action per state.
    pub fn deterministic(mdp: &Mdp, choice: &[usize]) -> Result<Self> {
        if choice.len() != mdp.num_states() {
            return Err(Error::Dimension {
                expected: mdp.num_states(),
                got: choice.len(),
            });
        }
        let prob = choice
            .iter()
            .enumerate()
            .map(|(s, &a)| ((s, a), Rational::one()))
            .collect();
        Self::new(mdp, prob)
    }

    /// The unique strategy of a Markov chain (first available action).
    pub fn trivial(mdp: &Mdp) -> Self {
        let prob = (0..mdp.num_states())
            .map(|s| ((s, mdp.available(s)[0]), Rational::one()))
            .collect();
        Self { prob }
    }

    pub fn prob(&self, s: usize, a: usize) -> Rational {
        self.prob.get(&(s, a)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.prob
    }
}

/// Affine numerator row `e·μ + f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineRow {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
}

impl AffineRow {
    pub fn eval(&self, mu: &[Rational]) -> Rational {
        self.coeffs.iter().zip(mu).map(|(c, m)| c * m).sum::<Rational>() + &self.offset
    }

    /// Minimum over the probability simplex: attained at a vertex.
    pub fn simplex_min(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|c| c + &self.offset)
            .min()
            .unwrap_or_else(|| self.offset.clone())
    }
}

/// Distributionally memoryless strategy with affine numerators and the
/// structural denominator `D_s(μ) = Σ_a N_{s,a}(μ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineDistStrategy {
    numerators: BTreeMap<(usize, usize), AffineRow>,
    eps_den: Rational,
}

impl AffineDistStrategy {
    /// Validates that every numerator is non-negative on the simplex and
    /// every denominator is at least `eps_den` there. Both are affine, so
    /// checking simplex vertices is exact.
    pub fn new(
        mdp: &Mdp,
        numerators: BTreeMap<(usize, usize), AffineRow>,
        eps_den: Rational,
    ) -> Result<Self> {
        let n = mdp.num_states();
        for (&(s, a), row) in &numerators {
            if s >= n || !mdp.available(s).contains(&a) {
                return Err(Error::InvalidStrategy(format!(
                    "numerator for unavailable pair ({s}, {a})"
                )));
            }
            if row.coeffs.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.coeffs.len(),
                });
            }
            if row.simplex_min().is_negative() {
                return Err(Error::InvalidStrategy(format!(
                    "numerator for `{}`/`{}` is negative somewhere on the simplex",
                    mdp.states[s], mdp.actions[a]
                )));
            }
        }
        let strategy = Self {
            numerators,
            eps_den,
        };
        for s in 0..n {
            for &a in mdp.available(s) {
                if !strategy.numerators.contains_key(&(s, a)) {
                    return Err(Error::InvalidStrategy(format!(
                        "missing numerator for `{}`/`{}`",
                        mdp.states[s], mdp.actions[a]
                    )));
                }
            }
            if strategy.denominator_row(mdp, s).simplex_min() < strategy.eps_den {
                return Err(Error::InvalidStrategy(format!(
                    "denominator at `{}` drops below {} on the simplex",
                    mdp.states[s],
                    format_rational(&strategy.eps_den)
                )));
            }
        }
        Ok(strategy)
    }

    pub fn numerator(&self, s: usize, a: usize) -> Option<&AffineRow> {
        self.numerators.get(&(s, a))
    }

    pub fn numerators(&self) -> &BTreeMap<(usize, usize), AffineRow> {
        &self.numerators
    }

    pub fn eps_den(&self) -> &Rational {
        &self.eps_den
    }

    pub fn denominator_row(&self, mdp: &Mdp, s: usize) -> AffineRow {
        let n = mdp.num_states();
        let mut coeffs = vec![Rational::zero(); n];
        let mut offset = Rational::zero();
        for &a in mdp.available(s) {
            if let Some(row) = self.numerators.get(&(s, a)) {
                for (c, e) in coeffs.iter_mut().zip(&row.coeffs) {
                    *c += e;
                }
                offset += &row.offset;
            }
        }
        AffineRow { coeffs, offset }
    }
}

/// Any strategy the transformer can run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Memoryless(MemorylessStrategy),
    AffineDist(AffineDistStrategy),
}

impl Strategy {
    /// Action probability `π(s,a)(μ)`.
    pub fn prob(&self, mdp: &Mdp, s: usize, a: usize, mu: &Distribution) -> Result<Rational> {
        match self {
            Strategy::Memoryless(m) => Ok(m.prob(s, a)),
            Strategy::AffineDist(d) => {
                let Some(num) = d.numerator(s, a) else {
                    return Ok(Rational::zero());
                };
                let den = d.denominator_row(mdp, s).eval(mu.mass());
                if !den.is_positive() {
                    return Err(Error::ZeroDenominator(mdp.states[s].clone()));
                }
                Ok(num.eval(mu.mass()) / den)
            }
        }
    }
}

impl From<MemorylessStrategy> for Strategy {
    fn from(s: MemorylessStrategy) -> Self {
        Strategy::Memoryless(s)
    }
}

impl From<AffineDistStrategy> for Strategy {
    fn from(s: AffineDistStrategy) -> Self {
        Strategy::AffineDist(s)
    }
}

/// One application of the distribution transformer.
pub fn step(mdp: &Mdp, strategy: &Strategy, mu: &Distribution) -> Result<Distribution> {
    let n = mdp.num_states();
    if mu.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: mu.len(),
        });
    }
    let mut next = vec![Rational::zero(); n];
    for (s, a) in mdp.state_actions() {
        if mu[s].is_zero() {
            continue;
        }
        let p = strategy.prob(mdp, s, a, mu)?;
        if p.is_zero() {
            continue;
        }
        let weight = p * &mu[s];
        for (t, q) in mdp.row(s, a).expect("available action").iter().enumerate() {
            if !q.is_zero() {
                next[t] += &weight * q;
            }
        }
    }
    Distribution::new(next)
}

/// `[μ₀, …, μ_n]` with `μ_{i+1} = step(μ_i)`.
pub fn trajectory(
    mdp: &Mdp,
    strategy: &Strategy,
    mu0: &Distribution,
    n: usize,
) -> Result<Vec<Distribution>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(mu0.clone());
    for _ in 0..n {
        let next = step(mdp, strategy, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn step_matches_hand_update() {
        let mdp = running_example();
        let pi = b_at_a(&mdp);
        let mu = Distribution::uniform(3);
        let next = step(&mdp, &pi, &mu).unwrap();
        assert_eq!(next, dist(&[(1, 6), (1, 3), (1, 2)]));
        let next2 = step(&mdp, &pi, &next).unwrap();
        assert_eq!(next2, dist(&[(1, 4), (1, 6), (7, 12)]));
    }

    #[test]
    fn trajectory_lengths() {
        let mdp = running_example();
        let pi = b_at_a(&mdp);
        let mu = Distribution::uniform(3);
        assert_eq!(trajectory(&mdp, &pi, &mu, 0).unwrap(), vec![mu.clone()]);
        let t = trajectory(&mdp, &pi, &mu, 2).unwrap();
        assert_eq!(
            t,
            vec![
                mu,
                dist(&[(1, 6), (1, 3), (1, 2)]),
                dist(&[(1, 4), (1, 6), (7, 12)])
            ]
        );
    }

    #[test]
    fn single_state_chain_is_fixed() {
        let mdp = Mdp::new(
            vec!["s".to_string()],
            vec!["a".to_string()],
            vec![(0, 0, vec![(0, rat(1, 1))])],
        )
        .unwrap();
        let pi = Strategy::from(MemorylessStrategy::trivial(&mdp));
        let mu = Distribution::dirac(1, 0);
        assert_eq!(step(&mdp, &pi, &mu).unwrap(), mu);
        assert!(mdp.is_chain());
    }

    #[test]
    fn row_sum_error_reports_sum() {
        let err = Mdp::new(
            vec!["s".to_string(), "t".to_string()],
            vec!["a".to_string()],
            vec![
                (0, 0, vec![(0, rat(1, 2)), (1, rat(1, 3))]),
                (1, 0, vec![(1, rat(1, 1))]),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::RowSum {
                state: "s".into(),
                action: "a".into(),
                sum: rat(5, 6)
            }
        );
    }

    #[test]
    fn missing_actions_rejected() {
        let err = Mdp::new(
            vec!["s".to_string(), "t".to_string()],
            vec!["a".to_string()],
            vec![(0, 0, vec![(0, rat(1, 1))])],
        );
        assert!(matches!(err, Err(Error::InvalidMdp(_))));
    }

    #[test]
    fn memoryless_validation() {
        let mdp = running_example();
        let mut prob = BTreeMap::new();
        prob.insert((0, 0), rat(1, 2));
        prob.insert((0, 1), rat(1, 3));
        prob.insert((1, 0), rat(1, 1));
        prob.insert((2, 0), rat(1, 1));
        assert!(MemorylessStrategy::new(&mdp, prob.clone()).is_err());
        prob.insert((0, 1), rat(1, 2));
        assert!(MemorylessStrategy::new(&mdp, prob.clone()).is_ok());
        prob.insert((1, 1), rat(1, 1));
        assert!(MemorylessStrategy::new(&mdp, prob).is_err());
    }

    #[test]
    fn affine_dist_strategy_step_sums_to_one() {
        let mdp = running_example();
        let mut nums = BTreeMap::new();
        // prefer b at A when mass at A is high
        nums.insert(
            (0, 0),
            AffineRow {
                coeffs: vec![rat(0, 1), rat(1, 1), rat(1, 1)],
                offset: rat(1, 10),
            },
        );
        nums.insert(
            (0, 1),
            AffineRow {
                coeffs: vec![rat(1, 1), rat(0, 1), rat(0, 1)],
                offset: rat(1, 10),
            },
        );
        for s in [1, 2] {
            nums.insert(
                (s, 0),
                AffineRow {
                    coeffs: vec![rat(0, 1); 3],
                    offset: rat(1, 1),
                },
            );
        }
        let st = AffineDistStrategy::new(&mdp, nums, default_eps_den()).unwrap();
        let pi = Strategy::from(st);
        let mu = dist(&[(1, 2), (1, 4), (1, 4)]);
        let next = step(&mdp, &pi, &mu).unwrap();
        let pa = pi.prob(&mdp, 0, 0, &mu).unwrap();
        let pb = pi.prob(&mdp, 0, 1, &mu).unwrap();
        assert_eq!(pa + pb, rat(1, 1));
        let sum: Rational = next.mass().iter().sum();
        assert_eq!(sum, rat(1, 1));
    }

    #[test]
    fn affine_dist_rejects_small_denominator() {
        let mdp = running_example();
        let mut nums = BTreeMap::new();
        for (s, a) in mdp.state_actions() {
            nums.insert(
                (s, a),
                AffineRow {
                    coeffs: vec![rat(0, 1); 3],
                    offset: rat(0, 1),
                },
            );
        }
        assert!(AffineDistStrategy::new(&mdp, nums, default_eps_den()).is_err());
    }
}
