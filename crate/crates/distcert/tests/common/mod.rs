//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use distcert_core::constraints::ForallConstraint;
use distcert_core::mdp::{Mdp, Strategy};
use distcert_core::poly::{Poly, Var, VarPool};
use distcert_core::rational::rat;
use distcert_core::Rational;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(r: &mut ChaCha8Rng, n: u64) -> u64 {
    r.next_u64() % n
}

/// Integer in `[lo, hi]`.
pub fn int_in(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    lo + below(r, (hi - lo + 1) as u64) as i64
}

/// A random point of the simplex with exact rational coordinates.
pub fn simplex_point(r: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| int_in(r, 0, 60)).collect();
    let total: i64 = w.iter().sum();
    if total == 0 {
        return vec![rat(1, n as i64); n];
    }
    w.iter().map(|&x| rat(x, total)).collect()
}

/// Stationary distribution of the chain induced by a memoryless strategy,
/// by exact Gaussian elimination on `πP = π`, `Σπ = 1`. `None` when the
/// solution is not unique.
pub fn stationary(mdp: &Mdp, st: &Strategy) -> Option<Vec<Rational>> {
    let n = mdp.num_states();
    let Strategy::Memoryless(m) = st else { return None };
    let mut p = vec![vec![Rational::zero(); n]; n];
    for (s, a) in mdp.state_actions() {
        let pr = m.prob(s, a);
        for (t, q) in mdp.row(s, a).unwrap().iter().enumerate() {
            p[s][t] += &pr * q;
        }
    }
    // Rows: (Pᵀ − I) π = 0 for all but the last state, then Σπ = 1.
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|t| {
            let mut row: Vec<Rational> = (0..n).map(|s| p[s][t].clone()).collect();
            row[t] -= Rational::one();
            row.push(Rational::zero());
            row
        })
        .collect();
    a[n - 1] = vec![Rational::one(); n + 1];
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = Rational::one() / a[col][col].clone();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
    }
    let pi: Vec<Rational> = a.iter().map(|row| row[n].clone()).collect();
    let check = (0..n).all(|t| (0..n).map(|s| &pi[s] * &p[s][t]).sum::<Rational>() == pi[t]);
    check.then_some(pi)
}

/// Evaluates `p` with template unknowns from `model` (absent ones zero) and
/// distribution coordinates from `mu`.
pub fn eval_at(p: &Poly, model: &std::collections::BTreeMap<u32, Rational>, mu: &[Rational]) -> Rational {
    p.eval(|v| match v {
        Var::Mu(i) => Some(mu[i as usize].clone()),
        Var::T(t) => Some(model.get(&t).cloned().unwrap_or_else(Rational::zero)),
    })
    .unwrap()
}

/// Premise points: random simplex points pulled towards `center` until
/// every premise row is nonnegative.
pub fn premise_points(r: &mut ChaCha8Rng, c: &ForallConstraint, center: &[Rational], count: usize) -> Vec<Vec<Rational>> {
    let n = center.len();
    let empty = std::collections::BTreeMap::new();
    let ok = |mu: &[Rational]| c.premise.iter().all(|h| !eval_at(h, &empty, mu).is_negative());
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = simplex_point(r, n);
        let mut t = Rational::one();
        loop {
            let mu: Vec<Rational> = center
                .iter()
                .zip(&v)
                .map(|(c, x)| c * (Rational::one() - &t) + x * &t)
                .collect();
            if ok(&mu) {
                out.push(mu);
                break;
            }
            t /= Rational::from_integer(2.into());
            if t < rat(1, 1 << 20) {
                break;
            }
        }
    }
    out
}

/// The SMT text of a system with a fresh pool naming, for byte comparison.
pub fn pool_text(sys: &distcert_core::farkas::ExistentialSystem, pool: &VarPool) -> String {
    distcert_core::smtlib::emit_smtlib(sys, pool)
}
