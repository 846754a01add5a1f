//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule. Problems here are tiny (a
//! few dozen rows), so clarity wins over sparsity. Variables are free;
//! constraints are `a·x + b ≥ 0` or `a·x + b = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Eq,
}

/// One affine constraint `coeffs·x + offset (≥|=) 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
    pub rel: Rel,
}

impl Constraint {
    pub fn ge(coeffs: Vec<Rational>, offset: Rational) -> Self {
        Self {
            coeffs,
            offset,
            rel: Rel::Ge,
        }
    }

    pub fn eq(coeffs: Vec<Rational>, offset: Rational) -> Self {
        Self {
            coeffs,
            offset,
            rel: Rel::Eq,
        }
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<Rational>() + &self.offset
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = self.value(x);
        match self.rel {
            Rel::Ge => !v.is_negative(),
            Rel::Eq => v.is_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    /// Optimal value and a vertex attaining it.
    Optimal { value: Rational, point: Vec<Rational> },
}

/// Minimizes `objective·x + objective_offset` subject to `constraints` over
/// `n` free variables.
pub fn minimize(
    n: usize,
    objective: &[Rational],
    objective_offset: &Rational,
    constraints: &[Constraint],
) -> LpOutcome {
    // x = x⁺ − x⁻; each Ge row gets a surplus column.
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.rel == Rel::Ge).count();
    let n_cols = 2 * n + n_slack;
    let mut a = vec![vec![Rational::zero(); n_cols]; m];
    let mut b = vec![Rational::zero(); m];
    let mut slack = 2 * n;
    for (i, c) in constraints.iter().enumerate() {
        for j in 0..n {
            let v = c.coeffs.get(j).cloned().unwrap_or_else(Rational::zero);
            a[i][j] = v.clone();
            a[i][n + j] = -v;
        }
        if c.rel == Rel::Ge {
            a[i][slack] = -Rational::one();
            slack += 1;
        }
        b[i] = -c.offset.clone();
        if b[i].is_negative() {
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
            b[i] = -b[i].clone();
        }
    }
    let mut cost = vec![Rational::zero(); n_cols];
    for j in 0..n {
        let v = objective.get(j).cloned().unwrap_or_else(Rational::zero);
        cost[j] = v.clone();
        cost[n + j] = -v;
    }
    match Tableau::solve(a, b, &cost) {
        Solved::Infeasible => LpOutcome::Infeasible,
        Solved::Unbounded => LpOutcome::Unbounded,
        Solved::Optimal(y, value) => {
            let point = (0..n).map(|j| &y[j] - &y[n + j]).collect();
            LpOutcome::Optimal {
                value: value + objective_offset,
                point,
            }
        }
    }
}

/// Some point satisfying all constraints, or `None` if infeasible.
pub fn feasible_point(n: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    match minimize(n, &vec![Rational::zero(); n], &Rational::zero(), constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

pub fn is_feasible(n: usize, constraints: &[Constraint]) -> bool {
    feasible_point(n, constraints).is_some()
}

enum Solved {
    Infeasible,
    Unbounded,
    Optimal(Vec<Rational>, Rational),
}

/// Standard-form tableau for `min c·y, A y = b, y ≥ 0, b ≥ 0`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn solve(a: Vec<Vec<Rational>>, b: Vec<Rational>, cost: &[Rational]) -> Solved {
        let m = a.len();
        let n = cost.len();
        // phase 1: one artificial column per row
        let mut rows = a;
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        }
        let mut t = Tableau {
            rows,
            rhs: b,
            basis: (n..n + m).collect(),
        };
        let phase1: Vec<Rational> = (0..n + m)
            .map(|j| if j >= n { Rational::one() } else { Rational::zero() })
            .collect();
        if !t.optimize(&phase1, n + m) {
            unreachable!("phase one is bounded below by zero");
        }
        if t.objective(&phase1).is_positive() {
            return Solved::Infeasible;
        }
        t.drive_out_artificials(n);
        for row in t.rows.iter_mut() {
            row.truncate(n);
        }
        if !t.optimize(cost, n) {
            return Solved::Unbounded;
        }
        let mut y = vec![Rational::zero(); n];
        for (i, &j) in t.basis.iter().enumerate() {
            y[j] = t.rhs[i].clone();
        }
        let value = t.objective(cost);
        Solved::Optimal(y, value)
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&j, v)| &cost[j] * v)
            .sum()
    }

    /// Runs Bland's rule on columns `< width`; false when unbounded.
    fn optimize(&mut self, cost: &[Rational], width: usize) -> bool {
        loop {
            let entering = (0..width).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = &cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&bj, row)| &cost[bj] * &row[j])
                        .sum::<Rational>();
                reduced.is_negative()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &self.rhs[i] / &row[j];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i, _)) = leave else {
                return false;
            };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, i: usize, j: usize) {
        let p = self.rows[i][j].clone();
        for v in self.rows[i].iter_mut() {
            *v /= &p;
        }
        self.rhs[i] /= &p;
        let pivot_row = self.rows[i].clone();
        let pivot_rhs = self.rhs[i].clone();
        for k in 0..self.rows.len() {
            if k == i || self.rows[k][j].is_zero() {
                continue;
            }
            let f = self.rows[k][j].clone();
            for (v, pv) in self.rows[k].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[k] -= &f * &pivot_rhs;
        }
        self.basis[i] = j;
    }

    /// Pivots zero-level artificials out of the basis; drops redundant rows.
    fn drive_out_artificials(&mut self, n: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
