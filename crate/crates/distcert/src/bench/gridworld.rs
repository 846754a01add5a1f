//! Gridworld benchmarks: a swarm starts in the top-left cell and must keep
//! most of its mass on a target cell.
//!
//! Every cell offers `up`, `down`, `left` and `right`; a move into a wall
//! or off the grid leaves the robot in place. On a slippery cell with slip
//! probability `ρ` the intended move happens with `1-ρ` and each
//! perpendicular move with `ρ/2`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use distcert_core::mdp::Mdp;
use distcert_core::rational::{format_rational, rat};
use distcert_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Cell = (usize, usize);

const DIRS: [(&str, isize, isize); 4] = [("up", -1, 0), ("down", 1, 0), ("left", 0, -1), ("right", 0, 1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub size: usize,
    pub walls: BTreeSet<Cell>,
    pub slippery: BTreeMap<Cell, Rational>,
    pub target: Cell,
    /// Cell whose mass must stay at most one half.
    pub avoid: Option<Cell>,
    /// Mass the target must reach infinitely often.
    pub threshold: Rational,
}

impl GridSpec {
    /// 3×3, no walls, slippery target on the right edge of the middle row.
    pub fn three_by_three() -> Self {
        Self {
            size: 3,
            walls: BTreeSet::new(),
            slippery: BTreeMap::from([((1, 2), rat(1, 20))]),
            target: (1, 2),
            avoid: None,
            threshold: rat(9, 10),
        }
    }

    /// 4×4 with a one-cell passage on the right of the second row and a
    /// cell to keep clear below it.
    pub fn four_by_four_passage() -> Self {
        Self {
            size: 4,
            walls: BTreeSet::from([(1, 0), (1, 1), (1, 2)]),
            slippery: BTreeMap::from([((3, 0), rat(1, 20))]),
            target: (3, 0),
            avoid: Some((2, 3)),
            threshold: rat(9, 10),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridInstance {
    pub mdp: Mdp,
    pub spec: String,
    pub init: String,
    /// Cell of each state, in state order.
    pub cells: Vec<Cell>,
}

fn state_name((r, c): Cell) -> String {
    format!("r{r}c{c}")
}

/// Finite decimal form when one exists with at most six digits.
fn decimal(r: &Rational) -> String {
    let mut scale = BigInt::one();
    for digits in 0..=6 {
        let scaled = r * Rational::from_integer(scale.clone());
        if scaled.is_integer() {
            if digits == 0 {
                return scaled.to_integer().to_string();
            }
            let v = scaled.to_integer();
            let sign = if v.is_negative() { "-" } else { "" };
            let s = format!("{:0>width$}", v.abs().to_string(), width = digits + 1);
            let (int, frac) = s.split_at(s.len() - digits);
            return format!("{sign}{int}.{frac}");
        }
        scale *= 10;
    }
    format_rational(r)
}

pub fn gen_gridworld(g: &GridSpec) -> Result<GridInstance> {
    let n = g.size;
    if n < 2 {
        return Err(Error::Usage("gridworld size must be at least 2".into()));
    }
    let inside = |(r, c): Cell| r < n && c < n;
    for &w in &g.walls {
        if !inside(w) {
            return Err(Error::Usage(format!("wall {w:?} outside the grid")));
        }
    }
    if g.walls.contains(&(0, 0)) {
        return Err(Error::Usage("the top-left cell cannot be a wall".into()));
    }
    for &c in std::iter::once(&g.target).chain(g.avoid.iter()).chain(g.slippery.keys()) {
        if !inside(c) || g.walls.contains(&c) {
            return Err(Error::Usage(format!("cell {c:?} is a wall or outside the grid")));
        }
    }
    for (c, p) in &g.slippery {
        if *p < Rational::zero() || *p > Rational::one() {
            return Err(Error::Usage(format!("slip probability of {c:?} outside [0, 1]")));
        }
    }
    let cells: Vec<Cell> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|c| !g.walls.contains(c))
        .collect();
    let index: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let go = |(r, c): Cell, d: usize| -> Cell {
        let (_, dr, dc) = DIRS[d];
        let r2 = r as isize + dr;
        let c2 = c as isize + dc;
        if r2 < 0 || c2 < 0 {
            return (r, c);
        }
        let to = (r2 as usize, c2 as usize);
        if index.contains_key(&to) {
            to
        } else {
            (r, c)
        }
    };
    let mut seen = BTreeSet::from([(0, 0)]);
    let mut queue = VecDeque::from([(0, 0)]);
    while let Some(c) = queue.pop_front() {
        for d in 0..4 {
            let to = go(c, d);
            if seen.insert(to) {
                queue.push_back(to);
            }
        }
    }
    if !seen.contains(&g.target) {
        return Err(Error::Usage(format!("target {:?} is unreachable from the top-left cell", g.target)));
    }
    let perpendicular = |d: usize| if d < 2 { [2, 3] } else { [0, 1] };
    let mut trans = Vec::new();
    for &c in &cells {
        let s = index[&c];
        for d in 0..4 {
            let mut row = vec![Rational::zero(); cells.len()];
            match g.slippery.get(&c) {
                Some(rho) => {
                    row[index[&go(c, d)]] += Rational::one() - rho;
                    for p in perpendicular(d) {
                        row[index[&go(c, p)]] += rho / Rational::from_integer(2.into());
                    }
                }
                None => row[index[&go(c, d)]] += Rational::one(),
            }
            let sparse = row
                .into_iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .collect();
            trans.push((s, d, sparse));
        }
    }
    let mdp = Mdp::new(
        cells.iter().map(|&c| state_name(c)).collect(),
        DIRS.iter().map(|d| d.0.to_string()).collect(),
        trans,
    )?;
    let t = index[&g.target];
    let mut spec = format!("G F \"V{t}>={}\"", decimal(&g.threshold));
    if let Some(a) = g.avoid {
        spec.push_str(&format!(" & G \"V{}<=0.5\"", index[&a]));
    }
    let init = format!(
        "point: {}\n",
        (0..cells.len())
            .map(|i| if i == 0 { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(GridInstance {
        mdp,
        spec,
        init,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_sums_exact(m: &Mdp) -> bool {
        m.state_actions()
            .all(|(s, a)| m.row(s, a).unwrap().iter().sum::<Rational>() == Rational::one())
    }

    #[test]
    fn three_by_three() {
        let g = gen_gridworld(&GridSpec::three_by_three()).unwrap();
        assert_eq!(g.mdp.num_states(), 9);
        assert_eq!(g.spec, "G F \"V5>=0.9\"");
        assert!(row_sums_exact(&g.mdp));
        let right = g.mdp.action_index("right").unwrap();
        assert_eq!(g.mdp.row(5, right).unwrap()[5], rat(19, 20));
        assert_eq!(g.mdp.row(5, right).unwrap()[8], rat(1, 40));
        assert_eq!(g.mdp.row(5, right).unwrap()[2], rat(1, 40));
    }

    #[test]
    fn two_by_two_total() {
        let g = gen_gridworld(&GridSpec {
            size: 2,
            walls: BTreeSet::new(),
            slippery: BTreeMap::new(),
            target: (1, 1),
            avoid: None,
            threshold: rat(9, 10),
        })
        .unwrap();
        assert_eq!(g.mdp.num_states(), 4);
        for s in 0..4 {
            assert_eq!(g.mdp.available(s).len(), 4);
        }
        assert!(row_sums_exact(&g.mdp));
    }

    #[test]
    fn passage_layout() {
        let g = gen_gridworld(&GridSpec::four_by_four_passage()).unwrap();
        assert_eq!(g.mdp.num_states(), 13);
        assert_eq!(g.spec, "G F \"V9>=0.9\" & G \"V8<=0.5\"");
        assert!(row_sums_exact(&g.mdp));
    }

    #[test]
    fn disconnected_target() {
        let mut g = GridSpec::three_by_three();
        g.walls = BTreeSet::from([(0, 1), (1, 0), (1, 1)]);
        g.target = (2, 2);
        g.slippery.clear();
        assert!(gen_gridworld(&g).is_err());
        g.walls.insert((0, 0));
        assert!(gen_gridworld(&g).is_err());
    }
}
