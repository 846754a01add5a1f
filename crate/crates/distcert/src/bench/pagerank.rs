//! PageRank-style Markov chains from a directed graph.
//!
//! `P = d·L + (1-d)·U` where `L` follows a uniformly chosen out-link (all
//! nodes for a node without out-links) and `U` jumps uniformly.

use std::collections::BTreeSet;

use distcert_core::mdp::Mdp;
use distcert_core::rational::{format_rational, rat};
use distcert_core::Rational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn default_damping() -> Rational {
    rat(17, 20)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

/// Lines `a -> b` or `a b`; `#` starts a comment. Nodes appear in order of
/// first mention.
pub fn parse_digraph(text: &str, file: &str) -> Result<Digraph> {
    let mut nodes: Vec<String> = Vec::new();
    let mut edges = BTreeSet::new();
    let id = |name: &str, nodes: &mut Vec<String>| match nodes.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            nodes.push(name.to_string());
            nodes.len() - 1
        }
    };
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().filter(|t| *t != "->").collect();
        match parts.as_slice() {
            [a] => {
                id(a, &mut nodes);
            }
            [a, b] => {
                let u = id(a, &mut nodes);
                let v = id(b, &mut nodes);
                edges.insert((u, v));
            }
            _ => return Err(Error::syntax(file, ln + 1, 1, "expected `<node> -> <node>`")),
        }
    }
    if nodes.is_empty() {
        return Err(Error::syntax(file, 1, 1, "graph has no nodes"));
    }
    Ok(Digraph { nodes, edges })
}

#[derive(Debug, Clone)]
pub struct PagerankInstance {
    pub mdp: Mdp,
    pub spec: String,
    pub init: String,
    /// Node with the largest stationary mass.
    pub top: usize,
}

pub fn gen_pagerank(g: &Digraph, damping: &Rational) -> Result<PagerankInstance> {
    if *damping < Rational::zero() || *damping > Rational::one() {
        return Err(Error::Usage("damping factor outside [0, 1]".into()));
    }
    let n = g.nodes.len();
    let teleport = (Rational::one() - damping) / Rational::from_integer(n.into());
    let mut rows = Vec::with_capacity(n);
    for u in 0..n {
        let out: Vec<usize> = g.edges.iter().filter(|e| e.0 == u).map(|e| e.1).collect();
        let targets: Vec<usize> = if out.is_empty() { (0..n).collect() } else { out };
        let share = damping / Rational::from_integer(targets.len().into());
        let mut row = vec![teleport.clone(); n];
        for v in targets {
            row[v] += &share;
        }
        rows.push(row);
    }
    let pi = stationary(&rows);
    let top = (0..n)
        .max_by(|&a, &b| pi[a].total_cmp(&pi[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let threshold = (pi[top] * 0.9 * 1000.0).floor() / 1000.0;
    let trans = rows
        .into_iter()
        .enumerate()
        .map(|(s, row)| (s, 0, row.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect()))
        .collect();
    let mdp = Mdp::new(g.nodes.clone(), vec!["step".into()], trans)?;
    let uniform = format_rational(&rat(1, n as i64));
    Ok(PagerankInstance {
        mdp,
        spec: format!("F G \"V{top}>={threshold}\""),
        init: format!("point: {}\n", vec![uniform; n].join(",")),
        top,
    })
}

/// Stationary distribution by power iteration in floating point; only used
/// to pick a specification threshold.
fn stationary(rows: &[Vec<Rational>]) -> Vec<f64> {
    let n = rows.len();
    let p: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let mut mu = vec![1.0 / n as f64; n];
    for _ in 0..1000 {
        let mut next = vec![0.0; n];
        for (u, row) in p.iter().enumerate() {
            for (v, q) in row.iter().enumerate() {
                next[v] += mu[u] * q;
            }
        }
        mu = next;
    }
    mu
}
