//! Benchmark generators.

pub mod gridworld;
pub mod pagerank;
