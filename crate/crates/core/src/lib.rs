//! Distributional certificates for Markov decision processes.
//!
//! An MDP under a strategy is read as a deterministic transformer of state
//! distributions. Specifications are Büchi automata whose letters are sets
//! of affine predicates on distributions. This crate builds the product
//! transition system, instantiates affine ranking/invariant/strategy
//! templates, eliminates the universal quantifier over distributions with
//! Farkas' lemma or Handelman's theorem, emits SMT-LIB2, and validates the
//! resulting certificates exactly.
//!
//! The crate is `no_std` (with `alloc`); solver processes, file formats and
//! the command line live in the `distcert` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod constraints;
pub mod encode;
pub mod error;
pub mod farkas;
pub mod heuristics;
pub mod logic;
pub mod lp;
pub mod mdp;
pub mod patterns;
pub mod pdts;
pub mod poly;
pub mod rational;
pub mod smtlib;
pub mod solution;
pub mod templates;
pub mod validate;

pub use error::{Error, Result};
pub use rational::Rational;
