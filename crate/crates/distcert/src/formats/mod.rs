//! Text formats for models, specifications, initial sets, strategies and
//! certificates.

pub mod affine;
pub mod certificate;
pub mod init;
pub mod mdp;
pub mod spec;
pub mod strategy;
