//! File formats, an SMT solver driver, the verification and synthesis
//! pipeline, benchmark generators and bundled instances.

pub mod bench;
pub mod error;
pub mod formats;
pub mod instances;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
