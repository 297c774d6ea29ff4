//! Fault localization from bug reports.
//!
//! Bug reports are classified (stack trace / programming entities / plain
//! language), turned into entity-only queries by an LLM provider, and matched
//! against an ingested source corpus with a pairwise learning-to-rank model
//! over seven per-file features.

pub mod corpus;
mod error;
pub mod exec;

pub use error::{Error, Result};
pub mod eval;
pub mod features;
pub mod ltr;
pub mod query;
pub mod report;
pub mod session;
