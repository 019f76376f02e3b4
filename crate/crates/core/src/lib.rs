//! Constructions of additivity-breaking subspaces for the minimum output
//! Rényi entropy, their closed-form entropy bounds, and brute-force numerical
//! oracles that cross-check those bounds at small dimensions.

pub mod bounds;
pub mod channels;
pub mod constructions;
pub mod entropy;
pub mod error;
pub mod oracle;
pub mod report;
pub mod tensor;

pub use error::{Error, Result};
