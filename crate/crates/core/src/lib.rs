//! Enforceability analysis for finite-state security policies under a
//! monitor with partial control over the target's actions.

pub mod classifier;
pub mod cli;
pub mod enforcer;
pub mod error;
pub mod oracle;
pub mod policy;
pub mod trace;

pub use error::{Error, Result};
