//! Simulator and analysis harness for network constructors: anonymous
//! finite-state agents that activate pairwise connections while interacting
//! under a uniform random scheduler.
//!
//! - [`model`]: states, rules, configurations, encounters, output graphs.
//! - [`protocols`]: the 2-slot, k-slot and cross-edges constructions behind a
//!   name-keyed strategy registry.
//! - [`runner`]: seeded executions to stabilization.
//! - [`validators`]: graph-language predicates and stability invariants.
//! - [`oracle`]: analytic expected running times and the restricted process.
//! - [`experiments`]: sweeps, degree traces, growth-class fits.
//! - [`cli`]: the `netcon` command line.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod model;
pub mod oracle;
pub mod protocols;
pub mod runner;
pub mod validators;

pub use error::{Error, Result};
