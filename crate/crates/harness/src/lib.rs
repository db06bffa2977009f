//! Experiment orchestration for the ATP learner: simulated children,
//! developmental curves, Wug tests and tree export.
//!
//! Every experiment is a pure function of its inputs and a master seed.
//! Child `i` draws its vocabulary with the seed
//! [`derive_seed(master, i)`](atp_core::corpus::derive_seed), children run
//! on a rayon pool, and results are sorted before they are written, so the
//! output does not depend on the worker count.

pub mod acquisition;
pub mod error;
pub mod experiment;
pub mod export;
pub mod fixtures;
pub mod growth;
pub mod tables;
pub mod wug;

pub use error::{HarnessError, Result};
pub use experiment::{Child, ExperimentSpec};
