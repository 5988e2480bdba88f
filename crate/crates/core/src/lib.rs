//! Combinatorial Lipschitz bandits for budgeted patrol effort.
//!
//! Targets receive effort from a shared budget each round; detections
//! are Bernoulli with a piecewise-linear, monotone success curve per
//! target. [`policy::Lizard`] shares information across effort levels and
//! across similar targets, then allocates effort with an exact knapsack.

pub mod bandit;
pub mod env;
pub mod error;
pub mod harness;
pub mod instance;
pub mod mckp;
pub mod policy;
pub mod reward;

pub use error::{Error, Result};
