//! Exact sparsity-constrained (L0) linear regression over a network of
//! agents.
//!
//! The centralized problem is ridge-regularized least squares with a hard
//! cardinality bound on the regressor. It is solved in a decentralized way
//! by dual decomposition over a connected communication graph: every agent
//! owns a shard of the data, repeatedly solves a local sparse regression
//! subproblem (a quadratic integer program, handled exactly by outer
//! approximation with a branch-and-bound master), and exchanges regressors
//! and multipliers with its graph neighbors only. Brute-force oracles
//! certify both layers at desk scale.
//!
//! Module map:
//! - [`linalg`]: dense SPD Cholesky kernel and plumbing,
//! - [`datagen`]: synthetic datasets, sharding, and the on-disk format,
//! - [`topology`]: communication graphs and their Laplacians,
//! - [`local_qip`]: the per-agent subproblem and its outer-approximation solver,
//! - [`master`]: exact branch-and-bound for the cutting-plane master problem,
//! - [`sim`]: the synchronous multi-agent dual-ascent simulator,
//! - [`oracle`]: enumeration-based reference solvers used for verification.

pub mod datagen;
pub mod error;
pub mod linalg;
pub mod local_qip;
pub mod master;
pub mod oracle;
pub mod sim;
pub mod support;
pub mod topology;

mod fmt;

pub use error::{Error, Result};
pub use fmt::f64_17;
pub use support::SupportVector;
