//! Squirrel-search wrapper feature selection for binary fraud/normal
//! classification.
//!
//! The crate is organized around five pieces:
//!
//! - [`ssa`]: the continuous squirrel search optimizer (population
//!   initialization, tree roles, gliding, seasonal monitoring, Levy
//!   relocation) over a caller-supplied objective.
//! - [`select`]: the binary wrapper that scores feature masks with
//!   `alpha * cv_error + (1 - alpha) * L/A` via cross-validated k-NN,
//!   plus an exhaustive-subset oracle.
//! - [`classify`]: from-scratch KNN, Gaussian naive Bayes, a one-hidden-
//!   layer neural network, and a linear SVM behind one predict contract.
//! - [`metrics`]: confusion-matrix construction and the derived accuracy,
//!   recall, precision and F1 criteria.
//! - [`data`]: CSV ingestion, stratified splitting and k-fold assignment,
//!   and a synthetic imbalanced fraud-data generator.
//!
//! Everything is deterministic under a seed: random decisions draw from
//! substreams derived in [`seeds`], so repeated runs are bit-identical
//! regardless of internal parallelism.

pub mod classify;
pub mod data;
pub mod error;
pub mod metrics;
pub mod seeds;
pub mod select;
pub mod ssa;

pub use error::{Error, Result};
