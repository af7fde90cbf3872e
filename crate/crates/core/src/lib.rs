//! Regularized linear-model losses and a catalog of convex solvers that
//! work on any of them.
//!
//! The crate is layered the same way training proceeds: an [`ml`] task
//! builds a [`losses::RegularizedLoss`] over a [`dataio::Dataset`] and hands
//! it to one of the solvers in [`batch_opt`], [`stochastic_opt`] or
//! [`dual_opt`]. Every solver only sees the [`losses::DifferentiableFunction`]
//! contract (plus the narrower traits some algorithms need), so new losses
//! and new solvers compose without touching each other.

pub mod batch_opt;
pub mod dataio;
pub mod dual_opt;
mod error;
pub mod linalg;
pub mod losses;
pub mod ml;
pub mod stochastic_opt;

pub use error::{Error, Result};
pub use linalg::{DenseVector, SparseExample};
