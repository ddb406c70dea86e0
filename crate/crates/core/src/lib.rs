//! Rearrangement algorithms for finding dependence structures (discrete
//! copulas) that minimize convex functions of the row sums of a matrix whose
//! columns are fixed margins.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! computation over owned buffers; file formats, the CLI and the parallel
//! benchmark harnesses live in the `blockra-cli` companion crate.
//!
//! Layout:
//!
//! - [`matrix`]: the [`RearrangementMatrix`] model, row sums, objectives and
//!   the countermonotone block rearrangement every algorithm shares.
//! - [`depmeasure`]: Spearman correlation and the partition-averaged
//!   multivariate dependence measure.
//! - [`algorithms`]: the standard RA and the two Block RA variants.
//! - [`oracle`]: exact global minima for small instances.
//! - [`mcmc`]: the Metropolis rearrangement chain with Gumbel ranking
//!   proposals.
//! - [`gof`] and [`targetfit`]: goodness-of-fit distances and fitting a
//!   dependence so a sum of margins matches a target law.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod algorithms;
pub mod depmeasure;
pub mod dist;
mod error;
pub mod fixtures;
pub mod gof;
pub mod matrix;
pub mod mcmc;
pub mod objective;
pub mod oracle;
pub mod partition;
pub mod rank;
pub mod rng;
pub mod stats;
pub mod targetfit;

pub use error::{Error, Result};
pub use matrix::RearrangementMatrix;
pub use objective::Objective;
pub use partition::Partition;
