//! Purity and dimension tests on conditionals `P(Y|X)` for a discrete `X`.
//!
//! A pure conditional points to a direct influence of `X` on `Y`; an impure
//! one, or a low-dimensional span of the conditionals, points to a hidden
//! common cause with few values.
//!
//! ```
//! use purity_lens::{purity_ratio, GroupedSamples};
//!
//! let data = GroupedSamples::from_pairs([
//!     ("a", 0.1), ("a", -0.4), ("a", 0.3), ("a", 0.0),
//!     ("b", 5.2), ("b", 4.7), ("b", 5.0), ("b", 5.4),
//! ])?;
//! let report = purity_ratio(&data, 201, 0.1)?;
//! assert!(report.is_pure);
//! # Ok::<(), purity_lens::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dimension;
pub mod error;
pub mod kde;
pub mod linalg;
pub mod parallel;
pub mod purity;
pub mod reconstruct;
pub mod report;
pub mod samples;
pub mod seed;
pub mod simulate;

pub use dimension::{estimate_dimension, estimate_rank, gram_matrix, GramMatrix, RankEstimate};
pub use error::{Error, Result};
pub use kde::{estimate_densities, DensityGrid};
pub use parallel::Execution;
pub use purity::{
    discrete_kwise_pure_bruteforce, discrete_pairwise_pure, purity_ratio, sperner_m, DiscreteConditional, PurityReport,
};
pub use reconstruct::{reconstruct_binary_cause, ReconstructOptions, ReconstructionResult};
pub use samples::GroupedSamples;
