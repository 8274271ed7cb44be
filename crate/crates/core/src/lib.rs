//! Exhaustive ground truth for statistics of small simple graphs.
//!
//! The crate enumerates every non-isomorphic graph up to a modest order,
//! computes a fixed vector of structural statistics for each, persists the
//! result as an atlas, and compares samples from random graph models
//! against that ground truth.

pub mod analysis;
pub mod atlas;
pub mod canon;
pub mod enumerate;
pub mod error;
pub mod finder;
pub mod generators;
pub mod graph;
pub mod stats;

pub use canon::{are_isomorphic, canonical_form, canonical_labeling, certificate, Certificate};
pub use error::{Error, Result};
pub use graph::{pair_count, Graph, MAX_ORDER};
pub use stats::{stat_vector, NormalizedStatVector, StatVector, Statistic};
