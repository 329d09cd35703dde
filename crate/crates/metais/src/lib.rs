//! Instance selection via meta-learning.
//!
//! The pipeline: describe every training instance by statistics of its
//! nearest-neighbor lists ([`metafeatures`]), label instances with the
//! keep/remove decisions of a classical selection algorithm ([`isalgos`]),
//! train a random forest on those labels ([`forest`]), and use its keep
//! probabilities — thresholded at a configurable Θ — to prune new datasets
//! orders of magnitude faster than the original algorithms ([`pipeline`]).
//! [`eval`] measures the accuracy/reduction trade-off curves this produces,
//! and [`synth`] generates benchmark datasets.

pub mod dataset;
pub mod error;
pub mod forest;
pub mod isalgos;
pub mod metafeatures;
pub mod nng;
pub mod synth;

pub mod eval;
pub mod pipeline;

pub use error::{Error, Result};
