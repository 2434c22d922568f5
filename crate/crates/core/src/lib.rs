//! Network motif moments as noisy U-statistics: estimation, empirical
//! Edgeworth expansions, Cornish-Fisher intervals and tests, bootstrap
//! baselines, and simulation harnesses.

// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bootstrap;
pub mod edgeworth;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod harness;
pub mod inference;
pub mod moments;
pub mod motif;
pub mod normal;
pub mod rng;

pub use error::{Error, Result};
pub use graph::AdjacencyMatrix;
pub use graphon::{Graphon, RhoSpec};
pub use moments::{compute_stats, MomentStats};
pub use motif::Motif;
