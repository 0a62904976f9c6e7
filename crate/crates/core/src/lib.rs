//! Signature-based scoring of time series.
//!
//! Paths are summarised by truncated signatures in the tensor algebra over
//! `R^d`. A loss on the unital slice induces left and right Bayes acts, a
//! proper scoring rule, and from it entropy, divergence and mutual
//! information estimators over empirical measures of paths. DTW and soft-DTW
//! are provided as baselines, together with the simulators and experiment
//! runners used to compare them.
//!
//! Batch work runs on rayon when the `parallel` feature (on by default) is
//! enabled; see [`par::Exec`].

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod io;
pub mod optimize;
pub mod par;
pub mod path;
pub mod scoring;
pub mod stochastic;
pub mod tensor;

pub use error::{Error, Result};
pub use par::Exec;
pub use path::PiecewiseLinearPath;
pub use scoring::{EmpiricalMeasure, ScoringRule, Side};
pub use tensor::TruncatedTensor;
