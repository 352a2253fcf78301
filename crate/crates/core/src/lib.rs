//! Transparent nonlinear variable selection.
//!
//! Given a numeric response and a (possibly very wide) predictor matrix, the
//! selector partitions the predictor indices into four disjoint subsets:
//!
//! * `S`  – relevant predictors, chosen by forward selection on the
//!   conditional dependence coefficient (CODEC),
//! * `A1` – uninformative predictors, removed up front by an entropy filter,
//! * `A2` – redundant predictors, removed in batches whenever their
//!   Gram-Schmidt residual against the selected set has too little variance,
//! * `A3` – conditionally independent predictors, whatever is left when the
//!   search stops.
//!
//! The numeric core is generic over the floating point type (see [`Scalar`]);
//! the `*64` / `*32` aliases below fix it to `f64` / `f32`.

// `!(x >= lo)` is used on purpose so that NaN parameters are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod codec;
pub mod data;
pub mod error;
pub mod eval;
pub mod ortho;
pub mod report;
pub mod scalar;
pub mod screening;
pub mod seed;
pub mod selector;
pub mod simgen;

pub use codec::{CodecValue, NeighborBackend, RankData};
pub use data::{load_csv, standardize};
pub use error::{Error, Result};
pub use eval::{EvalReport, Scenario};
pub use scalar::Scalar;
pub use screening::{EntropyScore, Scheme};
pub use selector::{run_selection, Mode, SelectionResult, SelectorConfig, Termination};
pub use simgen::{generate_setting, generate_toy, GroundTruth, SimulationSpec};

pub type Dataset64 = data::Dataset<f64>;
pub type Dataset32 = data::Dataset<f32>;
pub type StandardizedView64 = data::StandardizedView<f64>;
pub type StandardizedView32 = data::StandardizedView<f32>;
pub type OrthoBasis64 = ortho::OrthoBasis<f64>;
pub type OrthoBasis32 = ortho::OrthoBasis<f32>;
