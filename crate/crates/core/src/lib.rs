//! Measuring how the release of a sample, cover or remix moves search
//! interest in the original song.
//!
//! The crate covers the whole analysis path:
//!
//! - [`catalog`]: the borrowing graph and linking songs to knowledge-base entities,
//! - [`trends`]: monthly search-interest exports and their on-disk cache,
//! - [`series`]: month keys, peak normalization and 24-point event windows,
//! - [`rdd`]: the regression discontinuity fit and its relative ATE,
//! - [`granger`]: nested-autoregression Granger tests,
//! - [`synth`]: planted-truth generators used to validate both estimators,
//! - [`pipeline`]: the batch run that ties everything together.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod catalog;
mod float_serde;
pub mod granger;
pub mod pipeline;
pub mod rdd;
pub mod series;
pub mod stats;
pub mod synth;
pub mod trends;
