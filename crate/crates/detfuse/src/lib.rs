//! Energy-based distributed detection with quantized soft-decision fusion.
//!
//! A network of sensors measures a common scene, each computes the energy
//! of its sample window, quantizes it to the bit budget its reporting
//! channel supports, and a fusion center combines the reports into one
//! detection decision. This crate provides:
//!
//! * the network/scenario model and measurement simulation ([`model`]);
//! * channel-capacity bit budgets and quantizer models ([`quant`]);
//! * the fusion rules — likelihood-derived quadratic, high-SNR weighted,
//!   equal-weight, and linear combiners, with quantized variants
//!   ([`fusion`]);
//! * closed-form Gaussian moment/threshold/ROC analysis ([`analytics`]);
//! * Monte Carlo ground truth with reproducible parallel trials ([`mc`]);
//! * transmit-power and bit allocation by branch and bound ([`power`]);
//! * experiment orchestration with CSV/manifest output ([`experiments`],
//!   [`export`]).
//!
//! Everything is deterministic given the configured seeds, independent of
//! thread count.

// `!(x > 0.0)`-style guards deliberately reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod export;
pub mod fusion;
pub mod mc;
pub mod model;
pub mod power;
pub mod quant;
pub mod rng;
pub mod special;

pub use error::{Error, Result};

/// Toolkit version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
