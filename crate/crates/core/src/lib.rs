//! Moment dynamics, memory decoherence time and decoherence-time
//! optimisation for open quantum systems whose variables close under
//! multiplication, `X X^T = α + β · X`.
//!
//! Modules, bottom-up:
//!
//! - [`algebra`]: structure constants, the section products `·` and `⋄`, `℧`.
//! - [`oracle`]: explicit matrix representations used as ground truth.
//! - [`model`]: QSDE coefficients `A`, `b`, `C`, `d`, the Ito matrix and `Λ`.
//! - [`moments`]: mean, noise covariance, mean-square deviation `Δ(t)`.
//! - [`decoherence`]: the decoherence time `τ(ε)` and its quadratic expansion.
//! - [`energy`]: optimal energy vector from `2RE + K = 0`.
//! - [`interconnect`]: two systems with direct energy coupling.
//! - [`config`] / [`cli`]: JSON run configurations and command dispatch.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod config;
pub mod decoherence;
pub mod energy;
pub mod error;
pub mod interconnect;
pub mod linalg;
pub mod model;
pub mod moments;
pub mod oracle;

pub use error::{Error, Result};
