//! Matrix-product-state simulation of quantum circuits.
//!
//! Two engines share one MPS representation:
//!
//! * [`tebd`] applies every two-qubit gate by contracting it into a pair of
//!   neighbouring tensors and splitting the result with a truncated SVD.
//!   Long-range gates are routed through a SWAP network.
//! * [`tdvp`] interprets each two-qubit gate `g = exp(-iH)` as one unit time
//!   step of evolution under its product-form generator `H` and integrates it
//!   with a two-site TDVP sweep restricted to a small window around the gate.
//!   Long-range gates need no SWAPs.
//!
//! [`oracle`] is a dense state-vector reference used by the tests and the
//! `verify` command, and [`circuits`] provides the benchmark circuit families
//! together with the JSON circuit format.
//!
//! Site and qubit indices are 1-based in every public interface.

pub mod circuits;
pub mod engine;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod metrics;
pub mod mps;
pub mod oracle;
pub mod tdvp;
pub mod tebd;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
