//! Complex q-Fourier transform toolkit.
//!
//! The crate implements, numerically:
//!
//! - the deformed exponential kernel and forward transform integrand
//!   ([`qkernel`]);
//! - adaptive complex-valued quadrature on finite and semi-infinite
//!   intervals ([`quad`]);
//! - the Gauss hypergeometric function for complex argument ([`hyp2f1`]);
//! - a catalog of admissible densities centered on the power-law family
//!   whose transform collapses to a single deformed exponential
//!   ([`densities`]);
//! - the forward transform (half-plane split, real-axis full-line form,
//!   diagonal form) and its closed-form evaluations ([`transform`]);
//! - the regularized real-axis inverse and a round-trip driver
//!   ([`inverse`]);
//! - equivalence-class construction with collapse and separation
//!   verification ([`equivalence`]);
//! - the self-test suite and text output formats backing the CLI
//!   ([`selftest`], [`report`], [`cli`]).

// Reference constants (quadrature nodes, frozen oracle values) are kept
// exactly as calibrated, digits and all, rather than trimmed to the
// shortest representation of the same double.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod densities;
pub mod equivalence;
pub mod error;
pub mod hyp2f1;
pub mod inverse;
pub mod qkernel;
pub mod quad;
pub mod report;
pub mod selftest;
pub mod transform;

pub use error::{Error, Result};
pub use qkernel::DeformationParameter;
