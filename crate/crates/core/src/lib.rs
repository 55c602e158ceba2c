//! State-vector simulation of quantum testers for classical probability
//! distributions.
//!
//! The crate is organised bottom-up:
//!
//! - [`statevec`]: dense state vectors over named registers of arbitrary
//!   dimension, register-targeted operators with generic controlled forms,
//!   projectors, measurement and a dense-matrix cross-check path.
//! - [`oracles`]: distributions, purified query-access oracles with a query
//!   ledger, and the encoding unitaries built from them (the copy-sandwich
//!   `Ũ_p`, the closeness unitary, `V_k` and the k-wise Fourier encoder).
//! - [`amplitude_estimation`]: the Grover iterate, phase-estimation based
//!   amplitude estimation and the zero tester.
//! - [`testers`]: tolerant ℓ² closeness, ℓ² / ℓ¹ closeness, ℓ² distance
//!   estimation and k-wise uniformity testing.
//! - [`reference`]: exact classical distances, brute-force Fourier analysis,
//!   instance generators and a sampling baseline.
//! - [`harness`]: seeded, order-stable Monte-Carlo trial execution.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.

pub mod amplitude_estimation;
pub mod error;
pub mod harness;
pub mod ledger;
pub mod oracles;
pub mod par;
pub mod reference;
pub mod statevec;
pub mod testers;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Absolute tolerance for amplitude identities.
pub const AMPLITUDE_TOL: f64 = 1e-10;
/// Tolerance on distribution normalisation.
pub const DISTRIBUTION_TOL: f64 = 1e-9;
