//! Desk-scale dynamics of the unstable Lee model.
//!
//! The crate reproduces, on a discretized momentum grid, the intrinsic
//! dissipation of a V particle coupled to an Nθ continuum:
//!
//! - [`model`]: parameters, dispersion, cutoff function, and the shared
//!   momentum grid;
//! - [`spectral`]: the one-loop self-energy, in-in kernels D/B/A, mass and
//!   wave-function renormalization, and the complex pole (mass + width);
//! - [`sector`]: the exactly diagonalizable single-excitation sector used
//!   as ground truth for the pole, the lifetime, and finite-size revivals;
//! - [`master`]: the operator-form Pauli equation with the decoherence
//!   double commutator, trace conservation, and monotone linear entropy;
//! - [`langevin`]: the complex-amplitude Langevin process whose friction
//!   and noise are both fixed by the local kernels.

pub mod error;
pub mod fit;
pub mod langevin;
pub mod master;
pub mod model;
pub mod sector;
pub mod spectral;

pub use error::{Error, Result};
