//! Quantum and mean-field dynamics of two coupled van der Pol oscillators
//! driven by a squeezing Hamiltonian.
//!
//! The crate is organized bottom-up:
//!
//! - [`fock`]: dense operators on truncated Fock spaces.
//! - [`liouvillian`]: Hamiltonians and sparse Lindblad superoperators.
//! - [`steadystate`]: the stationary density matrix of a Liouvillian.
//! - [`observables`]: reduced states, Wigner functions, phase-space symmetry.
//! - [`spectrum`]: two-time correlations and power spectra.
//! - [`classical`]: amplitude/phase mean-field equations and bifurcations.
//! - [`scenario`]: config-driven pipelines, data files and run manifests.

pub mod classical;
pub mod error;
pub mod fock;
pub mod liouvillian;
pub mod observables;
pub mod scenario;
pub mod sparse;
pub mod spectrum;
pub mod steadystate;
pub mod svg;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockDim, Operator, C64};
pub use liouvillian::{build_liouvillian, CouplingKind, Liouvillian, SystemSpec};
