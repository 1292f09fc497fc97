//! Finite-volume multi-particle Anderson Hamiltonians with singular
//! (Bernoulli) disorder, their spectra, and empirical checks of
//! resonance-probability bounds.
//!
//! The modules follow the data flow: [`lattice`] fixes the configuration
//! space and basis, [`randomfield`] samples the potential, [`hamiltonian`]
//! assembles `-Δ + V + hU`, [`spectral`] computes eigenvalues and distances,
//! [`tensor`] checks the non-interacting sum decomposition, [`wegner`]
//! evaluates resonance events and estimates their probabilities, and
//! [`transfer`] estimates 1D Lyapunov exponents. [`experiment`] and
//! [`verify`] drive campaigns and self-checks.

// `!(x <= y)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod lattice;
pub mod oracle;
pub mod randomfield;
pub mod spectral;
pub mod tensor;
pub mod transfer;
pub mod verify;
pub mod wegner;

pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, interaction_sup_norm, InteractionSpec, SymMatrix};
pub use lattice::{enumerate_sites, one_norm, sup_norm, Cube, Site};
pub use randomfield::{sample_field, validate, DistributionSpec, FieldSample, Violation};
pub use spectral::{count_below, dist_to_spectrum, full_spectrum, resolvent_norm, Spectrum};
pub use tensor::{sumset_spectrum, verify_decomposition, SumsetSpectrum};
