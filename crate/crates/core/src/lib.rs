//! Multilevel atoms as polarization-dependent scatterers in one-dimensional
//! optical systems.
//!
//! Light is described by Jones vectors in the circular basis, each optical
//! element by a 4x4 transfer tensor (2x2 blocks acting on polarization). An
//! atom's tensor follows from its polarizability, the ground-state
//! expectation value of an operator built from Clebsch-Gordan coefficients.
//! The ground state comes from optical pumping in the low-saturation limit.
//!
//! - [`jones`]: Jones vectors, transfer tensors, two-ports, scattering.
//! - [`atom`]: level schemes, Clebsch-Gordan coefficients, polarizability.
//! - [`bloch`]: steady state of the ground manifold and its lag for moving atoms.
//! - [`force`]: exact and first-order forces, closed forms for the standard
//!   cooling configurations.
//! - [`beams`], [`optics`]: free-space beam pairs, linear elements and
//!   self-consistent systems containing one atom.
//! - [`scan`]: scenario files and CSV force scans.
//!
//! Natural units throughout: `hbar = c = 1`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod beams;
pub mod bloch;
pub mod error;
pub mod force;
pub mod jones;
pub mod optics;
pub mod scan;
