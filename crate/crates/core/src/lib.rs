//! Statevector and density-matrix simulation of variational eigensolvers built
//! on tunable-range waveguide-QED entangling gates.
//!
//! Module map:
//! - [`engine`]: states, Pauli operators, gate kernels, Krylov exponentials.
//! - [`hamiltonians`]: spin models, exact diagonalization, critical points.
//! - [`ansatz`]: parameterized circuits and the power-law exponential fit.
//! - [`vqe`]: cost, finite-difference gradients, Adam, adiabatically assisted VQE.
//! - [`noise`]: amplitude damping + dephasing evaluation and noisy VQE.
//! - [`analysis`]: infidelities, residual energies, depth sweeps, entanglement spectra.
//! - [`harness`]: config-driven experiment runner and report tables.
//!
//! Conventions used everywhere: qubit 0 is the most significant bit of a basis
//! index, `Z|0> = +|0>`, and rotations are `R_a(t) = exp(-i t sigma_a)` with no
//! half angle.

pub mod analysis;
pub mod ansatz;
pub mod engine;
pub mod error;
pub mod hamiltonians;
pub mod harness;
pub mod noise;
pub mod vqe;

pub use error::{Error, Result};
