//! Simulation primitives: Pauli operators, statevectors, density matrices,
//! gate kernels and Krylov time evolution.

pub mod dense;
pub mod density;
pub mod flipflop;
pub mod gates;
pub mod krylov;
pub mod pauli;
pub mod state;

pub use density::{DensityMatrix, KrausChannel};
pub use krylov::{ExpmStats, DEFAULT_EXPM_TOL};
pub use pauli::{Pauli, PauliOperator, PauliString};
pub use state::StateVector;
