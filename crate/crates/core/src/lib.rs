//! Bose-Josephson junction dynamics and Leggett-Garg tests by exact
//! diagonalization.
//!
//! `N` bosons in a double well are described by the two-mode Hamiltonian
//! `H = -J S_x + (U/N) S_z^2`. The crate builds that Hamiltonian in the Fock
//! basis, diagonalizes it, and evaluates the three two-time correlators of
//! the dichotomic observable `Q = sgn(S_z)` with projective, number-resolving
//! measurements, together with the closed-form non-interacting solution and
//! the strong-coupling two-mode (NOON) regime.
//!
//! Every type is generic over the scalar (`f32` or `f64`, see [`Real`]);
//! double-precision aliases are exported at the crate root.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod lgi;
pub mod measurement;
pub mod model;
pub mod rabi;
pub mod scalar;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use lgi::{LgPoint, ScanAxis, ScanGrid, UncollapsedModel};
pub use model::{build_hamiltonian, fock_state, HamiltonianMatrix, ModelParams, QuantumState};
pub use scalar::Real;
pub use spectral::{diagonalize, Parity, Spectrum};

pub type ModelParams64 = ModelParams<f64>;
pub type QuantumState64 = QuantumState<f64>;
pub type HamiltonianMatrix64 = HamiltonianMatrix<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type LgPoint64 = LgPoint<f64>;
pub type ScanGrid64 = ScanGrid<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type Spectrum32 = Spectrum<f32>;
