//! Numerical laboratory for criticality-enhanced sensing with a single
//! parametrically driven bosonic mode,
//! `H = ω a†a + (ε/2)(a†² + a²)`, `g = ε/ω`.
//!
//! Three independent engines compute the same physics:
//!
//! * [`model`] and [`metrology`]: closed forms (spectrum, quadrature
//!   dynamics, dynamic and adiabatic QFI, homodyne Fisher information);
//! * [`gaussian`]: exact symplectic propagation of means and covariances;
//! * [`fock`]: a truncated number-basis oracle (diagonalization, evolution,
//!   adiabatic ramps, overlap QFI, fidelity).
//!
//! [`figures`] turns them into deterministic CSV tables, [`fit`] performs
//! the power-law fit of revival maxima and [`verify`] cross-checks the
//! engines against each other.

pub mod config;
pub mod engine;
pub mod error;
pub mod figures;
pub mod fit;
pub mod fock;
pub mod gaussian;
pub mod metrology;
pub mod model;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use model::{make_params, ModelParams};
