//! Brute-force oracle on a truncated number basis.
//!
//! Everything here works directly with Fock amplitudes: exact
//! diagonalization of the banded Hamiltonian, fixed-Hamiltonian evolution by
//! eigendecomposition, Runge–Kutta integration of time-dependent ramps,
//! overlap-based QFI and state fidelity. It shares no formulas with the
//! closed forms or the Gaussian engine, which it is used to check.
//!
//! Truncation is never silent: states whose top tenth of the basis holds
//! more than [`TAIL_TOLERANCE`] population are rejected with
//! [`Error::Truncation`](crate::Error::Truncation), and
//! [`converge_cutoff`] doubles the basis until observables stop moving.

mod cutoff;
mod evolve;
mod hamiltonian;
mod moments;
mod qfi;
mod ramp;
mod state;

pub use cutoff::{converge_cutoff, Converged, CutoffPolicy};
pub use evolve::{evolve_fixed, Propagator};
pub use hamiltonian::{build_hamiltonian, FockHamiltonian, MIN_CUTOFF};
pub use moments::{moments_fock, FockMoments};
pub use qfi::{qfi_derivative, qfi_overlap, QfiEstimate, DEFAULT_DELTA, STEP_CONSISTENCY};
pub use ramp::{
    evolve_ramp, integrate_ramp, integrate_ramp_steps, RampRun, RampSchedule, DEFAULT_DT,
    NORM_DRIFT_LIMIT,
};
pub use state::{
    coherent_fock, fidelity, fidelity_padded, squeezed_vacuum_fock, FockVector, NORM_TOLERANCE,
    TAIL_TOLERANCE,
};

pub(crate) use cutoff::scaled_difference;
