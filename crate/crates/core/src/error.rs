//! Error type shared by every module of the crate.

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter was outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The operation needs a discrete spectrum (0 <= g < 1).
    #[error("g = {g} is outside the gapped phase 0 <= g < 1: the energy gap vanishes")]
    GaplessPhase { g: f64 },

    /// Population reached the top of the truncated number basis.
    #[error("tail mass {tail_mass:e} above tolerance {tolerance:e} at cutoff {cutoff}")]
    Truncation {
        cutoff: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    /// The ramp integrator lost unitarity beyond the allowed drift.
    #[error("norm drift {drift:e} exceeds {limit:e} after {steps} steps")]
    NormDrift { drift: f64, limit: f64, steps: usize },

    /// Overlap finite difference failed its step-halving consistency check.
    #[error("QFI estimate not converged in step: {coarse} at delta vs {fine} at delta/2")]
    StepTooLarge { coarse: f64, fine: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A power-law fit needs at least three local maxima.
    #[error("power-law fit needs at least 3 points, found {found}")]
    InsufficientMaxima { found: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable machine-readable code, printed by the CLI alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::GaplessPhase { .. } => "gapless_phase",
            Error::Truncation { .. } => "truncation",
            Error::NormDrift { .. } => "norm_drift",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InsufficientMaxima { .. } => "insufficient_maxima",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status: 1 numerical invariant failure, 2 domain error, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Truncation { .. } | Error::NormDrift { .. } | Error::StepTooLarge { .. } => 1,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
