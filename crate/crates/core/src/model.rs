//! Model parameters of the parametrically driven mode
//! `H = ω a†a + (ε/2)(a†² + a²)` and the closed-form spectrum obtained by the
//! squeezing diagonalization.
//!
//! The dimensionless drive ratio `g = ε/ω` is the canonical control
//! parameter; `ω` only sets the energy (and inverse time) scale.

use crate::error::{invalid, Error, Result};

/// Detuning `ω` and drive ratio `g`; the drive strength `ε = g·ω` is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    g: f64,
}

impl ModelParams {
    pub fn new(omega: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid("omega", omega, "must be finite and > 0"));
        }
        if !g.is_finite() {
            return Err(invalid("g", g, "must be finite"));
        }
        Ok(Self { omega, g })
    }

    /// Parameters from an explicit drive strength, `g = ε/ω`.
    pub fn from_drive(omega: f64, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(invalid("epsilon", epsilon, "must be finite"));
        }
        Self::new(omega, epsilon / omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn epsilon(&self) -> f64 {
        self.g * self.omega
    }

    /// Same drive ratio at a different detuning.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega, g)
    }

    /// Errors unless `0 <= g < 1`.
    pub fn require_gapped(&self) -> Result<()> {
        check_gapped(self.g)
    }

    /// `√(1 − g²)`, evaluated as `√((1−g)(1+g))` to keep precision near `g → 1`.
    pub fn gap_factor(&self) -> Result<f64> {
        self.require_gapped()?;
        Ok(((1.0 - self.g) * (1.0 + self.g)).sqrt())
    }

    /// Normal-mode frequency `Ω = ω√(1−g²)`.
    pub fn normal_frequency(&self) -> Result<f64> {
        Ok(self.omega * self.gap_factor()?)
    }
}

/// Shorthand for [`ModelParams::new`].
pub fn make_params(omega: f64, g: f64) -> Result<ModelParams> {
    ModelParams::new(omega, g)
}

pub(crate) fn check_gapped(g: f64) -> Result<()> {
    if g.is_nan() || g >= 1.0 {
        return Err(Error::GaplessPhase { g });
    }
    if g < 0.0 {
        return Err(invalid("g", g, "negative drive ratios are not supported"));
    }
    Ok(())
}

/// Closed-form spectral data of the gapped phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// Level spacing `e_np = ω√(1−g²)`.
    pub excitation_energy: f64,
    /// `E_np = (ω/2)√(1−g²) − ω/2`.
    pub ground_energy: f64,
    /// `r = ¼ ln((1−g)/(1+g))`, non-positive for `g >= 0`.
    pub squeeze_parameter: f64,
}

pub fn spectrum(params: &ModelParams) -> Result<Spectrum> {
    let root = params.gap_factor()?;
    let omega = params.omega();
    Ok(Spectrum {
        excitation_energy: omega * root,
        ground_energy: 0.5 * omega * root - 0.5 * omega,
        squeeze_parameter: squeeze_parameter(params.g())?,
    })
}

/// Squeezing parameter of the ground state, `r(g) = ¼ ln((1−g)/(1+g))`.
pub fn squeeze_parameter(g: f64) -> Result<f64> {
    check_gapped(g)?;
    // ln_1p keeps r accurate for small g.
    Ok(0.25 * ((-g).ln_1p() - g.ln_1p()))
}

/// `E_n = n·e_np + E_np`.
pub fn eigen_energy(params: &ModelParams, n: u32) -> Result<f64> {
    let s = spectrum(params)?;
    Ok(f64::from(n) * s.excitation_energy + s.ground_energy)
}
