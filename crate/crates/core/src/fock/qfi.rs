use num_complex::Complex64;

use super::state::FockVector;
use crate::error::{invalid, Error, Result};

/// Default finite-difference step in the estimated parameter.
pub const DEFAULT_DELTA: f64 = 1e-4;
/// Allowed relative disagreement between the `δ` and `δ/2` estimates.
pub const STEP_CONSISTENCY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiEstimate {
    /// `8(1 − |⟨ψ(θ−δ)|ψ(θ+δ)⟩|)/(2δ)²`.
    pub value: f64,
    /// Same estimate at `δ/2`.
    pub half_step: f64,
}

impl QfiEstimate {
    /// Richardson combination of the two steps; the leading `O(δ²)` bias cancels.
    pub fn extrapolated(&self) -> f64 {
        (4.0 * self.half_step - self.value) / 3.0
    }
}

fn symmetric_overlap<F>(family: &F, theta: f64, delta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockVector>,
{
    let minus = family(theta - delta)?;
    let plus = family(theta + delta)?;
    let overlap = minus.inner(&plus).norm();
    Ok(8.0 * (1.0 - overlap) / (4.0 * delta * delta))
}

/// Quantum Fisher information of a pure-state family from the curvature of
/// the overlap, `I ≈ 8(1 − |⟨ψ(θ−δ)|ψ(θ+δ)⟩|)/(2δ)²`.
///
/// The estimate is repeated at `δ/2`; disagreement above 1% is reported as
/// [`Error::StepTooLarge`].
pub fn qfi_overlap<F>(family: F, theta: f64, delta: f64) -> Result<QfiEstimate>
where
    F: Fn(f64) -> Result<FockVector>,
{
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid("delta", delta, "must be finite and > 0"));
    }
    let value = symmetric_overlap(&family, theta, delta)?;
    let half_step = symmetric_overlap(&family, theta, 0.5 * delta)?;
    let scale = value.abs().max(half_step.abs());
    // Below the rounding floor of the half-step overlap neither estimate is
    // resolved, so there is nothing to compare.
    let floor = 8.0 * 64.0 * f64::EPSILON / (delta * delta);
    if scale > floor && (value - half_step).abs() > STEP_CONSISTENCY * scale {
        return Err(Error::StepTooLarge { coarse: value, fine: half_step });
    }
    Ok(QfiEstimate { value, half_step })
}

/// QFI of a pure-state family with a smooth phase convention,
/// `I = 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)`, with `∂ψ` from a five-point stencil of step
/// `h`.
///
/// Keeps full precision where the overlap estimate loses half its digits,
/// but needs `ψ(θ)` to vary smoothly, global phase included.
pub fn qfi_derivative<F>(family: F, theta: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockVector>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", h, "must be finite and > 0"));
    }
    let psi = family(theta)?;
    let stencil = [
        (family(theta - 2.0 * h)?, 1.0),
        (family(theta - h)?, -8.0),
        (family(theta + h)?, 8.0),
        (family(theta + 2.0 * h)?, -1.0),
    ];
    let n = psi.cutoff();
    if let Some((bad, _)) = stencil.iter().find(|(s, _)| s.cutoff() != n) {
        return Err(Error::DimensionMismatch { left: n, right: bad.cutoff() });
    }
    let mut d = vec![Complex64::default(); n];
    for (state, w) in &stencil {
        for (di, a) in d.iter_mut().zip(state.amps()) {
            *di += a * (w / (12.0 * h));
        }
    }
    let dd: f64 = d.iter().map(|a| a.norm_sqr()).sum();
    let ov: Complex64 = psi.amps().iter().zip(&d).map(|(a, b)| a.conj() * b).sum();
    Ok(4.0 * (dd - ov.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::evolve::Propagator;
    use crate::fock::hamiltonian::FockHamiltonian;
    use crate::fock::state::{coherent_fock, squeezed_vacuum_fock};
    use crate::metrology::qfi_adiabatic_omega;
    use crate::model::{make_params, squeeze_parameter};

    #[test]
    fn constant_family_has_no_information() {
        let q = qfi_overlap(|_| coherent_fock(1.0, 32), 0.3, DEFAULT_DELTA).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn displacement_and_squeezing() {
        let q = qfi_overlap(|a| coherent_fock(a, 64), 1.5, DEFAULT_DELTA).unwrap();
        assert!((q.value - 4.0).abs() < 1e-4);
        let q = qfi_overlap(|r| squeezed_vacuum_fock(r, 128), -0.5, DEFAULT_DELTA).unwrap();
        assert!((q.value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn ground_state_family_in_omega() {
        // fixed ε = 0.5 at ω = 1
        let eps = 0.5;
        let family = |w: f64| {
            let h = FockHamiltonian::with_drive(w, eps, 96)?;
            Ok(Propagator::new(&h).ground_state())
        };
        let q = qfi_overlap(family, 1.0, DEFAULT_DELTA).unwrap();
        let expect = qfi_adiabatic_omega(&make_params(1.0, 0.5).unwrap()).unwrap();
        assert!((q.value - expect).abs() < 5e-3 * expect, "{} vs {expect}", q.value);

        let analytic = |w: f64| squeezed_vacuum_fock(squeeze_parameter(eps / w)?, 96);
        let q = qfi_overlap(analytic, 1.0, DEFAULT_DELTA).unwrap();
        assert!((q.value - expect).abs() < 5e-3 * expect);
    }

    #[test]
    fn step_too_large_detected() {
        // period-scale step on a fast rotation
        let family = |a: f64| coherent_fock(3.0 * a.cos(), 96);
        let r = qfi_overlap(family, 0.7, 0.6);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn derivative_form_matches_overlap() {
        let q = qfi_derivative(|a| coherent_fock(a, 64), 1.5, 1e-3).unwrap();
        assert!((q - 4.0).abs() < 1e-9);
        let q = qfi_derivative(|r| squeezed_vacuum_fock(r, 128), -0.5, 1e-3).unwrap();
        assert!((q - 2.0).abs() < 1e-9);
        // a pure phase carries no information
        let phased = |p: f64| {
            let v = coherent_fock(1.0, 32)?;
            Ok(FockVector::from_raw(v.amps().iter().map(|a| a * Complex64::from_polar(1.0, p)).collect()))
        };
        assert!(qfi_derivative(phased, 0.2, 1e-3).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unresolved_family_is_not_a_step_error() {
        let family = |a: f64| coherent_fock(1.0 + 1e-14 * a, 32);
        assert!(qfi_overlap(family, 0.3, DEFAULT_DELTA).is_ok());
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(qfi_overlap(|a| coherent_fock(a, 16), 1.0, 0.0).is_err());
    }
}
