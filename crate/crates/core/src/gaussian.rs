//! Phase-space engine: exact propagation of single-mode Gaussian states under
//! the quadratic Hamiltonian.
//!
//! In quadratures `X = (a+a†)/√2`, `P = i(a†−a)/√2` the Hamiltonian reads
//! `((ω+ε)/2)X² + ((ω−ε)/2)P² − ω/2`, so Heisenberg's equations are linear:
//! `d(X,P)/dt = A·(X,P)` with `A = [[0, ω−ε], [−(ω+ε), 0]]`. Means transform
//! with `S(t) = exp(At)` and covariances with `S·Σ·Sᵀ`. `S(t)` is taken in
//! closed form for each regime (elliptic, parabolic, hyperbolic), so the
//! engine carries no integration error.
//!
//! Covariances use the symmetrized convention `Σ_QR = ⟨QR+RQ⟩/2 − ⟨Q⟩⟨R⟩`;
//! the vacuum has `Σ = I/2`.

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix2, Vector2};

use crate::error::{invalid, Result};
use crate::model::ModelParams;

const SYMMETRY_TOL: f64 = 1e-12;
const UNCERTAINTY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    mean: Vector2<f64>,
    cov: Matrix2<f64>,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty relation `det Σ >= 1/4`.
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        if !(mean.iter().all(|v| v.is_finite()) && cov.iter().all(|v| v.is_finite())) {
            return Err(invalid("gaussian state", f64::NAN, "non-finite entries"));
        }
        let scale = cov.amax().max(1.0);
        let asym = (cov[(0, 1)] - cov[(1, 0)]).abs();
        if asym > SYMMETRY_TOL * scale {
            return Err(invalid("covariance asymmetry", asym, "covariance must be symmetric"));
        }
        let det = cov.determinant();
        if det < 0.25 - UNCERTAINTY_TOL * scale * scale {
            return Err(invalid("covariance determinant", det, "violates det >= 1/4"));
        }
        Ok(Self { mean, cov })
    }

    pub fn mean(&self) -> Vector2<f64> {
        self.mean
    }

    pub fn cov(&self) -> Matrix2<f64> {
        self.cov
    }

    /// `det Σ`; equals 1/4 for pure states.
    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.det() - 0.25).abs() <= tol
    }
}

/// Coherent state `|α⟩` for real `α >= 0`: mean `(√2α, 0)`, covariance `I/2`.
pub fn coherent_gaussian(alpha: f64) -> Result<GaussianState> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid("alpha", alpha, "must be finite and >= 0"));
    }
    Ok(GaussianState {
        mean: Vector2::new(SQRT_2 * alpha, 0.0),
        cov: Matrix2::from_diagonal_element(0.5),
    })
}

/// Squeezed vacuum `S(r)|0⟩`: covariance `diag(e^{2r}, e^{−2r})/2`.
pub fn squeezed_vacuum_gaussian(r: f64) -> Result<GaussianState> {
    if !r.is_finite() {
        return Err(invalid("r", r, "must be finite"));
    }
    Ok(GaussianState {
        mean: Vector2::zeros(),
        cov: Matrix2::new(0.5 * (2.0 * r).exp(), 0.0, 0.0, 0.5 * (-2.0 * r).exp()),
    })
}

/// Symplectic flow `S(t) = exp(At)` of the quadratic Hamiltonian.
///
/// Valid for any real `g`; the regime is selected by the sign of
/// `ω²(1 − g²)`, with the exact linear form at `g = ±1`.
pub fn symplectic_flow(params: &ModelParams, t: f64) -> Result<Matrix2<f64>> {
    if !t.is_finite() {
        return Err(invalid("t", t, "must be finite"));
    }
    let omega = params.omega();
    let eps = params.epsilon();
    let g = params.g();
    let upper = omega - eps;
    let lower = -(omega + eps);
    let freq_sq = omega * omega * (1.0 - g) * (1.0 + g);
    let (diag, sin_over) = if freq_sq > 0.0 {
        let w = freq_sq.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else if freq_sq < 0.0 {
        let k = (-freq_sq).sqrt();
        ((k * t).cosh(), (k * t).sinh() / k)
    } else {
        (1.0, t)
    };
    Ok(Matrix2::new(diag, upper * sin_over, lower * sin_over, diag))
}

/// Evolves `state` for time `t` under the Hamiltonian set by `params`.
pub fn propagate(params: &ModelParams, state: &GaussianState, t: f64) -> Result<GaussianState> {
    let s = symplectic_flow(params, t)?;
    let cov = s * state.cov * s.transpose();
    // Re-symmetrize: the product is symmetric only up to rounding.
    let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    Ok(GaussianState {
        mean: s * state.mean,
        cov: Matrix2::new(cov[(0, 0)], off, off, cov[(1, 1)]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `Var(X²)`.
    pub var_x2: f64,
    /// `Var(P²)`.
    pub var_p2: f64,
}

/// `Var(Q²) = 2σ⁴ + 4μ²σ²` for a Gaussian quadrature with mean `μ`, variance `σ²`.
pub fn gaussian_square_variance(mean: f64, var: f64) -> f64 {
    2.0 * var * var + 4.0 * mean * mean * var
}

pub fn quadrature_moments(state: &GaussianState) -> QuadratureMoments {
    let (mx, mp) = (state.mean[0], state.mean[1]);
    let (vx, vp) = (state.cov[(0, 0)], state.cov[(1, 1)]);
    QuadratureMoments {
        mean_x: mx,
        mean_p: mp,
        var_x: vx,
        var_p: vp,
        var_x2: gaussian_square_variance(mx, vx),
        var_p2: gaussian_square_variance(mp, vp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedSquareMoment {
    /// `⟨X_φ²⟩`.
    pub mean_sq: f64,
    /// `Var(X_φ²)`.
    pub var_of_sq: f64,
}

/// Moments of `X_φ²` for `X_φ = cos φ·X + sin φ·P`.
pub fn rotated_quadrature_moment(state: &GaussianState, phi: f64) -> RotatedSquareMoment {
    let (s, c) = phi.sin_cos();
    let mean = c * state.mean[0] + s * state.mean[1];
    let var =
        c * c * state.cov[(0, 0)] + 2.0 * c * s * state.cov[(0, 1)] + s * s * state.cov[(1, 1)];
    RotatedSquareMoment {
        mean_sq: var + mean * mean,
        var_of_sq: gaussian_square_variance(mean, var),
    }
}

/// Fidelity `|⟨ψ|φ⟩|²` between two pure Gaussian states.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> f64 {
    let sum = a.cov + b.cov;
    let d = a.mean - b.mean;
    let det = sum.determinant();
    let inv = sum.try_inverse().expect("sum of covariances is positive definite");
    (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / det.sqrt()
}

/// QFI of a pure Gaussian family `θ ↦ state(θ)`:
/// `I = ∂μᵀ Σ⁻¹ ∂μ + ¼ Tr[(Σ⁻¹ ∂Σ)²]`, derivatives by central differences
/// with step `h`.
pub fn qfi_gaussian<F>(family: F, theta: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<GaussianState>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", h, "step must be finite and > 0"));
    }
    let centre = family(theta)?;
    let plus = family(theta + h)?;
    let minus = family(theta - h)?;
    let dmean = (plus.mean - minus.mean) / (2.0 * h);
    let dcov = (plus.cov - minus.cov) / (2.0 * h);
    let inv = centre
        .cov
        .try_inverse()
        .ok_or_else(|| invalid("covariance", centre.det(), "singular covariance"))?;
    let m = inv * dcov;
    Ok((dmean.transpose() * inv * dmean)[(0, 0)] + 0.25 * (m * m).trace())
}
