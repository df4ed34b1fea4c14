//! Closed-form metrology of the driven mode.
//!
//! Dynamic protocol: a coherent state `|α⟩` evolves under a fixed `H(g)`; the
//! quadrature `P` is the sensing indicator for `g`. Adiabatic protocol: the
//! squeezed-vacuum ground state carries information on `ω`, read out by
//! homodyne detection of a rotated quadrature.
//!
//! Derivatives with respect to `g` are taken at fixed `ω` and `t`.
//! Derivatives with respect to `ω` are taken at fixed drive strength `ε`, so
//! `∂_ω g = −g/ω` and `∂_ω r = g / (2ω(1−g²))`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Result};
use crate::gaussian::{rotated_quadrature_moment, squeezed_vacuum_gaussian};
use crate::model::{check_gapped, squeeze_parameter, ModelParams};

/// Below this value of `√Λ·t` the QFI bracket switches to its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// A coherent-state probe for the dynamic protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicProbe {
    pub params: ModelParams,
    pub alpha: f64,
    /// `Λ = 4ω²(1−g²)`; positive only in the gapped phase.
    pub lambda: f64,
    /// `Var(X²)` of the initial coherent state, `4α² + 1/2`.
    pub var_x2_initial: f64,
}

impl DynamicProbe {
    pub fn new(params: ModelParams, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("alpha", alpha, "must be finite and >= 0"));
        }
        let (omega, g) = (params.omega(), params.g());
        Ok(Self {
            params,
            alpha,
            lambda: 4.0 * omega * omega * (1.0 - g) * (1.0 + g),
            var_x2_initial: 4.0 * alpha * alpha + 0.5,
        })
    }

    fn omega(&self) -> f64 {
        self.params.omega()
    }

    fn g(&self) -> f64 {
        self.params.g()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(invalid("t", t, "must be finite and >= 0"))
    }
}

/// `(x − sin x)/x³`, with a series for small `x`.
fn cubic_defect(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0
    } else {
        (x - x.sin()) / (x * x * x)
    }
}

/// Dynamic QFI for `g`:
/// `16ω⁶(1+g)²·[sin(√Λt) − √Λt]²/Λ³ · Var(X²)`.
///
/// Evaluated as `16ω⁶(1+g)² t⁶ h(√Λt)² Var(X²)` with `h(x) = (x − sin x)/x³`,
/// which removes the cancellation at small `√Λt`.
pub fn qfi_dynamic(probe: &DynamicProbe, t: f64) -> Result<f64> {
    probe.params.require_gapped()?;
    check_time(t)?;
    let w = probe.omega();
    let g = probe.g();
    let h = cubic_defect(probe.lambda.sqrt() * t);
    let t3 = t * t * t;
    let w3 = w * w * w;
    Ok(16.0 * (w3 * (1.0 + g) * t3 * h).powi(2) * probe.var_x2_initial)
}

/// `⟨P⟩_t = −√2 α (1+g)/√(1−g²) · sin(ωt√(1−g²))`.
pub fn mean_p(probe: &DynamicProbe, t: f64) -> Result<f64> {
    let root = probe.params.gap_factor()?;
    let g = probe.g();
    let amp = ((1.0 + g) / (1.0 - g)).sqrt();
    Ok(-SQRT_2 * probe.alpha * amp * (probe.omega() * root * t).sin())
}

/// `(ΔP)²_t = ½cos²(Ωt) + (1+g)/(2(1−g))·sin²(Ωt)`.
pub fn var_p(probe: &DynamicProbe, t: f64) -> Result<f64> {
    let root = probe.params.gap_factor()?;
    let g = probe.g();
    let (s, c) = (probe.omega() * root * t).sin_cos();
    Ok(0.5 * c * c + (1.0 + g) / (2.0 * (1.0 - g)) * s * s)
}

/// Susceptibility `χ_g = ∂⟨P⟩/∂g` at fixed `ω` and `t`.
pub fn susceptibility(probe: &DynamicProbe, t: f64) -> Result<f64> {
    let root = probe.params.gap_factor()?;
    let g = probe.g();
    let w = probe.omega();
    let amp = ((1.0 + g) / (1.0 - g)).sqrt();
    let (s, c) = (w * root * t).sin_cos();
    // d amp/dg = amp/(1−g²); dΩ/dg = −ωg/√(1−g²)
    let one_minus_sq = (1.0 - g) * (1.0 + g);
    Ok(-SQRT_2 * probe.alpha * amp * (s / one_minus_sq - c * w * g * t / root))
}

/// Inverted variance `V_g = χ_g²/(ΔP)²`.
pub fn inverted_variance(probe: &DynamicProbe, t: f64) -> Result<f64> {
    let chi = susceptibility(probe, t)?;
    Ok(chi * chi / var_p(probe, t)?)
}

/// A revival time `T_n = nπ/(ω√(1−g²))`, `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalIndex {
    pub n: u32,
    pub time: f64,
}

pub fn revival_time(params: &ModelParams, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", 0.0, "revival index starts at 1"));
    }
    Ok(f64::from(n) * PI / params.normal_frequency()?)
}

pub fn revival_times(params: &ModelParams, n_max: u32) -> Result<Vec<RevivalIndex>> {
    if n_max == 0 {
        return Err(invalid("n_max", 0.0, "must be >= 1"));
    }
    (1..=n_max)
        .map(|n| Ok(RevivalIndex { n, time: revival_time(params, n)? }))
        .collect()
}

/// Local maximum of the inverted variance at `T_n`:
/// `4n²π²α² g²/((1+g)(1−g)³)`.
pub fn revival_maximum(probe: &DynamicProbe, n: u32) -> Result<f64> {
    check_gapped(probe.g())?;
    let g = probe.g();
    let nf = f64::from(n);
    Ok(4.0 * (nf * PI * probe.alpha * g).powi(2) / ((1.0 + g) * (1.0 - g).powi(3)))
}

/// `V(T_n)/I(T_n) = 4α²g²/(4α² + 1/2)`, independent of `n`.
pub fn revival_ratio(alpha: f64, g: f64) -> f64 {
    let a2 = alpha * alpha;
    4.0 * a2 * g * g / (4.0 * a2 + 0.5)
}

/// Adiabatic QFI for `ω`: `g²/(2ω²(1+g)²(1−g)²)`.
pub fn qfi_adiabatic_omega(params: &ModelParams) -> Result<f64> {
    let w = params.omega();
    Ok(snr_omega(params)? / (w * w))
}

/// Signal-to-noise bound `Q_ω = ω²·I_ω = g²/(2(1+g)²(1−g)²)`.
pub fn snr_omega(params: &ModelParams) -> Result<f64> {
    let g = params.g();
    check_gapped(g)?;
    let d = (1.0 + g) * (1.0 - g);
    Ok(g * g / (2.0 * d * d))
}

/// `∂_ω r` at fixed `ε`.
pub fn squeeze_rate_omega(params: &ModelParams) -> Result<f64> {
    let g = params.g();
    check_gapped(g)?;
    Ok(g / (2.0 * params.omega() * (1.0 - g) * (1.0 + g)))
}

/// `f(φ) = [cos²φ e^{2r} − sin²φ e^{−2r}]² / [cos²φ e^{2r} + sin²φ e^{−2r}]²`.
pub fn homodyne_factor(r: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let a = c * c * (2.0 * r).exp();
    let b = s * s * (-2.0 * r).exp();
    ((a - b) / (a + b)).powi(2)
}

/// Homodyne Fisher information `|∂_ω⟨X_φ²⟩|²/Var(X_φ²)` on the squeezed-vacuum
/// ground state.
///
/// The moments come from the Gaussian engine; `∂_ω` is the chain rule through
/// `r`, using `∂_r Σ = 2·diag(Σ_XX, −Σ_PP)` for the squeezed vacuum.
pub fn homodyne_fisher(params: &ModelParams, phi: f64) -> Result<f64> {
    let r = squeeze_parameter(params.g())?;
    let dr = squeeze_rate_omega(params)?;
    let state = squeezed_vacuum_gaussian(r)?;
    let moment = rotated_quadrature_moment(&state, phi);
    let (s, c) = phi.sin_cos();
    let cov = state.cov();
    let d_mean_sq = 2.0 * (c * c * cov[(0, 0)] - s * s * cov[(1, 1)]) * dr;
    Ok(d_mean_sq * d_mean_sq / moment.var_of_sq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneOptimum {
    pub fisher: f64,
    /// Optimal quadrature angle; `0` by convention (`π/2` ties).
    pub phi: f64,
}

/// `F_ω = max_φ P_ω[X_φ²]`. The maximum `f = 1` is reached at both pure
/// quadratures; the smaller angle is reported.
pub fn homodyne_fisher_max(params: &ModelParams) -> Result<HomodyneOptimum> {
    let at_x = homodyne_fisher(params, 0.0)?;
    let at_p = homodyne_fisher(params, 0.5 * PI)?;
    // φ = π/2 only when it wins by more than rounding
    Ok(if at_p > at_x * (1.0 + 1e-12) {
        HomodyneOptimum { fisher: at_p, phi: 0.5 * PI }
    } else {
        HomodyneOptimum { fisher: at_x, phi: 0.0 }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::make_params;

    fn probe(g: f64, alpha: f64) -> DynamicProbe {
        DynamicProbe::new(make_params(1.0, g).unwrap(), alpha).unwrap()
    }

    fn assert_rel(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * b.abs(), "{a} vs {b}");
    }

    // Direct transcription of the bracket form, used as the reference.
    fn qfi_reference(p: &DynamicProbe, t: f64) -> f64 {
        let x = p.lambda.sqrt() * t;
        let g = p.params.g();
        16.0 * (1.0 + g).powi(2) * (x.sin() - x).powi(2) / p.lambda.powi(3) * p.var_x2_initial
    }

    fn mean_p_fd(p: &DynamicProbe, t: f64, h: f64) -> f64 {
        let up = DynamicProbe::new(p.params.with_g(p.params.g() + h).unwrap(), p.alpha).unwrap();
        let dn = DynamicProbe::new(p.params.with_g(p.params.g() - h).unwrap(), p.alpha).unwrap();
        (mean_p(&up, t).unwrap() - mean_p(&dn, t).unwrap()) / (2.0 * h)
    }

    #[test]
    fn probe_invariants() {
        let p = probe(0.6, 2.0);
        assert_rel(p.lambda, 4.0 * 0.64, 1e-15);
        assert_eq!(p.var_x2_initial, 16.5);
        assert!(DynamicProbe::new(make_params(1.0, 0.5).unwrap(), -1.0).is_err());
    }

    #[test]
    fn qfi_examples() {
        let p = probe(0.96, 1.0);
        assert_eq!(qfi_dynamic(&p, 0.0).unwrap(), 0.0);
        let t1 = PI / 0.28;
        let expected = 16.0 * 1.96f64.powi(2) * (2.0 * PI).powi(2) / 0.3136f64.powi(3) * 4.5;
        assert_rel(qfi_dynamic(&p, t1).unwrap(), expected, 1e-12);
        assert_rel(qfi_dynamic(&p, t1).unwrap(), 3.5406e5, 1e-4);
        assert_rel(qfi_dynamic(&p, 2.0 * t1).unwrap() / qfi_dynamic(&p, t1).unwrap(), 4.0, 1e-12);
    }

    #[test]
    fn qfi_matches_bracket_form_away_from_zero() {
        for g in [0.3, 0.9, 0.99] {
            let p = probe(g, 1.5);
            for t in [0.1, 1.0, 7.3, 40.0] {
                assert_rel(qfi_dynamic(&p, t).unwrap(), qfi_reference(&p, t), 1e-9);
            }
        }
    }

    #[test]
    fn qfi_series_branch_is_continuous() {
        let p = probe(0.5, 1.0);
        let x0 = SERIES_THRESHOLD / p.lambda.sqrt();
        let below = qfi_dynamic(&p, x0 * (1.0 - 1e-9)).unwrap();
        let above = qfi_dynamic(&p, x0 * (1.0 + 1e-9)).unwrap();
        assert_rel(below, above, 1e-6);
        // leading order t⁶/36·16ω⁶(1+g)²·δ
        let t = 1e-5;
        assert_rel(qfi_dynamic(&p, t).unwrap(), 16.0 * 2.25 * t.powi(6) / 36.0 * 4.5, 1e-8);
    }

    #[test]
    fn quadrature_examples() {
        let p = probe(0.5, 1.0);
        assert_eq!(mean_p(&p, 0.0).unwrap(), 0.0);
        assert_eq!(var_p(&p, 0.0).unwrap(), 0.5);
        let t = 0.5 * PI / 0.75f64.sqrt();
        assert_rel(mean_p(&p, t).unwrap(), -2.44949, 1e-5);
        assert_rel(var_p(&p, t).unwrap(), 1.5, 1e-12);
        for n in 1..5 {
            let tn = revival_time(&p.params, n).unwrap();
            assert!(mean_p(&p, tn).unwrap().abs() < 1e-12);
            assert_rel(var_p(&p, tn).unwrap(), 0.5, 1e-12);
        }
    }

    #[test]
    fn gapless_errors() {
        let p = DynamicProbe::new(make_params(1.0, 1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(qfi_dynamic(&p, 1.0), Err(Error::GaplessPhase { .. })));
        assert!(matches!(mean_p(&p, 1.0), Err(Error::GaplessPhase { .. })));
        assert!(matches!(var_p(&p, 1.0), Err(Error::GaplessPhase { .. })));
        assert!(matches!(susceptibility(&p, 1.0), Err(Error::GaplessPhase { .. })));
        assert!(matches!(inverted_variance(&p, 1.0), Err(Error::GaplessPhase { .. })));
        assert!(matches!(revival_times(&p.params, 3), Err(Error::GaplessPhase { .. })));
        assert!(matches!(snr_omega(&p.params), Err(Error::GaplessPhase { .. })));
        assert!(matches!(homodyne_fisher(&p.params, 0.0), Err(Error::GaplessPhase { .. })));
    }

    #[test]
    fn susceptibility_examples() {
        assert_eq!(susceptibility(&probe(0.7, 1.0), 0.0).unwrap(), 0.0);

        let p = probe(0.96, 1.0);
        let t1 = revival_time(&p.params, 1).unwrap();
        let chi = susceptibility(&p, t1).unwrap();
        assert_rel(chi, mean_p_fd(&p, t1, 1e-6), 1e-5);
        // sign (−1)^n at T_n
        assert!(chi < 0.0);
        assert_rel(chi.abs(), SQRT_2 * 0.96 * PI * 1.96 / 0.0784f64.powf(1.5), 1e-12);
        assert_rel(chi.abs(), 380.8185, 1e-6);

        let p = probe(0.5, 1.0);
        let t2 = revival_time(&p.params, 2).unwrap();
        let chi = susceptibility(&p, t2).unwrap();
        assert!(chi > 0.0);
        assert_rel(chi, mean_p_fd(&p, t2, 1e-6), 1e-5);
        assert_rel(chi, SQRT_2 * 0.5 * 2.0 * PI * 1.5 / 0.75f64.powf(1.5), 1e-12);
    }

    #[test]
    fn inverted_variance_examples() {
        let p = probe(0.96, 1.0);
        assert_eq!(inverted_variance(&p, 0.0).unwrap(), 0.0);
        let t1 = revival_time(&p.params, 1).unwrap();
        let v = inverted_variance(&p, t1).unwrap();
        assert_rel(v, 4.0 * PI * PI * 0.9216 / (1.96 * 0.04f64.powi(3)), 1e-9);
        assert_rel(v, 2.9007e5, 1e-4);
        let ratio = v / qfi_dynamic(&p, t1).unwrap();
        assert_rel(ratio, revival_ratio(1.0, 0.96), 1e-9);
        assert_rel(ratio, 0.8192, 1e-12);
    }

    #[test]
    fn revival_examples() {
        let t = revival_times(&make_params(1.0, 0.0).unwrap(), 4).unwrap();
        for r in &t {
            assert_rel(r.time, f64::from(r.n) * PI, 1e-15);
        }
        let t = revival_times(&make_params(1.0, 0.96).unwrap(), 2).unwrap();
        assert_rel(t[0].time, 11.21997, 1e-6);
        // 2π/√Λ coincides with T₁
        let p = probe(0.96, 1.0);
        assert_rel(2.0 * PI / p.lambda.sqrt(), t[0].time, 1e-14);
        assert!(revival_times(&p.params, 0).is_err());
    }

    #[test]
    fn revival_maxima_match_closed_form() {
        for g in [0.5, 0.92, 0.96] {
            let p = probe(g, 2.0);
            for r in revival_times(&p.params, 5).unwrap() {
                assert_rel(
                    inverted_variance(&p, r.time).unwrap(),
                    revival_maximum(&p, r.n).unwrap(),
                    1e-9,
                );
            }
        }
    }

    #[test]
    fn adiabatic_examples() {
        assert_eq!(qfi_adiabatic_omega(&make_params(1.0, 0.0).unwrap()).unwrap(), 0.0);
        assert_rel(qfi_adiabatic_omega(&make_params(1.0, 0.5).unwrap()).unwrap(), 2.0 / 9.0, 1e-14);
        assert_rel(
            qfi_adiabatic_omega(&make_params(1.0, 0.98).unwrap()).unwrap(),
            0.9604 / (2.0 * 3.9204 * 0.0004),
            1e-12,
        );
        assert_rel(snr_omega(&make_params(1.0, 0.98).unwrap()).unwrap(), 306.22, 1e-4);
        // Q_ω is scale free, I_ω carries 1/ω²
        let p = make_params(2.0, 0.5).unwrap();
        assert_rel(snr_omega(&p).unwrap(), 2.0 / 9.0, 1e-14);
        assert_rel(qfi_adiabatic_omega(&p).unwrap(), 2.0 / 36.0, 1e-14);
    }

    #[test]
    fn adiabatic_qfi_is_twice_squared_squeeze_rate() {
        // I_ω = 2(∂_ω r)², with ∂_ω r by finite differences at fixed ε
        for (w, g) in [(1.0, 0.3), (1.7, 0.8), (0.5, 0.95)] {
            let eps = g * w;
            let h = 1e-6 * w;
            let r = |w: f64| squeeze_parameter(eps / w).unwrap();
            let dr = (r(w + h) - r(w - h)) / (2.0 * h);
            let p = make_params(w, g).unwrap();
            assert_rel(qfi_adiabatic_omega(&p).unwrap(), 2.0 * dr * dr, 1e-7);
        }
    }

    #[test]
    fn homodyne_examples() {
        let p = make_params(1.0, 0.6).unwrap();
        let i = qfi_adiabatic_omega(&p).unwrap();
        assert_rel(homodyne_fisher(&p, 0.0).unwrap(), i, 1e-13);
        assert_rel(homodyne_fisher(&p, 0.5 * PI).unwrap(), i, 1e-13);
        let r = squeeze_parameter(0.6).unwrap();
        assert_rel(homodyne_factor(r, PI / 4.0), 0.36, 1e-12);
        assert_rel(homodyne_fisher(&p, PI / 4.0).unwrap(), 0.36 * i, 1e-12);
    }

    #[test]
    fn homodyne_max_saturates() {
        let p = make_params(1.0, 0.5).unwrap();
        let opt = homodyne_fisher_max(&p).unwrap();
        assert_eq!(opt.phi, 0.0);
        assert_rel(opt.fisher, 2.0 / 9.0, 1e-13);

        // grid-search oracle over 3601 angles
        for g in [0.1, 0.5, 0.9, 0.99] {
            let p = make_params(1.0, g).unwrap();
            let best = (0..3601)
                .map(|k| homodyne_fisher(&p, PI * k as f64 / 3600.0).unwrap())
                .fold(f64::MIN, f64::max);
            assert_rel(homodyne_fisher_max(&p).unwrap().fisher, best, 1e-10);
        }
    }

    #[test]
    fn homodyne_factor_bounded() {
        for r in [-2.0, -0.5, 0.0] {
            for k in 0..=720 {
                let f = homodyne_factor(r, PI * k as f64 / 360.0);
                assert!(f <= 1.0 + 1e-15);
            }
            assert_rel(homodyne_factor(r, 0.0), 1.0, 1e-15);
            assert_rel(homodyne_factor(r, 0.5 * PI), 1.0, 1e-15);
        }
    }
}
