use num_complex::Complex64;

use super::hamiltonian::{apply_banded, pair_factors, spectral_bound, MIN_CUTOFF};
use super::state::{FockVector, TAIL_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::model::{check_gapped, ModelParams};

/// Maximum accumulated `|‖ψ‖² − 1|` over a ramp.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Default step, in units of `1/ω`.
pub const DEFAULT_DT: f64 = 0.01;
/// RK4 is stable on the imaginary axis up to `|λ·dt| = 2√2`; steps are capped
/// at this fraction of the spectral radius.
const STABILITY_LIMIT: f64 = 2.0;

/// `g(t) = k t / √(1 + (k t)²)`, reaching `g_final` at `t_ramp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSchedule {
    g_final: f64,
    t_ramp: f64,
    k: f64,
}

impl RampSchedule {
    /// Picks `k = g_f / (√(1−g_f²)·T)` so that `g(T) = g_f`.
    pub fn new(g_final: f64, t_ramp: f64) -> Result<Self> {
        check_gapped(g_final)?;
        if !(t_ramp.is_finite() && t_ramp > 0.0) {
            return Err(invalid("t_ramp", t_ramp, "must be finite and > 0"));
        }
        let k = g_final / ((1.0 - g_final) * (1.0 + g_final)).sqrt() / t_ramp;
        Ok(Self { g_final, t_ramp, k })
    }

    /// Schedule from the rate coefficient itself; `k = 0` keeps `g ≡ 0`.
    pub fn with_rate(k: f64, t_ramp: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(invalid("k", k, "must be finite and >= 0"));
        }
        if !(t_ramp.is_finite() && t_ramp > 0.0) {
            return Err(invalid("t_ramp", t_ramp, "must be finite and > 0"));
        }
        let kt = k * t_ramp;
        Ok(Self { g_final: kt / (1.0 + kt * kt).sqrt(), t_ramp, k })
    }

    pub fn g_final(&self) -> f64 {
        self.g_final
    }

    pub fn t_ramp(&self) -> f64 {
        self.t_ramp
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn g_at(&self, t: f64) -> f64 {
        let kt = self.k * t;
        kt / (1.0 + kt * kt).sqrt()
    }
}

/// Output of a ramp integration.
#[derive(Debug, Clone)]
pub struct RampRun {
    pub state: FockVector,
    /// Step actually used (the requested step, possibly capped for stability).
    pub dt: f64,
    pub steps: usize,
    /// `|‖ψ(T)‖² − 1|`.
    pub norm_drift: f64,
}

/// Integrates `i dψ/dt = H(g(t))ψ` with `ε(t) = g(t)·ω` over the schedule,
/// using classical fourth-order Runge–Kutta at step `dt`.
///
/// The norm is monitored, never corrected; drift above
/// [`NORM_DRIFT_LIMIT`] is an error.
pub fn evolve_ramp(
    schedule: &RampSchedule,
    params_base: &ModelParams,
    psi0: &FockVector,
    dt: f64,
) -> Result<RampRun> {
    let omega = params_base.omega();
    integrate_ramp(schedule, omega, omega, psi0, dt)
}

/// Ramp with detuning `omega` and drive `ε(t) = g(t)·drive_scale`.
///
/// Holding `drive_scale` fixed while varying `omega` gives the family used to
/// estimate the information on `ω` carried by the ramped state.
pub fn integrate_ramp(
    schedule: &RampSchedule,
    omega: f64,
    drive_scale: f64,
    psi0: &FockVector,
    dt: f64,
) -> Result<RampRun> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", dt, "must be finite and > 0"));
    }
    if !(omega.is_finite() && omega > 0.0 && drive_scale.is_finite()) {
        return Err(invalid("omega", omega, "must be finite and > 0"));
    }
    let bound = spectral_bound(omega, schedule.g_final() * drive_scale, &pair_factors(psi0.cutoff()));
    let dt_cap = dt.min(STABILITY_LIMIT / bound);
    let steps = (schedule.t_ramp() / dt_cap).ceil().max(1.0) as usize;
    integrate_ramp_steps(schedule, omega, drive_scale, psi0, steps)
}

/// Ramp integration with an explicit number of equal RK4 steps.
///
/// Families of ramps that must be compared amplitude by amplitude (for
/// example in a QFI estimate) should share one step count.
pub fn integrate_ramp_steps(
    schedule: &RampSchedule,
    omega: f64,
    drive_scale: f64,
    psi0: &FockVector,
    steps: usize,
) -> Result<RampRun> {
    if !(omega.is_finite() && omega > 0.0 && drive_scale.is_finite()) {
        return Err(invalid("omega", omega, "must be finite and > 0"));
    }
    if steps == 0 {
        return Err(invalid("steps", 0.0, "must be positive"));
    }
    let n = psi0.cutoff();
    if n < MIN_CUTOFF {
        return Err(invalid("cutoff", n as f64, "must be at least 4"));
    }
    let pair = pair_factors(n);
    let h = schedule.t_ramp() / steps as f64;

    let eps = |t: f64| schedule.g_at(t) * drive_scale;
    // derivative: −i H(t) ψ
    let rhs = |t: f64, psi: &[Complex64], out: &mut [Complex64]| {
        apply_banded(omega, eps(t), &pair, psi, out);
        for v in out.iter_mut() {
            *v = Complex64::new(v.im, -v.re);
        }
    };

    let mut psi = psi0.amps().to_vec();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    let mut worst = 0.0f64;
    for step in 0..steps {
        let t = step as f64 * h;
        rhs(t, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * h;
        }
        rhs(t + h, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if step % 256 == 255 || step + 1 == steps {
            let drift = (psi.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
            worst = worst.max(drift);
            if !(drift <= NORM_DRIFT_LIMIT) {
                return Err(Error::NormDrift {
                    drift,
                    limit: NORM_DRIFT_LIMIT,
                    steps: step + 1,
                });
            }
        }
    }
    let state = FockVector::from_raw(psi);
    state.check_tail(TAIL_TOLERANCE)?;
    let norm_drift = (state.norm_sqr() - 1.0).abs();
    Ok(RampRun {
        state,
        dt: h,
        steps,
        norm_drift: norm_drift.max(worst),
    })
}
