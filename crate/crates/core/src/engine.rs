//! The observables behind every figure, each computable three ways: closed
//! form, exact Gaussian flow, or brute force on the number basis.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fock::{
    build_hamiltonian, coherent_fock, converge_cutoff, moments_fock, qfi_derivative,
    CutoffPolicy, FockHamiltonian, FockVector, Propagator, TAIL_TOLERANCE,
};
use crate::gaussian::{
    coherent_gaussian, propagate, qfi_gaussian, rotated_quadrature_moment,
    squeezed_vacuum_gaussian, GaussianState,
};
use crate::metrology::{
    homodyne_fisher_max, inverted_variance, qfi_adiabatic_omega, qfi_dynamic, snr_omega,
    DynamicProbe,
};
use crate::model::{squeeze_parameter, ModelParams};

/// One way of evaluating an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Analytic,
    Gaussian,
    Fock,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Gaussian => "gaussian",
            Backend::Fock => "fock",
        }
    }
}

/// Engine selection as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Analytic,
    Gaussian,
    Fock,
    /// Analytic values plus `<col>_gaussian` and `<col>_fock` columns.
    All,
}

impl Engine {
    pub fn backends(self) -> Vec<Backend> {
        match self {
            Engine::Analytic => vec![Backend::Analytic],
            Engine::Gaussian => vec![Backend::Gaussian],
            Engine::Fock => vec![Backend::Fock],
            Engine::All => vec![Backend::Analytic, Backend::Gaussian, Backend::Fock],
        }
    }

    /// Column name for `backend` under this selection: the bare name for the
    /// primary backend, suffixed otherwise.
    pub fn column(self, base: &str, backend: Backend) -> String {
        if self == Engine::All && backend != Backend::Analytic {
            format!("{base}_{}", backend.name())
        } else {
            base.to_string()
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "gaussian" => Ok(Engine::Gaussian),
            "fock" => Ok(Engine::Fock),
            "all" => Ok(Engine::All),
            _ => Err(Error::Config(format!("unknown engine '{s}' (analytic|gaussian|fock|all)"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Gaussian => "gaussian",
            Engine::Fock => "fock",
            Engine::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// QFI for `g` of a coherent probe after time `t` (closed form keeps the
    /// leading term; the other engines are exact).
    QfiDynamic,
    /// `V_g = χ_g²/(ΔP)²`.
    InvertedVariance,
    /// `ω²·I_ω` of the squeezed ground state.
    Snr,
    /// Optimal homodyne Fisher information over the QFI, both for `ω`.
    FisherRatio,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::QfiDynamic => "qfi_dynamic",
            Quantity::InvertedVariance => "inverted_variance",
            Quantity::Snr => "snr",
            Quantity::FisherRatio => "fisher_ratio",
        }
    }

    /// Depends on an evolution time and a probe amplitude.
    pub fn is_dynamic(self) -> bool {
        matches!(self, Quantity::QfiDynamic | Quantity::InvertedVariance)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qfi_dynamic" => Ok(Quantity::QfiDynamic),
            "inverted_variance" => Ok(Quantity::InvertedVariance),
            "snr" => Ok(Quantity::Snr),
            "fisher_ratio" => Ok(Quantity::FisherRatio),
            _ => Err(Error::Config(format!("unknown quantity '{s}'"))),
        }
    }
}

/// Cutoff ladder used for Fock evaluations. Dense diagonalization at 4096
/// takes minutes per stencil, so the ladder stops at 2048; states that need
/// more are reported as truncated.
pub fn fock_policy() -> CutoffPolicy {
    CutoffPolicy {
        start: 64,
        max: 2048,
        tolerance: 1e-7,
    }
}

/// Finite-difference step in `g`, shrinking toward the critical point.
fn g_step(g: f64) -> f64 {
    1e-3 * (1.0 - g)
}

/// Five-point central difference.
pub(crate) fn five_point<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

/// Stencil abscissae in the order they are requested by [`five_point`] and
/// [`qfi_derivative`].
fn stencil(x: f64, h: f64) -> [f64; 5] {
    [x - 2.0 * h, x - h, x, x + h, x + 2.0 * h]
}

/// Looks up a precomputed stencil member by exact abscissa.
fn pick<'a, T>(xs: &[f64], items: &'a [T], x: f64) -> Result<&'a T> {
    xs.iter()
        .position(|v| v.to_bits() == x.to_bits())
        .map(|i| &items[i])
        .ok_or_else(|| invalid("stencil point", x, "not precomputed"))
}

/// Dynamic observable at each time in `times` for a coherent probe `|α⟩`
/// evolving under `H(params)`.
pub fn dynamic_series(
    quantity: Quantity,
    backend: Backend,
    params: &ModelParams,
    alpha: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    Ok(dynamic_many(&[quantity], backend, params, alpha, times)?.remove(0))
}

/// Several dynamic observables over the same times, one series per entry of
/// `quantities`. The Fock backend shares its propagators between them.
pub fn dynamic_many(
    quantities: &[Quantity],
    backend: Backend,
    params: &ModelParams,
    alpha: f64,
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if quantities.is_empty() || quantities.iter().any(|q| !q.is_dynamic()) {
        return Err(invalid("quantity", f64::NAN, "not a time-dependent observable"));
    }
    params.require_gapped()?;
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(invalid("t", t, "must be finite and >= 0"));
    }
    if times.is_empty() {
        return Ok(vec![Vec::new(); quantities.len()]);
    }
    match backend {
        Backend::Analytic => {
            let probe = DynamicProbe::new(*params, alpha)?;
            quantities
                .iter()
                .map(|&q| {
                    times
                        .iter()
                        .map(|&t| match q {
                            Quantity::QfiDynamic => qfi_dynamic(&probe, t),
                            _ => inverted_variance(&probe, t),
                        })
                        .collect()
                })
                .collect()
        }
        Backend::Gaussian => {
            let start = coherent_gaussian(alpha)?;
            quantities
                .iter()
                .map(|&q| times.iter().map(|&t| gaussian_dynamic(q, params, &start, t)).collect())
                .collect()
        }
        Backend::Fock => fock_dynamic(quantities, params, alpha, times),
    }
}

fn gaussian_dynamic(
    quantity: Quantity,
    params: &ModelParams,
    start: &GaussianState,
    t: f64,
) -> Result<f64> {
    let g = params.g();
    let h = g_step(g);
    let state_at = |x: f64| propagate(&params.with_g(x)?, start, t);
    match quantity {
        // two-point stencil inside, so a finer step
        Quantity::QfiDynamic => qfi_gaussian(state_at, g, 0.1 * h),
        _ => {
            let chi = five_point(|x| Ok(state_at(x)?.mean()[1]), g, h)?;
            Ok(chi * chi / state_at(g)?.cov()[(1, 1)])
        }
    }
}

fn fock_dynamic(
    quantities: &[Quantity],
    params: &ModelParams,
    alpha: f64,
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let g = params.g();
    // The evolved state carries a phase that turns with g at a rate of order
    // t·n·∂Ω/∂g, so its derivative needs a finer step than the Gaussian moments.
    let h = 0.1 * g_step(g);
    let xs = stencil(g, h);
    let converged = converge_cutoff(&fock_policy(), |cutoff| {
        let start = coherent_fock(alpha, cutoff)?;
        let props: Vec<Propagator> = xs
            .par_iter()
            .map(|&x| Ok(Propagator::new(&build_hamiltonian(&params.with_g(x)?, cutoff)?)))
            .collect::<Result<_>>()?;
        let per_time: Vec<Vec<f64>> = times
            .par_iter()
            .map(|&t| {
                let states: Vec<FockVector> =
                    props.iter().map(|p| p.evolve(&start, t)).collect::<Result<_>>()?;
                let state_at = |x: f64| Ok(pick(&xs, &states, x)?.clone());
                quantities
                    .iter()
                    .map(|q| match q {
                        Quantity::QfiDynamic => qfi_derivative(state_at, g, h),
                        _ => {
                            let chi = five_point(|x| Ok(moments_fock(&state_at(x)?).mean_p), g, h)?;
                            Ok(chi * chi / moments_fock(&state_at(g)?).var_p)
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        // quantity-major so the series can be split back apart
        Ok((0..quantities.len())
            .flat_map(|k| per_time.iter().map(move |row| row[k]))
            .collect())
    })?;
    Ok(converged.values.chunks(times.len()).map(<[f64]>::to_vec).collect())
}

/// Static (ground-state) observable for `ω`, with derivatives at fixed drive
/// strength `ε`.
pub fn static_value(quantity: Quantity, backend: Backend, params: &ModelParams) -> Result<f64> {
    if quantity.is_dynamic() {
        return Err(invalid("quantity", f64::NAN, "needs an evolution time"));
    }
    params.require_gapped()?;
    if quantity == Quantity::FisherRatio && params.g() == 0.0 {
        return Err(invalid("g", 0.0, "the Fisher ratio is 0/0 without drive"));
    }
    let omega = params.omega();
    match backend {
        Backend::Analytic => match quantity {
            Quantity::Snr => snr_omega(params),
            _ => Ok(homodyne_fisher_max(params)?.fisher / qfi_adiabatic_omega(params)?),
        },
        Backend::Gaussian => gaussian_static(quantity, params),
        Backend::Fock => {
            let values = converge_cutoff(&fock_policy(), |cutoff| {
                Ok(vec![fock_static(quantity, params, cutoff)?])
            })?;
            let v = values.values[0];
            Ok(if quantity == Quantity::Snr { v * omega * omega } else { v })
        }
    }
}

fn omega_step(params: &ModelParams) -> f64 {
    1e-3 * params.omega() * (1.0 - params.g())
}

fn gaussian_static(quantity: Quantity, params: &ModelParams) -> Result<f64> {
    let (omega, eps) = (params.omega(), params.epsilon());
    let h = omega_step(params);
    let state_at = |w: f64| squeezed_vacuum_gaussian(squeeze_parameter(eps / w)?);
    let qfi = qfi_gaussian(state_at, omega, 0.1 * h)?;
    if quantity == Quantity::Snr {
        return Ok(omega * omega * qfi);
    }
    let centre = state_at(omega)?;
    let mut best = 0.0f64;
    for phi in [0.0, FRAC_PI_2] {
        let d = five_point(|w| Ok(rotated_quadrature_moment(&state_at(w)?, phi).mean_sq), omega, h)?;
        best = best.max(d * d / rotated_quadrature_moment(&centre, phi).var_of_sq);
    }
    Ok(best / qfi)
}

/// Ground state on `cutoff` levels, rejected if truncated.
pub fn fock_ground_state(omega: f64, epsilon: f64, cutoff: usize) -> Result<FockVector> {
    let psi = Propagator::new(&FockHamiltonian::with_drive(omega, epsilon, cutoff)?).ground_state();
    psi.check_tail(TAIL_TOLERANCE)?;
    Ok(psi)
}

/// QFI for `ω` (not yet scaled by `ω²`) or the `X²` homodyne ratio.
fn fock_static(quantity: Quantity, params: &ModelParams, cutoff: usize) -> Result<f64> {
    let (omega, eps) = (params.omega(), params.epsilon());
    let h = omega_step(params);
    let xs = stencil(omega, h);
    let states: Vec<FockVector> = xs
        .par_iter()
        .map(|&w| fock_ground_state(w, eps, cutoff))
        .collect::<Result<_>>()?;
    let family = |w: f64| pick(&xs, &states, w).cloned();
    let qfi = qfi_derivative(family, omega, h)?;
    if quantity == Quantity::Snr {
        return Ok(qfi);
    }
    let mean_sq = |w: f64| {
        let m = moments_fock(pick(&xs, &states, w)?);
        Ok(m.var_x + m.mean_x * m.mean_x)
    };
    let d = five_point(mean_sq, omega, h)?;
    Ok(d * d / moments_fock(&states[2]).var_x2 / qfi)
}
