//! Tables behind each figure, plus the adiabatic-ramp report.

use rayon::prelude::*;

use crate::engine::{dynamic_series, Backend, Engine, Quantity};
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_power_law, golden_section_max, local_maxima, FitResult};
use crate::fock::{
    converge_cutoff, fidelity, integrate_ramp, integrate_ramp_steps, qfi_overlap,
    squeezed_vacuum_fock, CutoffPolicy, FockVector, RampSchedule, DEFAULT_DELTA, DEFAULT_DT,
};
use crate::metrology::{revival_maximum, revival_time, snr_omega, DynamicProbe};
use crate::model::{check_gapped, squeeze_parameter, ModelParams};
use crate::sweep::{g_column, g_columns, linspace, time_column, unresolved_note, Column, TimeChoice};
use crate::table::{Cell, Table};

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(invalid("points", points as f64, "need at least 2 grid points"));
    }
    Ok(())
}

fn check_range(min: f64, max: f64) -> Result<()> {
    check_gapped(min)?;
    check_gapped(max)?;
    if !(min < max) {
        return Err(invalid("g range", min, "need g_min < g_max"));
    }
    Ok(())
}

fn column_names(engine: Engine, base: &str) -> Vec<String> {
    engine.backends().into_iter().map(|b| engine.column(base, b)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Options {
    pub omega: f64,
    pub g: Vec<f64>,
    pub alpha: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    pub engine: Engine,
    pub fock_spots: usize,
}

impl Default for Fig1Options {
    fn default() -> Self {
        Self {
            omega: 1.0,
            g: vec![0.92, 0.94, 0.96],
            alpha: vec![1.0, 2.0, 3.0],
            t_max: 25.0,
            points: 501,
            engine: Engine::Analytic,
            fock_spots: 8,
        }
    }
}

/// Dynamic QFI against time, one block of rows per `(g, α)`.
/// Columns `g,alpha,t,qfi`.
pub fn fig1(opts: &Fig1Options) -> Result<Table> {
    check_points(opts.points)?;
    if !(opts.t_max.is_finite() && opts.t_max > 0.0) {
        return Err(invalid("t_max", opts.t_max, "must be finite and > 0"));
    }
    let mut header = vec!["g".to_string(), "alpha".into(), "t".into()];
    header.extend(column_names(opts.engine, "qfi"));
    let times = linspace(0.0, opts.t_max, opts.points);
    let series: Vec<(f64, f64)> = opts
        .g
        .iter()
        .flat_map(|&g| opts.alpha.iter().map(move |&a| (g, a)))
        .collect();
    let backends = opts.engine.backends();
    let blocks: Vec<Vec<Column>> = series
        .par_iter()
        .map(|&(g, alpha)| {
            let params = ModelParams::new(opts.omega, g)?;
            params.require_gapped()?;
            backends
                .iter()
                .map(|&b| time_column(Quantity::QfiDynamic, b, &params, alpha, &times, opts.fock_spots))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(header);
    for (&(g, alpha), cols) in series.iter().zip(&blocks) {
        for (i, &t) in times.iter().enumerate() {
            let mut row = vec![Cell::Float(g), Cell::Float(alpha), Cell::Float(t)];
            row.extend(cols.iter().map(|c| Cell::from(c.cells[i])));
            table.push(row);
        }
    }
    for (&(g, alpha), cols) in series.iter().zip(&blocks) {
        for (&b, c) in backends.iter().zip(cols) {
            for &i in &c.unresolved {
                let at = format!("g={g}, alpha={alpha}, t={}", times[i]);
                table.note(unresolved_note(&opts.engine.column("qfi", b), &at));
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Options {
    pub omega: f64,
    pub g: Vec<f64>,
    pub alpha: f64,
    pub n_max: u32,
    /// Grid points per shortest revival period.
    pub points_per_period: usize,
    pub engine: Engine,
    pub fock_spots: usize,
}

impl Default for Fig2Options {
    fn default() -> Self {
        Self {
            omega: 1.0,
            g: vec![0.92, 0.94, 0.96],
            alpha: 1.0,
            n_max: 5,
            points_per_period: 200,
            engine: Engine::Analytic,
            fock_spots: 8,
        }
    }
}

/// A refined local maximum of `V(t)` near a revival time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalPeak {
    pub g: f64,
    pub n: u32,
    pub t_peak: f64,
    pub t_revival: f64,
    pub v_peak: f64,
    /// `4n²π²α²g²/((1+g)(1−g)³)`.
    pub v_closed_form: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    /// Columns `g,t,inverted_variance`.
    pub table: Table,
    pub peaks: Vec<RevivalPeak>,
    pub fits: Vec<(f64, FitResult)>,
    pub grid_step: f64,
}

impl Fig2Output {
    /// Columns `g,n,t_peak,t_revival,v_peak,v_closed_form,relative_deviation`.
    pub fn peak_table(&self) -> Table {
        let mut t = Table::new([
            "g",
            "n",
            "t_peak",
            "t_revival",
            "v_peak",
            "v_closed_form",
            "relative_deviation",
        ]);
        for p in &self.peaks {
            t.push(vec![
                p.g.into(),
                p.n.into(),
                p.t_peak.into(),
                p.t_revival.into(),
                p.v_peak.into(),
                p.v_closed_form.into(),
                ((p.v_peak - p.v_closed_form) / p.v_closed_form).into(),
            ]);
        }
        t
    }

    /// Columns `g,C,D,r_squared,points_used`.
    pub fn fit_table(&self) -> Table {
        let mut t = Table::new(["g", "C", "D", "r_squared", "points_used"]);
        for (g, f) in &self.fits {
            t.push(vec![
                (*g).into(),
                f.amplitude.into(),
                f.exponent.into(),
                f.r_squared.into(),
                f.points_used.into(),
            ]);
        }
        t
    }
}

/// Inverted variance against time on a common grid, the revival peaks of
/// each curve, and a power-law fit through them.
///
/// Peaks are detected on the grid, refined by golden-section search and kept
/// when they lie within a quarter period of some `T_n`, `1 <= n <= n_max`.
/// Detection uses the Gaussian engine when it is selected alone and the
/// closed form otherwise.
pub fn fig2(opts: &Fig2Options) -> Result<Fig2Output> {
    if opts.n_max < 1 {
        return Err(invalid("n_max", 0.0, "need at least one revival"));
    }
    if opts.points_per_period < 4 {
        return Err(invalid("points_per_period", opts.points_per_period as f64, "need at least 4"));
    }
    if opts.g.is_empty() {
        return Err(invalid("g", f64::NAN, "need at least one value"));
    }
    let params: Vec<ModelParams> = opts
        .g
        .iter()
        .map(|&g| {
            let p = ModelParams::new(opts.omega, g)?;
            p.require_gapped()?;
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let periods: Vec<f64> = params.iter().map(|p| revival_time(p, 1)).collect::<Result<_>>()?;
    let longest = periods.iter().copied().fold(0.0, f64::max);
    let shortest = periods.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = (f64::from(opts.n_max) + 0.5) * longest;
    let points = (t_max / (shortest / opts.points_per_period as f64)).ceil() as usize + 1;
    let times = linspace(0.0, t_max, points);
    let grid_step = times[1] - times[0];

    let detector = if opts.engine == Engine::Gaussian { Backend::Gaussian } else { Backend::Analytic };
    let engine = opts.engine;
    let per_g: Vec<(Vec<Column>, Vec<RevivalPeak>)> = params
        .par_iter()
        .zip(&periods)
        .map(|(p, &period)| {
            let cols: Vec<Column> = engine
                .backends()
                .into_iter()
                .map(|b| time_column(Quantity::InvertedVariance, b, p, opts.alpha, &times, opts.fock_spots))
                .collect::<Result<_>>()?;
            let curve = if engine != Engine::Fock {
                cols[0].cells.iter().map(|v| v.unwrap_or(f64::NAN)).collect()
            } else {
                dynamic_series(Quantity::InvertedVariance, detector, p, opts.alpha, &times)?
            };
            let peaks = revival_peaks(p, opts, detector, &times, &curve, period)?;
            Ok((cols, peaks))
        })
        .collect::<Result<_>>()?;

    let mut header = vec!["g".to_string(), "t".into()];
    header.extend(column_names(engine, "inverted_variance"));
    let mut table = Table::new(header);
    let mut peaks = Vec::new();
    let mut fits = Vec::new();
    let mut notes = Vec::new();
    for (p, (cols, found)) in params.iter().zip(per_g) {
        for (i, &t) in times.iter().enumerate() {
            let mut row = vec![Cell::Float(p.g()), Cell::Float(t)];
            row.extend(cols.iter().map(|c| Cell::from(c.cells[i])));
            table.push(row);
        }
        for (b, c) in engine.backends().into_iter().zip(&cols) {
            for &i in &c.unresolved {
                let at = format!("g={}, t={}", p.g(), times[i]);
                notes.push(unresolved_note(&engine.column("inverted_variance", b), &at));
            }
        }
        let pts: Vec<(f64, f64)> = found.iter().map(|k| (k.t_peak, k.v_peak)).collect();
        fits.push((p.g(), fit_power_law(&pts)?));
        peaks.extend(found);
    }
    for n in notes {
        table.note(n);
    }
    Ok(Fig2Output { table, peaks, fits, grid_step })
}

fn revival_peaks(
    params: &ModelParams,
    opts: &Fig2Options,
    backend: Backend,
    times: &[f64],
    curve: &[f64],
    period: f64,
) -> Result<Vec<RevivalPeak>> {
    let probe = DynamicProbe::new(*params, opts.alpha)?;
    let v_at = |t: f64| Ok(dynamic_series(Quantity::InvertedVariance, backend, params, opts.alpha, &[t])?[0]);
    let mut peaks = Vec::new();
    for i in local_maxima(curve) {
        let (t_peak, v_peak) = golden_section_max(v_at, times[i - 1], times[i + 1], 1e-12 * times[i])?;
        let n = (t_peak / period).round();
        if n < 1.0 || n > f64::from(opts.n_max) || (t_peak - n * period).abs() > 0.25 * period {
            continue;
        }
        let n = n as u32;
        peaks.push(RevivalPeak {
            g: params.g(),
            n,
            t_peak,
            t_revival: revival_time(params, n)?,
            v_peak,
            v_closed_form: revival_maximum(&probe, n)?,
        });
    }
    Ok(peaks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Options {
    pub omega: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    pub alpha: f64,
    /// Evaluation at `T_n`.
    pub revival: u32,
    pub engine: Engine,
    pub fock_spots: usize,
}

impl Default for Fig3Options {
    fn default() -> Self {
        Self {
            omega: 1.0,
            g_min: 0.5,
            g_max: 0.99,
            points: 50,
            alpha: 1.0,
            revival: 1,
            engine: Engine::Analytic,
            fock_spots: 8,
        }
    }
}

/// Inverted variance and QFI at the revival time, and their ratio.
/// Columns `g,T,inverted_variance,qfi,ratio`.
pub fn fig3(opts: &Fig3Options) -> Result<Table> {
    check_points(opts.points)?;
    check_range(opts.g_min, opts.g_max)?;
    if opts.revival < 1 {
        return Err(invalid("revival", 0.0, "index starts at 1"));
    }
    let gs = linspace(opts.g_min, opts.g_max, opts.points);
    let time = TimeChoice::Revival(opts.revival);
    let mut header = vec!["g".to_string(), "T".into()];
    let mut columns = Vec::new();
    let backends = opts.engine.backends();
    let mut v_cols = Vec::new();
    let mut q_cols = Vec::new();
    for &b in &backends {
        let quantities = [Quantity::InvertedVariance, Quantity::QfiDynamic];
        let mut pair = g_columns(&quantities, b, opts.omega, opts.alpha, time, &gs, opts.fock_spots)?;
        q_cols.push(pair.pop().unwrap_or_default());
        v_cols.push(pair.pop().unwrap_or_default());
    }
    let mut notes = Vec::new();
    for (base, cols) in [("inverted_variance", &v_cols), ("qfi", &q_cols)] {
        for (&b, c) in backends.iter().zip(cols.iter()) {
            let name = opts.engine.column(base, b);
            for &i in &c.unresolved {
                notes.push(unresolved_note(&name, &format!("g={}", gs[i])));
            }
            header.push(name);
            columns.push(c.cells.clone());
        }
    }
    for (&b, (v, q)) in backends.iter().zip(v_cols.iter().zip(&q_cols)) {
        header.push(opts.engine.column("ratio", b));
        columns.push(v.cells.iter().zip(&q.cells).map(|(v, q)| Some((*v)? / (*q)?)).collect());
    }
    let mut table = Table::new(header);
    for n in notes {
        table.note(n);
    }
    for (i, &g) in gs.iter().enumerate() {
        let t = revival_time(&ModelParams::new(opts.omega, g)?, opts.revival)?;
        let mut row = vec![Cell::Float(g), Cell::Float(t)];
        row.extend(columns.iter().map(|c| Cell::from(c[i])));
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Options {
    pub omega: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    pub engine: Engine,
    pub fock_spots: usize,
}

impl Default for Fig4Options {
    fn default() -> Self {
        Self {
            omega: 1.0,
            g_min: 0.05,
            g_max: 0.99,
            points: 50,
            engine: Engine::Analytic,
            fock_spots: 8,
        }
    }
}

/// Signal-to-noise bound and homodyne saturation ratio of the adiabatic
/// protocol. Columns `g,snr,fisher_ratio`.
pub fn fig4(opts: &Fig4Options) -> Result<Table> {
    check_points(opts.points)?;
    check_range(opts.g_min, opts.g_max)?;
    if opts.g_min == 0.0 {
        return Err(invalid("g_min", 0.0, "the Fisher ratio is undefined at g = 0"));
    }
    let gs = linspace(opts.g_min, opts.g_max, opts.points);
    let backends = opts.engine.backends();
    let mut header = vec!["g".to_string()];
    let mut columns = Vec::new();
    let mut notes = Vec::new();
    for (base, q) in [("snr", Quantity::Snr), ("fisher_ratio", Quantity::FisherRatio)] {
        for &b in &backends {
            let name = opts.engine.column(base, b);
            let c = g_column(q, b, opts.omega, 1.0, TimeChoice::Fixed(0.0), &gs, opts.fock_spots)?;
            for &i in &c.unresolved {
                notes.push(unresolved_note(&name, &format!("g={}", gs[i])));
            }
            header.push(name);
            columns.push(c.cells);
        }
    }
    let mut table = Table::new(header);
    for n in notes {
        table.note(n);
    }
    for (i, &g) in gs.iter().enumerate() {
        let mut row = vec![Cell::Float(g)];
        row.extend(columns.iter().map(|c| Cell::from(c[i])));
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticOptions {
    pub omega: f64,
    pub g_final: f64,
    /// Ramp durations `ωT`.
    pub t_ramp: Vec<f64>,
    pub dt: f64,
    /// Fixed basis size; converged automatically when `None`.
    pub cutoff: Option<usize>,
    /// Expected fidelities in percent, one per ramp duration, or empty.
    pub reference_percent: Vec<f64>,
}

impl Default for AdiabaticOptions {
    fn default() -> Self {
        Self {
            omega: 1.0,
            g_final: 0.98,
            t_ramp: vec![100.0, 105.0],
            dt: DEFAULT_DT,
            cutoff: None,
            reference_percent: vec![99.9936, 99.9934],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRow {
    pub t_ramp: f64,
    pub k: f64,
    /// Step actually used.
    pub dt: f64,
    pub steps: usize,
    pub cutoff: usize,
    /// Fidelity with the ground state of `H(g_final)`, in percent.
    pub fidelity_percent: f64,
    /// Change of the fidelity when the step is halved, in percentage points.
    pub half_step_error_pp: f64,
    pub norm_drift: f64,
    /// `ω²·I_ω` of the ramped state.
    pub snr_output: f64,
    /// `ω²·I_ω` of the exact ground state.
    pub snr_ideal: f64,
    pub reference_percent: Option<f64>,
    pub deviation_pp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticReport {
    pub rows: Vec<AdiabaticRow>,
}

/// Tolerance on the fidelity against its reference, in percentage points.
pub const FIDELITY_TOLERANCE_PP: f64 = 2e-4;

impl AdiabaticReport {
    /// Columns `t_ramp,k,dt,steps,cutoff,fidelity_percent,half_step_error_pp,
    /// norm_drift,snr_output,snr_ideal,reference_percent,deviation_pp`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "t_ramp",
            "k",
            "dt",
            "steps",
            "cutoff",
            "fidelity_percent",
            "half_step_error_pp",
            "norm_drift",
            "snr_output",
            "snr_ideal",
            "reference_percent",
            "deviation_pp",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.t_ramp.into(),
                r.k.into(),
                r.dt.into(),
                r.steps.into(),
                r.cutoff.into(),
                r.fidelity_percent.into(),
                r.half_step_error_pp.into(),
                r.norm_drift.into(),
                r.snr_output.into(),
                r.snr_ideal.into(),
                r.reference_percent.into(),
                r.deviation_pp.into(),
            ]);
        }
        t
    }

    /// One line per ramp, flagging deviations beyond
    /// [`FIDELITY_TOLERANCE_PP`].
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "T'={}: fidelity {:.6}% (k={:.6}, N={}, dt={:.5}, half-step change {:.1e} pp), SNR {:.2} of ideal {:.2}",
                r.t_ramp, r.fidelity_percent, r.k, r.cutoff, r.dt, r.half_step_error_pp, r.snr_output, r.snr_ideal
            ));
            if let (Some(reference), Some(dev)) = (r.reference_percent, r.deviation_pp) {
                let verdict = if dev.abs() <= FIDELITY_TOLERANCE_PP { "within" } else { "OUTSIDE" };
                out.push_str(&format!(
                    "; reference {reference}% deviation {dev:+.6} pp ({verdict} {FIDELITY_TOLERANCE_PP} pp)"
                ));
            }
            out.push('\n');
        }
        out
    }
}

fn ramp_fidelity(schedule: &RampSchedule, omega: f64, cutoff: usize, dt: f64) -> Result<(f64, crate::fock::RampRun)> {
    let target = squeezed_vacuum_fock(squeeze_parameter(schedule.g_final())?, cutoff)?;
    let run = integrate_ramp(schedule, omega, omega, &FockVector::vacuum(cutoff)?, dt)?;
    Ok((fidelity(&run.state, &target)?, run))
}

/// Ramps the vacuum along `g(t) = kt/√(1+(kt)²)` to `g_final` and compares
/// the result with the exact ground state.
pub fn adiabatic(opts: &AdiabaticOptions) -> Result<AdiabaticReport> {
    let base = ModelParams::new(opts.omega, opts.g_final)?;
    base.require_gapped()?;
    if !opts.reference_percent.is_empty() && opts.reference_percent.len() != opts.t_ramp.len() {
        return Err(Error::Config(format!(
            "{} reference fidelities for {} ramp durations",
            opts.reference_percent.len(),
            opts.t_ramp.len()
        )));
    }
    let omega = opts.omega;
    let snr_ideal = snr_omega(&base)?;
    let rows = opts
        .t_ramp
        .iter()
        .enumerate()
        .map(|(i, &t_ramp)| {
            // durations are given in units of 1/ω
            let schedule = RampSchedule::new(opts.g_final, t_ramp / omega)?;
            let cutoff = match opts.cutoff {
                Some(n) => n,
                None => {
                    let policy = CutoffPolicy { tolerance: 1e-10, ..CutoffPolicy::default() };
                    converge_cutoff(&policy, |n| Ok(vec![ramp_fidelity(&schedule, omega, n, opts.dt)?.0]))?.cutoff
                }
            };
            let (f, run) = ramp_fidelity(&schedule, omega, cutoff, opts.dt)?;
            let (f_half, _) = ramp_fidelity(&schedule, omega, cutoff, 0.5 * run.dt)?;
            let vacuum = FockVector::vacuum(cutoff)?;
            let steps = run.steps;
            let family = |w: f64| Ok(integrate_ramp_steps(&schedule, w, omega, &vacuum, steps)?.state);
            let qfi = qfi_overlap(family, omega, DEFAULT_DELTA * omega)?;
            let reference = opts.reference_percent.get(i).copied();
            Ok(AdiabaticRow {
                t_ramp,
                k: schedule.k(),
                dt: run.dt,
                steps,
                cutoff,
                fidelity_percent: 100.0 * f,
                half_step_error_pp: 100.0 * (f - f_half).abs(),
                norm_drift: run.norm_drift,
                snr_output: omega * omega * qfi.extrapolated(),
                snr_ideal,
                reference_percent: reference,
                deviation_pp: reference.map(|r| 100.0 * f - r),
            })
        })
        .collect::<Result<_>>()?;
    Ok(AdiabaticReport { rows })
}
