//! Self-check: every closed form against the Gaussian and Fock engines.
//!
//! The closed forms are passed in as a [`Formulas`] table so that a corrupted
//! formula can be swapped in and shown to be caught.

use std::fmt;
use std::str::FromStr;

use crate::engine::{dynamic_series, five_point, static_value, Backend, Quantity};
use crate::error::{Error, Result};
use crate::figures::{adiabatic, fig2, AdiabaticOptions, Fig2Options};
use crate::fock::{
    build_hamiltonian, coherent_fock, converge_cutoff, moments_fock, scaled_difference,
    CutoffPolicy, Propagator,
};
use crate::gaussian::{coherent_gaussian, propagate, quadrature_moments};
use crate::metrology::{self, revival_time, DynamicProbe};
use crate::model::{self, ModelParams};
use crate::sweep::linspace;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    #[default]
    Fast,
    /// Adds `g = 0.96` Fock runs and the long adiabatic ramps.
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Config(format!("unknown verify level '{s}' (fast|full)"))),
        }
    }
}

type ProbeFn = fn(&DynamicProbe, f64) -> Result<f64>;

/// The closed forms under test.
#[derive(Clone, Copy)]
pub struct Formulas {
    pub eigen_energy: fn(&ModelParams, u32) -> Result<f64>,
    pub mean_p: ProbeFn,
    pub var_p: ProbeFn,
    pub susceptibility: ProbeFn,
    pub inverted_variance: ProbeFn,
    pub qfi_dynamic: ProbeFn,
    pub revival_maximum: fn(&DynamicProbe, u32) -> Result<f64>,
    pub revival_ratio: fn(f64, f64) -> f64,
    pub qfi_adiabatic_omega: fn(&ModelParams) -> Result<f64>,
    pub homodyne_fisher_max: fn(&ModelParams) -> Result<f64>,
}

fn homodyne_max(params: &ModelParams) -> Result<f64> {
    Ok(metrology::homodyne_fisher_max(params)?.fisher)
}

impl Formulas {
    pub fn standard() -> Self {
        Self {
            eigen_energy: model::eigen_energy,
            mean_p: metrology::mean_p,
            var_p: metrology::var_p,
            susceptibility: metrology::susceptibility,
            inverted_variance: metrology::inverted_variance,
            qfi_dynamic: metrology::qfi_dynamic,
            revival_maximum: metrology::revival_maximum,
            revival_ratio: metrology::revival_ratio,
            qfi_adiabatic_omega: metrology::qfi_adiabatic_omega,
            homodyne_fisher_max: homodyne_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    fn at_most(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self { name, measured, tolerance, passed: measured <= tolerance, detail }
    }

    fn errored(name: &'static str, err: &Error) -> Self {
        Self {
            name,
            measured: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            detail: format!("error {}: {err}", err.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Columns `check,measured,tolerance,passed,detail`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["check", "measured", "tolerance", "passed", "detail"]);
        for c in &self.checks {
            t.push(vec![
                Cell::Text(c.name.to_string()),
                c.measured.into(),
                c.tolerance.into(),
                Cell::Text(c.passed.to_string()),
                Cell::Text(c.detail.replace(',', ";")),
            ]);
        }
        t
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<26} measured {:<12.4e} tolerance {:<10.3e} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            )?;
        }
        let failed = self.failures().len();
        write!(f, "{} of {} checks passed", self.checks.len() - failed, self.checks.len())
    }
}

pub fn run(level: Level) -> Report {
    run_with(level, &Formulas::standard())
}

pub fn run_with(level: Level, formulas: &Formulas) -> Report {
    let full = level == Level::Full;
    let mut checks = Vec::new();
    let mut push = |name: &'static str, r: Result<Check>| {
        checks.push(r.unwrap_or_else(|e| Check::errored(name, &e)));
    };
    push("spectrum", spectrum(formulas, full));
    push("quadrature_dynamics", quadrature_dynamics(formulas, full));
    push("susceptibility", susceptibility(formulas));
    push("cramer_rao", cramer_rao(formulas));
    push("revival_maxima", revival_maxima(formulas));
    push("revival_ratio", revival_ratio(formulas));
    push("peak_detection", peak_detection());
    push("power_law_exponent", power_law_exponent());
    push("adiabatic_qfi", adiabatic_qfi(formulas, full));
    push("homodyne_saturation", homodyne_saturation(formulas));
    push("homodyne_fock", homodyne_fock(formulas));
    push("dynamic_qfi_vs_oracle", dynamic_qfi_vs_oracle(formulas, full));
    if full {
        push("ramp_integration", ramp_integration());
    }
    Report { level, checks }
}

fn probe(omega: f64, g: f64, alpha: f64) -> Result<DynamicProbe> {
    DynamicProbe::new(ModelParams::new(omega, g)?, alpha)
}

fn spectrum(fm: &Formulas, full: bool) -> Result<Check> {
    let mut gs = vec![0.0, 0.3, 0.6, 0.9];
    if full {
        gs.push(0.96);
    }
    let levels = 6;
    let mut worst = 0.0f64;
    for omega in [1.0, 1.7] {
        for &g in &gs {
            let params = ModelParams::new(omega, g)?;
            let policy = CutoffPolicy { tolerance: 1e-11, ..CutoffPolicy::default() };
            let fock = converge_cutoff(&policy, |n| {
                Ok(build_hamiltonian(&params, n)?.eigenvalues()[..levels].to_vec())
            })?;
            for (n, e) in fock.values.iter().enumerate() {
                worst = worst.max(scaled_difference(*e, (fm.eigen_energy)(&params, n as u32)?));
            }
        }
    }
    Ok(Check::at_most(
        "spectrum",
        worst,
        1e-8,
        format!("lowest {levels} levels, omega in {{1, 1.7}}, {} values of g", gs.len()),
    ))
}

fn quadrature_dynamics(fm: &Formulas, full: bool) -> Result<Check> {
    let mut gs = vec![0.5, 0.92];
    if full {
        gs.push(0.96);
    }
    let alpha = 1.0;
    let mut worst = 0.0f64;
    for &g in &gs {
        let pr = probe(1.0, g, alpha)?;
        let times = linspace(0.0, 2.0 * revival_time(&pr.params, 1)?, 41);
        let gaussian_start = coherent_gaussian(alpha)?;
        for &t in &times {
            let m = quadrature_moments(&propagate(&pr.params, &gaussian_start, t)?);
            worst = worst.max(scaled_difference(m.mean_p, (fm.mean_p)(&pr, t)?));
            worst = worst.max(scaled_difference(m.var_p, (fm.var_p)(&pr, t)?));
        }
        let fock = converge_cutoff(&CutoffPolicy::default(), |n| {
            let prop = Propagator::new(&build_hamiltonian(&pr.params, n)?);
            let start = coherent_fock(alpha, n)?;
            let mut out = Vec::with_capacity(2 * times.len());
            for &t in &times {
                let m = moments_fock(&prop.evolve(&start, t)?);
                out.push(m.mean_p);
                out.push(m.var_p);
            }
            Ok(out)
        })?;
        for (i, &t) in times.iter().enumerate() {
            worst = worst.max(scaled_difference(fock.values[2 * i], (fm.mean_p)(&pr, t)?));
            worst = worst.max(scaled_difference(fock.values[2 * i + 1], (fm.var_p)(&pr, t)?));
        }
    }
    Ok(Check::at_most(
        "quadrature_dynamics",
        worst,
        1e-7,
        format!("<P> and Var P, closed form vs Gaussian vs Fock, g in {gs:?}, t in [0, 2T1]"),
    ))
}

fn susceptibility(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in [0.3, 0.7, 0.92, 0.96] {
        let pr = probe(1.0, g, 1.0)?;
        let t1 = revival_time(&pr.params, 1)?;
        for t in linspace(0.0, 3.0 * t1, 31) {
            let fd = five_point(|x| (fm.mean_p)(&probe(1.0, x, 1.0)?, t), g, 1e-4 * (1.0 - g))?;
            worst = worst.max(scaled_difference(fd, (fm.susceptibility)(&pr, t)?));
        }
    }
    Ok(Check::at_most("susceptibility", worst, 1e-6, "chi vs finite difference of <P>".into()))
}

fn cramer_rao(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in [0.92, 0.96] {
        for alpha in [1.0, 2.0, 3.0] {
            let pr = probe(1.0, g, alpha)?;
            let t1 = revival_time(&pr.params, 1)?;
            let times = linspace(0.0, 3.0 * t1, 301);
            let exact = dynamic_series(Quantity::QfiDynamic, Backend::Gaussian, &pr.params, alpha, &times)?;
            for (&t, &qfi) in times.iter().zip(&exact) {
                if qfi > 1e-9 {
                    worst = worst.max((fm.inverted_variance)(&pr, t)? / qfi);
                }
            }
            for n in 1..=3 {
                let tn = revival_time(&pr.params, n)?;
                worst = worst.max((fm.inverted_variance)(&pr, tn)? / (fm.qfi_dynamic)(&pr, tn)?);
            }
        }
    }
    Ok(Check::at_most(
        "cramer_rao",
        worst,
        1.0 + 1e-6,
        "max V/I: exact QFI on [0, 3T1], closed-form QFI at T1..T3".into(),
    ))
}

fn revival_maxima(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in [0.5, 0.92, 0.94, 0.96] {
        for alpha in [1.0, 2.0, 3.0] {
            let pr = probe(1.3, g, alpha)?;
            for n in 1..=5 {
                let tn = revival_time(&pr.params, n)?;
                let v = (fm.inverted_variance)(&pr, tn)?;
                worst = worst.max((v - (fm.revival_maximum)(&pr, n)?).abs() / v);
            }
        }
    }
    Ok(Check::at_most("revival_maxima", worst, 1e-9, "V(T_n) vs closed-form maxima, n = 1..5".into()))
}

fn revival_ratio(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in [0.5, 0.92, 0.96] {
        for alpha in [1.0, 2.0, 3.0] {
            let pr = probe(1.0, g, alpha)?;
            let expect = (fm.revival_ratio)(alpha, g);
            for n in 1..=5 {
                let tn = revival_time(&pr.params, n)?;
                let r = (fm.inverted_variance)(&pr, tn)? / (fm.qfi_dynamic)(&pr, tn)?;
                worst = worst.max((r - expect).abs() / expect);
            }
        }
    }
    Ok(Check::at_most("revival_ratio", worst, 1e-9, "V(T_n)/I(T_n) vs 4a^2 g^2/(4a^2 + 1/2)".into()))
}

fn peak_detection() -> Result<Check> {
    let out = fig2(&Fig2Options::default())?;
    let worst = out
        .peaks
        .iter()
        .map(|p| (p.t_peak - p.t_revival).abs() / out.grid_step)
        .fold(0.0, f64::max);
    let expected = 5 * Fig2Options::default().g.len();
    if out.peaks.len() != expected {
        return Ok(Check {
            name: "peak_detection",
            measured: out.peaks.len() as f64,
            tolerance: expected as f64,
            passed: false,
            detail: "wrong number of revival peaks".into(),
        });
    }
    Ok(Check::at_most(
        "peak_detection",
        worst,
        1.0,
        format!("{} refined peaks, offset from T_n in grid steps", out.peaks.len()),
    ))
}

fn power_law_exponent() -> Result<Check> {
    let out = fig2(&Fig2Options::default())?;
    let worst = out.fits.iter().map(|(_, f)| (f.exponent - 2.0).abs()).fold(0.0, f64::max);
    let d: Vec<String> = out.fits.iter().map(|(g, f)| format!("D({g})={:.4}", f.exponent)).collect();
    Ok(Check::at_most("power_law_exponent", worst, 0.05, d.join(" ")))
}

fn adiabatic_qfi(fm: &Formulas, full: bool) -> Result<Check> {
    let mut gs = vec![0.3, 0.6, 0.9];
    if full {
        gs.push(0.98);
    }
    let mut worst = 0.0f64;
    for &g in &gs {
        let params = ModelParams::new(1.4, g)?;
        let w2 = params.omega().powi(2);
        let expect = w2 * (fm.qfi_adiabatic_omega)(&params)?;
        for b in [Backend::Gaussian, Backend::Fock] {
            let v = static_value(Quantity::Snr, b, &params)?;
            worst = worst.max((v - expect).abs() / expect);
        }
    }
    Ok(Check::at_most("adiabatic_qfi", worst, 1e-6, format!("omega^2 I_omega, Gaussian and Fock, g in {gs:?}")))
}

fn homodyne_saturation(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in linspace(0.05, 0.99, 50) {
        let params = ModelParams::new(1.0, g)?;
        let ratio = (fm.homodyne_fisher_max)(&params)? / (fm.qfi_adiabatic_omega)(&params)?;
        worst = worst.max((ratio - 1.0).abs());
    }
    Ok(Check::at_most("homodyne_saturation", worst, 1e-10, "max |F/I - 1| over 50 values of g".into()))
}

fn homodyne_fock(fm: &Formulas) -> Result<Check> {
    let mut worst = 0.0f64;
    for g in [0.2, 0.8] {
        let params = ModelParams::new(1.0, g)?;
        let w2 = params.omega().powi(2);
        let q = static_value(Quantity::Snr, Backend::Fock, &params)?;
        let fock_ratio = static_value(Quantity::FisherRatio, Backend::Fock, &params)?;
        let closed = (fm.homodyne_fisher_max)(&params)? * w2 / q;
        worst = worst.max((closed - 1.0).abs()).max((fock_ratio - 1.0).abs());
    }
    Ok(Check::at_most(
        "homodyne_fock",
        worst,
        1e-6,
        "closed-form F over Fock QFI, and the Fock X^2 ratio, g in {0.2, 0.8}".into(),
    ))
}

fn dynamic_qfi_vs_oracle(fm: &Formulas, full: bool) -> Result<Check> {
    let mut gs = vec![0.92];
    if full {
        gs.push(0.96);
    }
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for &g in &gs {
        let pr = probe(1.0, g, 1.0)?;
        let t1 = revival_time(&pr.params, 1)?;
        let times = [0.5 * t1, t1];
        let oracle = dynamic_series(Quantity::QfiDynamic, Backend::Fock, &pr.params, 1.0, &times)?;
        for (&t, &o) in times.iter().zip(&oracle) {
            let r = (fm.qfi_dynamic)(&pr, t)? / o;
            ratios.push(format!("{r:.3}"));
            worst = worst.max(r.ln().abs());
        }
    }
    Ok(Check::at_most(
        "dynamic_qfi_vs_oracle",
        worst,
        2f64.ln(),
        format!("|ln(closed/Fock)| at T1/2, T1 for g in {gs:?}: ratios {}", ratios.join(" ")),
    ))
}

fn ramp_integration() -> Result<Check> {
    let report = adiabatic(&AdiabaticOptions { reference_percent: vec![], ..AdiabaticOptions::default() })?;
    let worst = report
        .rows
        .iter()
        .map(|r| r.half_step_error_pp.max(r.norm_drift * 100.0))
        .fold(0.0, f64::max);
    let f: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("F({})={:.6}%", r.t_ramp, r.fidelity_percent))
        .collect();
    Ok(Check::at_most(
        "ramp_integration",
        worst,
        1e-6,
        format!("half-step change and norm drift in pp; {}", f.join(" ")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_level_passes() {
        let report = run(Level::Fast);
        assert!(report.passed(), "{report}");
        assert_eq!(report.to_table().rows().len(), report.checks.len());
    }

    fn wrong_var_p(probe: &DynamicProbe, t: f64) -> Result<f64> {
        Ok(metrology::var_p(probe, t)? * (1.0 + 1e-4))
    }

    fn wrong_energy(params: &ModelParams, n: u32) -> Result<f64> {
        Ok(model::eigen_energy(params, n)? + 1e-6)
    }

    #[test]
    fn corrupted_formula_is_caught() {
        let report = run_with(Level::Fast, &Formulas { var_p: wrong_var_p, ..Formulas::standard() });
        let failed: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
        assert_eq!(failed, ["quadrature_dynamics"]);

        let report = run_with(Level::Fast, &Formulas { eigen_energy: wrong_energy, ..Formulas::standard() });
        assert!(!report.passed());
        assert_eq!(report.failures()[0].name, "spectrum");
    }

    #[test]
    fn level_parsing() {
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("slow".parse::<Level>().is_err());
    }
}
