//! Acceptance criteria 1 to 11. Each test writes one `PASS`/`FAIL` line to
//! stdout (uncaptured) and then asserts the criterion as stated.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use critsense::figures::{adiabatic, fig2, AdiabaticOptions, Fig2Options};
use critsense::fock::{
    build_hamiltonian, coherent_fock, converge_cutoff, moments_fock, qfi_overlap, CutoffPolicy,
    FockVector, Propagator,
};
use critsense::engine::fock_ground_state;
use critsense::gaussian::{coherent_gaussian, propagate};
use critsense::metrology::{
    homodyne_fisher, homodyne_fisher_max, inverted_variance, mean_p, qfi_adiabatic_omega,
    qfi_dynamic, var_p, DynamicProbe,
};
use critsense::model::eigen_energy;
use critsense::sweep::linspace;
use critsense::{make_params, Result};

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n:>2} {verdict}: {name}: {detail}").unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn scaled(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Closed forms restated here, independent of the library.

fn revival(omega: f64, g: f64, n: u32) -> f64 {
    f64::from(n) * PI / (omega * (1.0 - g * g).sqrt())
}

fn peak_value(n: u32, alpha: f64, g: f64) -> f64 {
    let n = f64::from(n);
    4.0 * n * n * PI * PI * alpha * alpha * g * g / ((1.0 + g) * (1.0 - g).powi(3))
}

fn ratio_identity(alpha: f64, g: f64) -> f64 {
    4.0 * alpha * alpha * g * g / (4.0 * alpha * alpha + 0.5)
}

fn adiabatic_qfi_omega(omega: f64, g: f64) -> f64 {
    g * g / (2.0 * omega * omega * (1.0 + g).powi(2) * (1.0 - g).powi(2))
}

/// Overlap QFI on `g` of `exp(−iH(g)t)|α⟩` at each time, Fock cutoff raised
/// until two cutoffs agree.
fn overlap_qfi_dynamic(g: f64, alpha: f64, times: &[f64]) -> Result<(Vec<f64>, usize)> {
    let delta = 1e-5;
    let policy = CutoffPolicy { start: 64, max: 2048, tolerance: 1e-4 };
    let c = converge_cutoff(&policy, |n| {
        let start = coherent_fock(alpha, n)?;
        let xs = [g - delta, g - 0.5 * delta, g + 0.5 * delta, g + delta];
        let props: Vec<Propagator> = xs
            .iter()
            .map(|&x| Ok(Propagator::new(&build_hamiltonian(&make_params(1.0, x)?, n)?)))
            .collect::<Result<_>>()?;
        times
            .iter()
            .map(|&t| {
                let states: Vec<FockVector> =
                    props.iter().map(|p| p.evolve(&start, t)).collect::<Result<_>>()?;
                let family = |x: f64| {
                    let i = xs.iter().position(|v| v.to_bits() == x.to_bits()).expect("stencil point");
                    Ok(states[i].clone())
                };
                Ok(qfi_overlap(family, g, delta)?.extrapolated())
            })
            .collect()
    })?;
    Ok((c.values, c.cutoff))
}

#[test]
fn criterion_01_spectrum() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for g in [0.3, 0.6, 0.9] {
        let params = make_params(1.0, g).unwrap();
        let fock = converge_cutoff(&CutoffPolicy::default(), |n| {
            Ok(build_hamiltonian(&params, n)?.eigenvalues()[..5].to_vec())
        })
        .unwrap();
        let e_np = (1.0 - g * g).sqrt();
        for (n, e) in fock.values.iter().enumerate() {
            let closed = n as f64 * e_np + 0.5 * e_np - 0.5;
            assert!(scaled(eigen_energy(&params, n as u32).unwrap(), closed) < 1e-14);
            worst = worst.max(rel(*e, closed));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && elapsed < Duration::from_secs(10);
    report(1, "spectrum", pass, &format!("max relative deviation {worst:.2e}, {elapsed:.2?}"));
}

#[test]
fn criterion_02_quadrature_dynamics() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for g in [0.5, 0.92, 0.96] {
        let params = make_params(1.0, g).unwrap();
        let probe = DynamicProbe::new(params, 1.0).unwrap();
        let times = linspace(0.0, 2.0 * revival(1.0, g, 1), 100);
        let fock = converge_cutoff(&CutoffPolicy { tolerance: 1e-9, ..CutoffPolicy::default() }, |n| {
            let prop = Propagator::new(&build_hamiltonian(&params, n)?);
            let psi0 = coherent_fock(1.0, n)?;
            let mut out = Vec::new();
            for &t in &times {
                let m = moments_fock(&prop.evolve(&psi0, t)?);
                out.extend([m.mean_p, m.var_p]);
            }
            Ok(out)
        })
        .unwrap();
        let state0 = coherent_gaussian(1.0).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let s = propagate(&params, &state0, t).unwrap();
            let analytic = [mean_p(&probe, t).unwrap(), var_p(&probe, t).unwrap()];
            let gaussian = [s.mean()[1], s.cov()[(1, 1)]];
            let oracle = [fock.values[2 * i], fock.values[2 * i + 1]];
            for k in 0..2 {
                worst = worst
                    .max(scaled(analytic[k], gaussian[k]))
                    .max(scaled(analytic[k], oracle[k]))
                    .max(scaled(gaussian[k], oracle[k]));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-6 && elapsed < Duration::from_secs(60);
    report(2, "quadrature dynamics", pass, &format!("max pairwise deviation {worst:.2e}, {elapsed:.2?}"));
}

#[test]
fn criterion_03_revival_maxima() {
    let out = fig2(&Fig2Options::default()).unwrap();
    let mut worst_t = 0.0f64;
    let mut worst_v = 0.0f64;
    let mut found = 0;
    for g in [0.92, 0.94, 0.96] {
        for n in 1..=5 {
            let peak = out.peaks.iter().find(|p| p.g == g && p.n == n);
            let Some(p) = peak else { continue };
            found += 1;
            worst_t = worst_t.max(rel(p.t_peak, revival(1.0, g, n)));
            worst_v = worst_v.max(rel(p.v_peak, peak_value(n, 1.0, g)));
        }
    }
    let pass = found == 15 && worst_t < 1e-6 && worst_v < 1e-6;
    report(
        3,
        "inverted-variance maxima",
        pass,
        &format!("{found} of 15 maxima found; max relative offset from T_n {worst_t:.2e}, from closed-form value {worst_v:.2e}"),
    );
}

#[test]
fn criterion_04_heisenberg_scaling() {
    let out = fig2(&Fig2Options::default()).unwrap();
    let fit = out.fits.iter().find(|(g, _)| *g == 0.96).map(|(_, f)| *f).unwrap();
    let pass = (fit.exponent - 2.0).abs() <= 0.05;
    report(
        4,
        "power-law exponent",
        pass,
        &format!("g=0.96: D = {:.5}, r^2 = {:.8}, {} maxima", fit.exponent, fit.r_squared, fit.points_used),
    );
}

#[test]
fn criterion_05_cramer_rao() {
    let mut violations = 0;
    let mut checked = 0;
    let mut last_bad_t = 0.0f64;
    for g in [0.92, 0.94, 0.96] {
        for alpha in [1.0, 2.0, 3.0] {
            let probe = DynamicProbe::new(make_params(1.0, g).unwrap(), alpha).unwrap();
            for t in linspace(0.0, 3.0 * revival(1.0, g, 1), 3001) {
                let v = inverted_variance(&probe, t).unwrap();
                let i = qfi_dynamic(&probe, t).unwrap();
                checked += 1;
                if v > i * (1.0 + 1e-9) {
                    violations += 1;
                    last_bad_t = last_bad_t.max(t);
                }
            }
        }
    }
    let g = 0.92;
    let t1 = revival(1.0, g, 1);
    let probe = DynamicProbe::new(make_params(1.0, g).unwrap(), 1.0).unwrap();
    let (oracle, cutoff) = overlap_qfi_dynamic(g, 1.0, &[t1]).unwrap();
    let v1 = inverted_variance(&probe, t1).unwrap();
    let oracle_ok = v1 <= oracle[0] * (1.0 + 1e-9);
    let pass = violations == 0 && oracle_ok;
    report(
        5,
        "Cramer-Rao ordering",
        pass,
        &format!(
            "closed-form grid: {violations} of {checked} points with V > I (latest at t = {last_bad_t:.3}); \
             V(T1) = {v1:.6e} vs overlap QFI {:.6e} at cutoff {cutoff}",
            oracle[0]
        ),
    );
}

#[test]
fn criterion_06_revival_ratio() {
    let mut worst = 0.0f64;
    for alpha in [1.0, 2.0, 3.0] {
        for g in [0.92, 0.96] {
            let probe = DynamicProbe::new(make_params(1.0, g).unwrap(), alpha).unwrap();
            for n in 1..=5 {
                let t = revival(1.0, g, n);
                let r = inverted_variance(&probe, t).unwrap() / qfi_dynamic(&probe, t).unwrap();
                worst = worst.max(rel(r, ratio_identity(alpha, g)));
            }
        }
    }
    let sample = ratio_identity(1.0, 0.96);
    report(6, "revival ratio", worst < 1e-9, &format!("max relative deviation {worst:.2e}; alpha=1, g=0.96 ratio {sample:.6}"));
}

#[test]
fn criterion_07_adiabatic_qfi() {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for g in [0.5, 0.8, 0.95] {
        let omega = 1.0;
        let eps = g * omega;
        let family = |w: f64| fock_ground_state(w, eps, 256);
        let q = qfi_overlap(family, omega, 1e-4).unwrap().extrapolated();
        let expect = adiabatic_qfi_omega(omega, g);
        assert!(rel(qfi_adiabatic_omega(&make_params(omega, g).unwrap()).unwrap(), expect) < 1e-12);
        let d = rel(q, expect);
        worst = worst.max(d);
        detail.push(format!("g={g}: {q:.6e} vs {expect:.6e}"));
    }
    report(7, "adiabatic QFI", worst < 5e-3, &format!("max relative deviation {worst:.2e} ({})", detail.join(", ")));
}

#[test]
fn criterion_08_homodyne_saturation() {
    let mut worst = 0.0f64;
    let mut maximizer_ok = true;
    let phis = linspace(0.0, PI, 721);
    for g in linspace(0.05, 0.99, 50) {
        let params = make_params(1.0, g).unwrap();
        let best = homodyne_fisher_max(&params).unwrap();
        worst = worst.max((best.fisher / qfi_adiabatic_omega(&params).unwrap() - 1.0).abs());
        let (phi_star, f_star) = phis
            .iter()
            .map(|&p| (p, homodyne_fisher(&params, p).unwrap()))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let near_pure = [0.0, 0.5 * PI, PI].iter().any(|q| (phi_star - q).abs() < 1e-12);
        maximizer_ok &= near_pure && f_star <= best.fisher * (1.0 + 1e-12);
    }
    let pass = worst < 1e-10 && maximizer_ok;
    report(
        8,
        "homodyne saturation",
        pass,
        &format!("max |F/I - 1| = {worst:.2e}; grid search maximizer at a pure quadrature: {maximizer_ok}"),
    );
}

/// Covariance flow `Σ' = AΣ + ΣAᵀ` of the linear ramp, RK4 at a fixed step;
/// returns the fidelity with the target ground state in percent.
fn gaussian_ramp_fidelity(g_final: f64, t_ramp: f64, steps: usize) -> f64 {
    let k = g_final / (t_ramp * (1.0 - g_final * g_final).sqrt());
    let g_at = |t: f64| k * t / (1.0 + (k * t).powi(2)).sqrt();
    let deriv = |t: f64, s: [f64; 3]| {
        let g = g_at(t);
        let (a, b) = (1.0 - g, -(1.0 + g));
        // A = [[0, a], [b, 0]]; s = (Σxx, Σxp, Σpp)
        [2.0 * a * s[1], a * s[2] + b * s[0], 2.0 * b * s[1]]
    };
    let dt = t_ramp / steps as f64;
    let mut s = [0.5, 0.0, 0.5];
    for i in 0..steps {
        let t = i as f64 * dt;
        let add = |s: [f64; 3], d: [f64; 3], h: f64| [s[0] + h * d[0], s[1] + h * d[1], s[2] + h * d[2]];
        let k1 = deriv(t, s);
        let k2 = deriv(t + 0.5 * dt, add(s, k1, 0.5 * dt));
        let k3 = deriv(t + 0.5 * dt, add(s, k2, 0.5 * dt));
        let k4 = deriv(t + dt, add(s, k3, dt));
        for j in 0..3 {
            s[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    let vx = 0.5 * ((1.0 - g_final) / (1.0 + g_final)).sqrt();
    let vp = 0.25 / vx;
    let det = (s[0] + vx) * (s[2] + vp) - s[1] * s[1];
    100.0 / det.sqrt()
}

#[test]
fn criterion_09_adiabatic_fidelities() {
    let start = Instant::now();
    let opts = AdiabaticOptions::default();
    let report_rows = adiabatic(&opts).unwrap();
    let elapsed = start.elapsed();
    let tol = 2e-4;
    let mut pass = elapsed < Duration::from_secs(300);
    let mut detail = Vec::new();
    for (row, reference) in report_rows.rows.iter().zip(&opts.reference_percent) {
        let oracle = gaussian_ramp_fidelity(opts.g_final, row.t_ramp, 200_000);
        let dev = row.fidelity_percent - reference;
        pass &= dev.abs() <= tol && row.half_step_error_pp < tol && (row.fidelity_percent - oracle).abs() < tol;
        detail.push(format!(
            "T'={}: {:.6}% (reference {reference}%, deviation {dev:+.2e} pp, step error {:.1e} pp, covariance-flow oracle {oracle:.6}%)",
            row.t_ramp, row.fidelity_percent, row.half_step_error_pp
        ));
    }
    detail.push(format!("{elapsed:.1?}"));
    report(9, "adiabatic fidelities", pass, &detail.join("; "));
}

#[test]
fn criterion_10_dynamic_qfi_order_of_magnitude() {
    let mut ratios = Vec::new();
    let mut pass = true;
    for g in [0.92, 0.96] {
        let t1 = revival(1.0, g, 1);
        let times = [0.5 * t1, t1];
        let (oracle, cutoff) = overlap_qfi_dynamic(g, 1.0, &times).unwrap();
        let probe = DynamicProbe::new(make_params(1.0, g).unwrap(), 1.0).unwrap();
        for (&t, o) in times.iter().zip(&oracle) {
            let r = qfi_dynamic(&probe, t).unwrap() / o;
            pass &= (0.5..=2.0).contains(&r);
            ratios.push(format!("g={g}, t={t:.4}: {r:.4} (cutoff {cutoff})"));
        }
    }
    report(10, "closed-form vs overlap QFI", pass, &format!("ratios closed/oracle {}", ratios.join(", ")));
}

fn run_figures(dir: &Path) -> Vec<Vec<u8>> {
    let bin = env!("CARGO_BIN_EXE_critsense");
    let mut files = Vec::new();
    for cmd in ["fig1", "fig2", "fig3", "fig4"] {
        let out = dir.join(format!("{cmd}.csv"));
        let status = Command::new(bin)
            .args([cmd, "--out"])
            .arg(&out)
            .output()
            .expect("run critsense");
        assert!(status.status.success(), "{cmd}: {}", String::from_utf8_lossy(&status.stderr));
        files.push(std::fs::read(&out).unwrap());
        if cmd == "fig2" {
            for extra in ["fig2.peaks.csv", "fig2.fit.csv"] {
                files.push(std::fs::read(dir.join(extra)).unwrap());
            }
        }
    }
    files
}

#[test]
fn criterion_11_figure_reproduction() {
    let start = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_figures(a.path());
    let second = run_figures(b.path());
    let elapsed = start.elapsed();
    let identical = first == second;
    let headers: Vec<String> = first
        .iter()
        .map(|f| String::from_utf8_lossy(f).lines().next().unwrap_or("").to_string())
        .collect();
    let pass = identical && elapsed < Duration::from_secs(300);
    report(
        11,
        "figure reproduction",
        pass,
        &format!("two runs of fig1..fig4 in {elapsed:.1?}, byte-identical: {identical}; headers {headers:?}"),
    );
}

#[test]
fn oracle_ramp_matches_vacuum_start() {
    // zero drive keeps the vacuum
    let f = gaussian_ramp_fidelity(1e-12, 10.0, 1000);
    assert!((f - 100.0).abs() < 1e-9);
    let slow = gaussian_ramp_fidelity(0.9, 400.0, 40_000);
    let fast = gaussian_ramp_fidelity(0.9, 4.0, 4_000);
    assert!(slow > fast);
}
