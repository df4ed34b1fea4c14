//! Linear ramp `g(t) = k·t` from the vacuum, integrated in Fock space.
//! Reports the fidelity with the target ground state and the information on
//! `ω` carried by the ramped state.
//!
//! Run with `cargo run --release --example adiabatic_ramp [T1 T2 ...]`.

use critsense::figures::{adiabatic, AdiabaticOptions};
use critsense::Result;

fn main() -> Result<()> {
    let mut t_ramp: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("ramp durations must be numbers"))
        .collect();
    if t_ramp.is_empty() {
        t_ramp = vec![10.0, 30.0, 100.0];
    }
    let opts = AdiabaticOptions {
        g_final: 0.9,
        t_ramp,
        reference_percent: Vec::new(),
        ..AdiabaticOptions::default()
    };
    let report = adiabatic(&opts)?;
    for row in &report.rows {
        println!(
            "T = {:>7.2}: fidelity {:.6} %, step error {:.1e} pp, {} steps, cutoff {}, snr {:.4} (ideal {:.4})",
            row.t_ramp,
            row.fidelity_percent,
            row.half_step_error_pp,
            row.steps,
            row.cutoff,
            row.snr_output,
            row.snr_ideal
        );
    }
    Ok(())
}
