//! Adiabatic protocol: the ground state is used to estimate `ω`. Compares the
//! quantum Fisher information with the best homodyne Fisher information and
//! checks one point against the Fock engine.
//!
//! Run with `cargo run --release --example homodyne_saturation`.

use critsense::engine::{static_value, Backend, Quantity};
use critsense::metrology::{homodyne_fisher, homodyne_fisher_max, qfi_adiabatic_omega, snr_omega};
use critsense::{make_params, Result};

fn main() -> Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14} {:>10}", "g", "QFI", "F(phi=0)", "F(phi=pi/4)", "F_max/QFI");
    for g in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        let params = make_params(1.0, g)?;
        let qfi = qfi_adiabatic_omega(&params)?;
        let best = homodyne_fisher_max(&params)?;
        println!(
            "{g:>6} {qfi:>14.8e} {:>14.8e} {:>14.8e} {:>10.8}",
            homodyne_fisher(&params, 0.0)?,
            homodyne_fisher(&params, std::f64::consts::FRAC_PI_4)?,
            best.fisher / qfi,
        );
    }
    let params = make_params(1.0, 0.9)?;
    println!();
    for backend in [Backend::Analytic, Backend::Gaussian, Backend::Fock] {
        println!(
            "g = 0.9 {:>9}: snr = {:.10}, fisher ratio = {:.10}",
            backend.name(),
            static_value(Quantity::Snr, backend, &params)?,
            static_value(Quantity::FisherRatio, backend, &params)?
        );
    }
    println!("closed-form snr {:.10}", snr_omega(&params)?);
    Ok(())
}
