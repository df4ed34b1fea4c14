//! Mean and variance of the momentum quadrature for a coherent probe,
//! computed three ways: closed form, Gaussian phase space, truncated Fock space.
//!
//! Run with `cargo run --example quadrature_dynamics`.

use critsense::fock::{build_hamiltonian, coherent_fock, moments_fock, Propagator};
use critsense::gaussian::{coherent_gaussian, propagate};
use critsense::metrology::{mean_p, var_p, DynamicProbe};
use critsense::{make_params, Result};

fn main() -> Result<()> {
    let (g, alpha, cutoff) = (0.8, 1.0, 512);
    let params = make_params(1.0, g)?;
    let probe = DynamicProbe::new(params, alpha)?;
    let start = coherent_gaussian(alpha)?;
    let prop = Propagator::new(&build_hamiltonian(&params, cutoff)?);
    let psi0 = coherent_fock(alpha, cutoff)?;

    println!("g = {g}, alpha = {alpha}, Fock cutoff {cutoff}");
    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}", "t", "<P> exact", "<P> gauss", "<P> fock", "VarP exact", "VarP gauss", "VarP fock");
    for k in 0..=10 {
        let t = 1.5 * f64::from(k);
        let gs = propagate(&params, &start, t)?;
        let fm = moments_fock(&prop.evolve(&psi0, t)?);
        println!(
            "{t:>6.2} {:>14.10} {:>14.10} {:>14.10} {:>14.10} {:>14.10} {:>14.10}",
            mean_p(&probe, t)?,
            gs.mean()[1],
            fm.mean_p,
            var_p(&probe, t)?,
            gs.cov()[(1, 1)],
            fm.var_p,
        );
    }
    Ok(())
}
