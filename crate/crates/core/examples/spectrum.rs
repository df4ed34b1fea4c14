//! Closed-form spectrum against exact diagonalization in a truncated Fock space.
//!
//! Run with `cargo run --example spectrum`.

use critsense::fock::{build_hamiltonian, converge_cutoff, CutoffPolicy};
use critsense::model::{eigen_energy, spectrum};
use critsense::{make_params, Result};

fn main() -> Result<()> {
    let levels = 4;
    println!("{:>5} {:>4} {:>22} {:>22} {:>10}", "g", "n", "closed form", "fock", "cutoff");
    for g in [0.0, 0.5, 0.9, 0.96] {
        let params = make_params(1.0, g)?;
        let fock = converge_cutoff(&CutoffPolicy::default(), |n| {
            Ok(build_hamiltonian(&params, n)?.eigenvalues()[..levels].to_vec())
        })?;
        for (n, e) in fock.values.iter().enumerate() {
            let exact = eigen_energy(&params, n as u32)?;
            println!("{g:>5} {n:>4} {exact:>22.15} {e:>22.15} {:>10}", fock.cutoff);
        }
        let s = spectrum(&params)?;
        println!("      gap {:.6}, squeezing r = {:.6}", s.excitation_energy, s.squeeze_parameter);
    }
    Ok(())
}
