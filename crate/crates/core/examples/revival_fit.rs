//! Peaks of the inverted variance at the revival times and the power-law
//! growth `V ≈ C·T^D` of the peak heights.
//!
//! Run with `cargo run --release --example revival_fit`.

use critsense::figures::{fig2, Fig2Options};
use critsense::Result;

fn main() -> Result<()> {
    let out = fig2(&Fig2Options::default())?;
    println!("{:>5} {:>3} {:>12} {:>12} {:>16} {:>16}", "g", "n", "t_peak", "T_n", "V(t_peak)", "V closed form");
    for p in &out.peaks {
        println!(
            "{:>5} {:>3} {:>12.6} {:>12.6} {:>16.6} {:>16.6}",
            p.g, p.n, p.t_peak, p.t_revival, p.v_peak, p.v_closed_form
        );
    }
    println!();
    for (g, fit) in &out.fits {
        println!(
            "g = {g}: C = {:.6}, D = {:.6}, r^2 = {:.8} from {} peaks",
            fit.amplitude, fit.exponent, fit.r_squared, fit.points_used
        );
    }
    Ok(())
}
