//! Generic sweep: any quantity over a grid in `g` or `t`, with the other
//! parameters fixed. The closed-form QFI keeps the leading near-critical
//! term only, so the engines agree with it as `g → 1`.
//!
//! Run with `cargo run --example parameter_sweep`.

use critsense::engine::{Engine, Quantity};
use critsense::sweep::{run_sweep, Grid, SweepParam, SweepSpec};
use critsense::Result;

fn main() -> Result<()> {
    let mut spec = SweepSpec::new(
        Quantity::QfiDynamic,
        Grid { param: SweepParam::G, min: 0.7, max: 0.9, points: 9 },
    )
    .fix("t", 10.0)
    .engine(Engine::All);
    spec.fock_spots = 3;
    let result = run_sweep(&spec)?;
    print!("{}", result.to_table().to_csv());

    let spec = SweepSpec::new(
        Quantity::InvertedVariance,
        Grid { param: SweepParam::T, min: 0.0, max: 30.0, points: 7 },
    )
    .fix("g", 0.8);
    print!("{}", run_sweep(&spec)?.to_table().to_csv());
    Ok(())
}
