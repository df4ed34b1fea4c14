//! Quantum Fisher information on `g` after free evolution of a coherent probe,
//! written as CSV. A few rows are cross-checked against the Fock engine.
//!
//! Run with `cargo run --release --example dynamic_qfi [out.csv]`.

use critsense::engine::Engine;
use critsense::figures::{fig1, Fig1Options};
use critsense::table::Cell;
use critsense::Result;

fn main() -> Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "dynamic_qfi.csv".into());
    let opts = Fig1Options {
        g: vec![0.9],
        alpha: vec![1.0],
        t_max: 20.0,
        points: 41,
        engine: Engine::All,
        fock_spots: 3,
        ..Fig1Options::default()
    };
    let table = fig1(&opts)?;
    table.write(out.as_ref())?;
    let col = |name| table.column(name).expect("fig1 column");
    let (t, qfi, fock) = (col("t"), col("qfi"), col("qfi_fock"));
    for row in table.rows() {
        if let (Cell::Float(t), Cell::Float(q), Cell::Float(f)) = (&row[t], &row[qfi], &row[fock]) {
            println!("t = {t:6.2}  closed form = {q:14.6}  fock = {f:14.6}");
        }
    }
    println!("wrote {} rows to {out}", table.rows().len());
    Ok(())
}
