//! Inverted variance against the quantum Fisher information at the first
//! revival, across the gapped phase. The ratio approaches a constant near the
//! critical point.
//!
//! Run with `cargo run --example inverted_variance_ratio`.

use critsense::figures::{fig3, Fig3Options};
use critsense::metrology::revival_ratio;
use critsense::table::Cell;
use critsense::Result;

fn main() -> Result<()> {
    let opts = Fig3Options { points: 11, ..Fig3Options::default() };
    let table = fig3(&opts)?;
    println!("{}", table.header().join("  "));
    let ratio = table.column("ratio").expect("ratio column");
    for row in table.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Float(v) => format!("{v:.8}"),
                other => format!("{other:?}"),
            })
            .collect();
        println!("{}", cells.join("  "));
        if let (Cell::Float(g), Cell::Float(r)) = (&row[0], &row[ratio]) {
            assert!((r - revival_ratio(opts.alpha, *g)).abs() < 1e-9);
        }
    }
    println!("limit for alpha = {}: {:.8}", opts.alpha, revival_ratio(opts.alpha, 1.0));
    Ok(())
}
