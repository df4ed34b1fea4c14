//! Runs the built-in consistency checks between the closed forms, the
//! Gaussian engine and the Fock engine.
//!
//! Run with `cargo run --release --example cross_engine_verify [fast|full]`.

use critsense::verify::{run, Level};

fn main() {
    let level: Level = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fast".into())
        .parse()
        .unwrap_or_else(|e| panic!("{e}"));
    let report = run(level);
    println!("{report}");
    std::process::exit(if report.passed() { 0 } else { 1 });
}
