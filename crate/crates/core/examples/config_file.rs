//! Reading run settings from a `key = value` file and feeding them to a
//! figure builder.
//!
//! Run with `cargo run --example config_file`.

use critsense::config::Config;
use critsense::figures::{fig4, Fig4Options};
use critsense::Result;

const SETTINGS: &str = "
# adiabatic sensing curve
omega = 2.0
g_min = 0.2
g_max = 0.9
points = 8
";

fn main() -> Result<()> {
    let cfg = Config::parse(SETTINGS)?;
    cfg.check_keys(&["omega", "g_min", "g_max", "points"])?;
    let defaults = Fig4Options::default();
    let opts = Fig4Options {
        omega: cfg.get("omega")?.unwrap_or(defaults.omega),
        g_min: cfg.get("g_min")?.unwrap_or(defaults.g_min),
        g_max: cfg.get("g_max")?.unwrap_or(defaults.g_max),
        points: cfg.get("points")?.unwrap_or(defaults.points),
        ..defaults
    };
    print!("{}", fig4(&opts)?.to_csv());
    Ok(())
}
