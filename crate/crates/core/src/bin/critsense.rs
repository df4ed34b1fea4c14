use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use critsense::config::Config;
use critsense::engine::Engine;
use critsense::figures::{self, AdiabaticOptions, Fig1Options, Fig2Options, Fig3Options, Fig4Options};
use critsense::table::{write_atomic, Table};
use critsense::verify::{self, Level};
use critsense::{Error, Result};

/// Criticality-enhanced sensing with a parametrically driven mode.
#[derive(Parser)]
#[command(name = "critsense", version)]
struct Cli {
    /// Detuning ω (sets the time unit).
    #[arg(long, global = true)]
    omega: Option<f64>,
    /// Output CSV path (default `<command>.csv`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `csv` or `csv+plot` (adds a gnuplot script next to the CSV).
    #[arg(long, global = true)]
    format: Option<String>,
    /// analytic | gaussian | fock | all
    #[arg(long, global = true)]
    engine: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file; flags override it, it overrides defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dynamic QFI against time.
    Fig1 {
        #[arg(long, value_delimiter = ',')]
        g: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        fock_spots: Option<usize>,
    },
    /// Inverted variance against time, revival peaks and power-law fit.
    Fig2 {
        #[arg(long, value_delimiter = ',')]
        g: Option<Vec<f64>>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        points_per_period: Option<usize>,
        #[arg(long)]
        fock_spots: Option<usize>,
    },
    /// Inverted variance, QFI and their ratio at the first revival.
    Fig3 {
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        fock_spots: Option<usize>,
    },
    /// Adiabatic signal-to-noise bound and homodyne saturation.
    Fig4 {
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        fock_spots: Option<usize>,
    },
    /// Adiabatic ramp fidelities against the exact ground state.
    Adiabatic {
        #[arg(long)]
        g_final: Option<f64>,
        /// Ramp durations in units of 1/ω.
        #[arg(long, value_delimiter = ',')]
        t_ramp: Option<Vec<f64>>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        cutoff: Option<usize>,
        /// Reference fidelities in percent, one per duration.
        #[arg(long, value_delimiter = ',')]
        reference: Option<Vec<f64>>,
    },
    /// Cross-check the closed forms against the Gaussian and Fock engines.
    Verify {
        #[arg(long)]
        level: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fig1 { .. } => "fig1",
            Command::Fig2 { .. } => "fig2",
            Command::Fig3 { .. } => "fig3",
            Command::Fig4 { .. } => "fig4",
            Command::Adiabatic { .. } => "adiabatic",
            Command::Verify { .. } => "verify",
        }
    }
}

const CONFIG_KEYS: &[&str] = &[
    "omega", "out", "format", "engine", "threads", "g", "alpha", "t_max", "points", "fock_spots",
    "n_max", "points_per_period", "g_min", "g_max", "g_final", "t_ramp", "dt", "cutoff",
    "reference", "level",
];

/// Flag, then config file, then default.
struct Settings {
    config: Config,
}

impl Settings {
    fn value<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.config.get(key)?.unwrap_or(default)),
        }
    }

    fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.get(key),
        }
    }

    fn optional_list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str) -> Result<Option<Vec<T>>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.get_list(key),
        }
    }

    fn list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.config.get_list(key)?.unwrap_or(default)),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    CsvPlot,
}

/// Files written so far; removed again if a later step fails.
struct Outputs {
    written: Vec<PathBuf>,
    format: Format,
}

impl Outputs {
    fn table(&mut self, path: &Path, table: &Table, plot: Option<(&str, &str)>) -> Result<()> {
        for note in table.notes() {
            eprintln!("warning[truncation]: {note}");
        }
        self.raw(path, table.to_csv().as_bytes())?;
        if let (Format::CsvPlot, Some((x, y))) = (self.format, plot) {
            let script = gnuplot_stub(path, table, x, y);
            self.raw(&path.with_extension("gp"), script.as_bytes())?;
        }
        Ok(())
    }

    fn raw(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.written.push(path.to_path_buf());
        println!("wrote {}", path.display());
        Ok(())
    }

    fn discard(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn gnuplot_stub(csv: &Path, table: &Table, x: &str, y: &str) -> String {
    let col = |name: &str| table.column(name).map_or(1, |i| i + 1);
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{x}'\nset ylabel '{y}'\nplot '{}' using {}:{} with lines\n",
        csv.file_name().map_or_else(|| csv.display().to_string(), |n| n.to_string_lossy().into_owned()),
        col(x),
        col(y)
    )
}

/// `fig2.csv` + `peaks` -> `fig2.peaks.csv`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    config.check_keys(CONFIG_KEYS)?;
    let s = Settings { config };

    let omega = s.value(cli.omega, "omega", 1.0)?;
    let engine: Engine = s.value(cli.engine.clone(), "engine", "analytic".to_string())?.parse()?;
    let format = match s.value(cli.format.clone(), "format", "csv".to_string())?.as_str() {
        "csv" => Format::Csv,
        "csv+plot" => Format::CsvPlot,
        other => return Err(Error::Config(format!("unknown format '{other}' (csv|csv+plot)"))),
    };
    if let Some(n) = s.optional(cli.threads, "threads")? {
        if n == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let name = cli.command.name();
    let out_flag: Option<PathBuf> = match cli.out {
        Some(p) => Some(p),
        None => s.config.raw("out").map(PathBuf::from),
    };
    let out = out_flag.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let mut outputs = Outputs { written: Vec::new(), format };

    let result = (|| -> Result<bool> {
        match cli.command {
            Command::Fig1 { g, alpha, t_max, points, fock_spots } => {
                let d = Fig1Options::default();
                let opts = Fig1Options {
                    omega,
                    g: s.list(g, "g", d.g)?,
                    alpha: s.list(alpha, "alpha", d.alpha)?,
                    t_max: s.value(t_max, "t_max", d.t_max)?,
                    points: s.value(points, "points", d.points)?,
                    engine,
                    fock_spots: s.value(fock_spots, "fock_spots", d.fock_spots)?,
                };
                outputs.table(&out, &figures::fig1(&opts)?, Some(("t", "qfi")))?;
            }
            Command::Fig2 { g, alpha, n_max, points_per_period, fock_spots } => {
                let d = Fig2Options::default();
                let opts = Fig2Options {
                    omega,
                    g: s.list(g, "g", d.g)?,
                    alpha: s.value(alpha, "alpha", d.alpha)?,
                    n_max: s.value(n_max, "n_max", d.n_max)?,
                    points_per_period: s.value(points_per_period, "points_per_period", d.points_per_period)?,
                    engine,
                    fock_spots: s.value(fock_spots, "fock_spots", d.fock_spots)?,
                };
                let fig = figures::fig2(&opts)?;
                outputs.table(&out, &fig.table, Some(("t", "inverted_variance")))?;
                outputs.table(&sibling(&out, "peaks"), &fig.peak_table(), None)?;
                outputs.table(&sibling(&out, "fit"), &fig.fit_table(), None)?;
                for (g, f) in &fig.fits {
                    println!(
                        "g={g}: V = {:.6e} t^{:.6} (r^2 = {:.8}, {} peaks)",
                        f.amplitude, f.exponent, f.r_squared, f.points_used
                    );
                }
            }
            Command::Fig3 { g_min, g_max, points, alpha, fock_spots } => {
                let d = Fig3Options::default();
                let opts = Fig3Options {
                    omega,
                    g_min: s.value(g_min, "g_min", d.g_min)?,
                    g_max: s.value(g_max, "g_max", d.g_max)?,
                    points: s.value(points, "points", d.points)?,
                    alpha: s.value(alpha, "alpha", d.alpha)?,
                    engine,
                    fock_spots: s.value(fock_spots, "fock_spots", d.fock_spots)?,
                    ..d
                };
                outputs.table(&out, &figures::fig3(&opts)?, Some(("g", "ratio")))?;
            }
            Command::Fig4 { g_min, g_max, points, fock_spots } => {
                let d = Fig4Options::default();
                let opts = Fig4Options {
                    omega,
                    g_min: s.value(g_min, "g_min", d.g_min)?,
                    g_max: s.value(g_max, "g_max", d.g_max)?,
                    points: s.value(points, "points", d.points)?,
                    engine,
                    fock_spots: s.value(fock_spots, "fock_spots", d.fock_spots)?,
                };
                outputs.table(&out, &figures::fig4(&opts)?, Some(("g", "snr")))?;
            }
            Command::Adiabatic { g_final, t_ramp, dt, cutoff, reference } => {
                let d = AdiabaticOptions::default();
                let reference = s.optional_list(reference, "reference")?;
                let opts = AdiabaticOptions {
                    omega,
                    g_final: s.value(g_final, "g_final", d.g_final)?,
                    t_ramp: s.list(t_ramp.clone(), "t_ramp", d.t_ramp.clone())?,
                    dt: s.value(dt, "dt", d.dt)?,
                    cutoff: s.optional(cutoff, "cutoff")?,
                    // references only make sense for the default durations
                    reference_percent: match reference {
                        Some(r) => r,
                        None if t_ramp.is_none() && s.config.raw("t_ramp").is_none() => d.reference_percent,
                        None => Vec::new(),
                    },
                };
                let report = figures::adiabatic(&opts)?;
                outputs.table(&out, &report.to_table(), Some(("t_ramp", "fidelity_percent")))?;
                print!("{}", report.summary());
            }
            Command::Verify { level } => {
                let level: Level = s.value(level, "level", "fast".to_string())?.parse()?;
                let report = verify::run(level);
                println!("{report}");
                if out_flag.is_some() {
                    outputs.table(&out, &report.to_table(), None)?;
                }
                return Ok(report.passed());
            }
        }
        Ok(true)
    })();
    if result.is_err() {
        outputs.discard();
    }
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error[verify_failed]: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
