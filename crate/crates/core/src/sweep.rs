//! Parameter sweeps: a grid in `g` or `t`, a quantity, and the engines to
//! evaluate it with.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::engine::{dynamic_many, dynamic_series, fock_policy, static_value, Backend, Engine, Quantity};
use crate::error::{invalid, Error, Result};
use crate::metrology::revival_time;
use crate::model::{check_gapped, ModelParams};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    G,
    T,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::G => "g",
            SweepParam::T => "t",
        }
    }
}

/// Inclusive, evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { max } else { min + step * i as f64 })
        .collect()
}

/// Evenly spread row indices at which the Fock engine is sampled.
pub fn spot_indices(points: usize, spots: usize) -> Vec<usize> {
    if spots >= points {
        return (0..points).collect();
    }
    let mut idx: Vec<usize> = (0..spots)
        .map(|i| ((i * (points - 1)) as f64 / (spots - 1).max(1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

/// Evolution time for a `g` sweep of a dynamic quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeChoice {
    Fixed(f64),
    /// `T_n(g)`, moving with each grid point.
    Revival(u32),
}

impl TimeChoice {
    pub fn at(self, params: &ModelParams) -> Result<f64> {
        match self {
            TimeChoice::Fixed(t) => Ok(t),
            TimeChoice::Revival(n) => revival_time(params, n),
        }
    }
}

const FIXED_KEYS: [&str; 5] = ["omega", "g", "t", "n", "alpha"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub grid: Grid,
    /// Values held constant: `omega` (default 1), `alpha` (default 1), `g`
    /// for time sweeps, and `t` or revival index `n` for `g` sweeps of
    /// dynamic quantities.
    pub fixed: BTreeMap<String, f64>,
    pub engine: Engine,
    /// Number of grid rows evaluated by the Fock engine.
    pub fock_spots: usize,
}

impl SweepSpec {
    pub fn new(quantity: Quantity, grid: Grid) -> Self {
        Self {
            quantity,
            grid,
            fixed: BTreeMap::new(),
            engine: Engine::Analytic,
            fock_spots: 8,
        }
    }

    pub fn fix(mut self, key: &str, value: f64) -> Self {
        self.fixed.insert(key.to_string(), value);
        self
    }

    pub fn engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.fixed.get(key).copied()
    }

    pub fn omega(&self) -> f64 {
        self.get("omega").unwrap_or(1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.get("alpha").unwrap_or(1.0)
    }

    fn time_choice(&self) -> Result<TimeChoice> {
        match (self.get("t"), self.get("n")) {
            (Some(t), None) => Ok(TimeChoice::Fixed(t)),
            (None, Some(n)) if n >= 1.0 && n.fract() == 0.0 => Ok(TimeChoice::Revival(n as u32)),
            (None, Some(n)) => Err(invalid("n", n, "revival index must be a positive integer")),
            _ => Err(Error::Config("a g sweep of a dynamic quantity needs exactly one of t, n".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(key) = self.fixed.keys().find(|k| !FIXED_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown fixed parameter '{key}'")));
        }
        let Grid { param, min, max, points } = self.grid;
        if points < 2 {
            return Err(invalid("points", points as f64, "need at least 2 grid points"));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(invalid("grid", min, "need finite bounds with min < max"));
        }
        if self.fock_spots < 2 {
            return Err(invalid("fock_spots", self.fock_spots as f64, "need at least 2"));
        }
        ModelParams::new(self.omega(), 0.0)?;
        let alpha = self.alpha();
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("alpha", alpha, "must be finite and >= 0"));
        }
        match param {
            SweepParam::G => {
                check_gapped(min)?;
                check_gapped(max)?;
                if self.quantity.is_dynamic() {
                    if let TimeChoice::Fixed(t) = self.time_choice()? {
                        if !(t.is_finite() && t >= 0.0) {
                            return Err(invalid("t", t, "must be finite and >= 0"));
                        }
                    }
                } else if self.quantity == Quantity::FisherRatio && min == 0.0 {
                    return Err(invalid("g", 0.0, "the Fisher ratio is undefined at g = 0"));
                }
            }
            SweepParam::T => {
                if !self.quantity.is_dynamic() {
                    return Err(Error::Config(format!(
                        "{} does not depend on time",
                        self.quantity.name()
                    )));
                }
                if min < 0.0 {
                    return Err(invalid("t", min, "must be >= 0"));
                }
                let g = self
                    .get("g")
                    .ok_or_else(|| Error::Config("a time sweep needs a fixed g".into()))?;
                check_gapped(g)?;
            }
        }
        Ok(())
    }
}

/// Parameter column plus one column per engine; `None` marks rows an engine
/// did not sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param_name: String,
    pub param: Vec<f64>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
    pub notes: Vec<String>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_table(&self) -> Table {
        let mut header = vec![self.param_name.clone()];
        header.extend(self.columns.iter().map(|(n, _)| n.clone()));
        let mut table = Table::new(header);
        for (i, &p) in self.param.iter().enumerate() {
            let mut row = vec![Cell::Float(p)];
            row.extend(self.columns.iter().map(|(_, v)| Cell::from(v[i])));
            table.push(row);
        }
        for n in &self.notes {
            table.note(n.clone());
        }
        table
    }
}

/// One engine's cells along a grid. `None` marks rows the engine did not
/// produce; `unresolved` lists the Fock spot rows among them whose cutoff
/// ladder ran out before converging.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Column {
    pub cells: Vec<Option<f64>>,
    pub unresolved: Vec<usize>,
}

impl Column {
    fn gather(points: usize, rows: &[usize], values: Vec<Option<f64>>) -> Self {
        let mut cells = vec![None; points];
        let mut unresolved = Vec::new();
        for (&i, v) in rows.iter().zip(values) {
            if v.is_none() {
                unresolved.push(i);
            }
            cells[i] = v;
        }
        Self { cells, unresolved }
    }
}

/// Text for a Fock spot left blank, `at` naming the grid point.
pub fn unresolved_note(column: &str, at: &str) -> String {
    format!(
        "{column} at {at} left blank: no converged Fock cutoff up to {}",
        fock_policy().max
    )
}

/// A Fock evaluation that ran out of cutoffs becomes a blank cell; anything
/// else, and every other backend, passes through.
fn spot<T>(backend: Backend, r: Result<T>) -> Result<Option<T>> {
    match r {
        Err(Error::Truncation { .. }) if backend == Backend::Fock => Ok(None),
        other => other.map(Some),
    }
}

fn rows_for(backend: Backend, points: usize, spots: usize) -> Vec<usize> {
    if backend == Backend::Fock {
        spot_indices(points, spots)
    } else {
        (0..points).collect()
    }
}

/// A dynamic quantity along a time grid at fixed `params`.
pub fn time_column(
    quantity: Quantity,
    backend: Backend,
    params: &ModelParams,
    alpha: f64,
    times: &[f64],
    fock_spots: usize,
) -> Result<Column> {
    let rows = rows_for(backend, times.len(), fock_spots);
    let ts: Vec<f64> = rows.iter().map(|&i| times[i]).collect();
    let values = match spot(backend, dynamic_series(quantity, backend, params, alpha, &ts))? {
        Some(v) => v.into_iter().map(Some).collect(),
        // the times share one cutoff ladder; retry them alone so one
        // unreachable time does not blank the rest
        None => ts
            .par_iter()
            .map(|&t| Ok(spot(backend, dynamic_series(quantity, backend, params, alpha, &[t]))?.map(|v| v[0])))
            .collect::<Result<_>>()?,
    };
    Ok(Column::gather(times.len(), &rows, values))
}

/// Any quantity along a `g` grid; dynamic quantities are evaluated at `time`.
pub fn g_column(
    quantity: Quantity,
    backend: Backend,
    omega: f64,
    alpha: f64,
    time: TimeChoice,
    gs: &[f64],
    fock_spots: usize,
) -> Result<Column> {
    if quantity.is_dynamic() {
        return Ok(g_columns(&[quantity], backend, omega, alpha, time, gs, fock_spots)?.remove(0));
    }
    let rows = rows_for(backend, gs.len(), fock_spots);
    let values: Vec<Option<f64>> = rows
        .par_iter()
        .map(|&i| spot(backend, static_value(quantity, backend, &ModelParams::new(omega, gs[i])?)))
        .collect::<Result<_>>()?;
    Ok(Column::gather(gs.len(), &rows, values))
}

/// Several dynamic quantities along a `g` grid, one column each, computed
/// from a shared evolution per grid point.
pub fn g_columns(
    quantities: &[Quantity],
    backend: Backend,
    omega: f64,
    alpha: f64,
    time: TimeChoice,
    gs: &[f64],
    fock_spots: usize,
) -> Result<Vec<Column>> {
    let rows = rows_for(backend, gs.len(), fock_spots);
    let per_row: Vec<Option<Vec<Vec<f64>>>> = rows
        .par_iter()
        .map(|&i| {
            let params = ModelParams::new(omega, gs[i])?;
            let t = time.at(&params)?;
            spot(backend, dynamic_many(quantities, backend, &params, alpha, &[t]))
        })
        .collect::<Result<_>>()?;
    Ok((0..quantities.len())
        .map(|k| {
            let values = per_row.iter().map(|r| r.as_ref().map(|r| r[k][0])).collect();
            Column::gather(gs.len(), &rows, values)
        })
        .collect())
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid.values();
    let (omega, alpha) = (spec.omega(), spec.alpha());
    let mut columns = Vec::new();
    let mut notes = Vec::new();
    for backend in spec.engine.backends() {
        let column = match spec.grid.param {
            SweepParam::T => {
                let params = ModelParams::new(omega, spec.get("g").unwrap_or_default())?;
                time_column(spec.quantity, backend, &params, alpha, &grid, spec.fock_spots)?
            }
            SweepParam::G => {
                let time = if spec.quantity.is_dynamic() {
                    spec.time_choice()?
                } else {
                    TimeChoice::Fixed(0.0)
                };
                g_column(spec.quantity, backend, omega, alpha, time, &grid, spec.fock_spots)?
            }
        };
        let name = spec.engine.column(spec.quantity.name(), backend);
        let param = spec.grid.param.name();
        for &i in &column.unresolved {
            notes.push(unresolved_note(&name, &format!("{param}={}", grid[i])));
        }
        columns.push((name, column.cells));
    }
    Ok(SweepResult {
        param_name: spec.grid.param.name().to_string(),
        param: grid,
        columns,
        notes,
    })
}
