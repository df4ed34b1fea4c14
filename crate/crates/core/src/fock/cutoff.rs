use crate::error::{invalid, Error, Result};

/// Cutoff adequacy: start small, double until the state fits below the
/// tail-mass bound and doubling no longer moves the observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub start: usize,
    pub max: usize,
    /// Relative change allowed between cutoffs `N` and `2N`
    /// (absolute for observables below one).
    pub tolerance: f64,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            start: 64,
            max: 4096,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Converged {
    pub cutoff: usize,
    pub values: Vec<f64>,
    /// Largest scaled change seen in the final doubling.
    pub deviation: f64,
}

pub(crate) fn scaled_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Runs `eval` at successive cutoffs until two consecutive successful
/// evaluations agree. Truncation errors trigger a doubling; other errors are
/// returned as is.
pub fn converge_cutoff<F>(policy: &CutoffPolicy, mut eval: F) -> Result<Converged>
where
    F: FnMut(usize) -> Result<Vec<f64>>,
{
    if policy.start < 4 || policy.max < policy.start {
        return Err(invalid("cutoff policy", policy.start as f64, "need 4 <= start <= max"));
    }
    let mut previous: Option<Vec<f64>> = None;
    let mut last_err = None;
    let mut cutoff = policy.start;
    while cutoff <= policy.max {
        match eval(cutoff) {
            Ok(values) => {
                if let Some(prev) = &previous {
                    if prev.len() != values.len() {
                        return Err(Error::DimensionMismatch { left: prev.len(), right: values.len() });
                    }
                    let deviation = prev
                        .iter()
                        .zip(&values)
                        .map(|(a, b)| scaled_difference(*a, *b))
                        .fold(0.0, f64::max);
                    if deviation < policy.tolerance {
                        return Ok(Converged { cutoff, values, deviation });
                    }
                }
                previous = Some(values);
            }
            Err(e @ Error::Truncation { .. }) => {
                previous = None;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        cutoff *= 2;
    }
    Err(last_err.unwrap_or(Error::Truncation {
        cutoff: policy.max,
        tail_mass: f64::NAN,
        tolerance: policy.tolerance,
    }))
}
