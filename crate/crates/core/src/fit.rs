//! Local-maximum detection and the power-law fit `V = C·t^D`.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Amplitude `C`.
    pub amplitude: f64,
    /// Exponent `D`.
    pub exponent: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Least squares on `(ln t, ln V)`. Needs at least three points with
/// positive coordinates.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::InsufficientMaxima { found: points.len() });
    }
    if let Some(&(t, v)) = points.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        let bad = if t > 0.0 { v } else { t };
        return Err(invalid("fit point", bad, "coordinates must be positive"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit abscissae", mx, "need at least two distinct times"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult {
        amplitude: intercept.exp(),
        exponent: slope,
        r_squared,
        points_used: points.len(),
    })
}

/// Indices of strict interior local maxima (`v[i−1] < v[i] >= v[i+1]`).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i - 1] < values[i] && values[i] >= values[i + 1])
        .collect()
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    while hi - lo > x_tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|n| (n as f64 * 1.7, 3.2 * (n as f64 * 1.7).powi(2))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.amplitude - 3.2).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.points_used, 5);
    }

    #[test]
    fn noisy_fit_has_r_squared_below_one() {
        let pts = [(1.0, 1.0), (2.0, 4.5), (3.0, 8.0), (4.0, 17.0)];
        let fit = fit_power_law(&pts).unwrap();
        assert!(fit.r_squared < 1.0 && fit.r_squared > 0.9);
    }

    #[test]
    fn needs_three_points() {
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 4.0)]),
            Err(Error::InsufficientMaxima { found: 2 })
        ));
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 9.0)]).is_err());
    }

    #[test]
    fn maxima_indices() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 1.0]), vec![1, 3]);
        assert!(local_maxima(&[1.0, 2.0]).is_empty());
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, fx) = golden_section_max(|x| Ok(-(x - 0.3f64).powi(2) + 2.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }
}
