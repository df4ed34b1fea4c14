use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::state::FockVector;

/// Quadrature and number moments of a Fock-basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `Var(X²) = ⟨X⁴⟩ − ⟨X²⟩²`.
    pub var_x2: f64,
    pub mean_n: f64,
    /// Largest imaginary part met among the Hermitian expectations.
    pub imag_residue: f64,
}

/// `X·psi` or `P·psi` on a basis two levels longer than `psi`, so the
/// ladder action is never cut off.
fn quadrature_action(psi: &[Complex64], momentum: bool) -> Vec<Complex64> {
    let n = psi.len() + 1;
    let mut out = vec![Complex64::default(); n];
    for (m, o) in out.iter_mut().enumerate() {
        // a† part: √m ψ_{m−1}; a part: √(m+1) ψ_{m+1}
        let up = if m >= 1 && m - 1 < psi.len() { psi[m - 1] * (m as f64).sqrt() } else { Complex64::default() };
        let down = if m + 1 < psi.len() { psi[m + 1] * ((m + 1) as f64).sqrt() } else { Complex64::default() };
        *o = if momentum {
            Complex64::i() * (up - down) * FRAC_1_SQRT_2
        } else {
            (up + down) * FRAC_1_SQRT_2
        };
    }
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Expectations through banded ladder-operator action:
/// `⟨X⟩ = ⟨ψ|Xψ⟩`, `⟨X²⟩ = ‖Xψ‖²`, `⟨X⁴⟩ = ‖X²ψ‖²`, and likewise for `P`.
pub fn moments_fock(psi: &FockVector) -> FockMoments {
    let amps = psi.amps();
    let x = quadrature_action(amps, false);
    let p = quadrature_action(amps, true);
    let xx = quadrature_action(&x, false);

    let mx = dot(amps, &x[..amps.len()]);
    let mp = dot(amps, &p[..amps.len()]);
    let x2 = norm_sqr(&x);
    let p2 = norm_sqr(&p);
    let x4 = norm_sqr(&xx);

    FockMoments {
        mean_x: mx.re,
        mean_p: mp.re,
        var_x: x2 - mx.re * mx.re,
        var_p: p2 - mp.re * mp.re,
        var_x2: x4 - x2 * x2,
        mean_n: psi.mean_number(),
        imag_residue: mx.im.abs().max(mp.im.abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::{coherent_fock, squeezed_vacuum_fock};

    #[test]
    fn vacuum() {
        let m = moments_fock(&FockVector::vacuum(8).unwrap());
        assert_eq!((m.mean_x, m.mean_p, m.mean_n), (0.0, 0.0, 0.0));
        assert!((m.var_x - 0.5).abs() < 1e-15);
        assert!((m.var_p - 0.5).abs() < 1e-15);
        assert!((m.var_x2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coherent() {
        let m = moments_fock(&coherent_fock(1.0, 48).unwrap());
        assert!((m.mean_x - 2f64.sqrt()).abs() < 1e-12);
        assert!(m.mean_p.abs() < 1e-12);
        assert!((m.var_x2 - 4.5).abs() < 1e-10);
        assert!(m.imag_residue < 1e-10);
    }

    #[test]
    fn squeezed() {
        let r = -0.6;
        let m = moments_fock(&squeezed_vacuum_fock(r, 128).unwrap());
        assert!((m.var_x - 0.5 * (2.0 * r).exp()).abs() < 1e-10);
        assert!((m.var_p - 0.5 * (-2.0 * r).exp()).abs() < 1e-10);
        assert!((m.var_x2 - 0.5 * (4.0 * r).exp()).abs() < 1e-10);
    }
}
