use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::FockHamiltonian;
use super::state::{FockVector, TAIL_TOLERANCE};
use crate::error::{invalid, Error, Result};

struct Sector {
    levels: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Diagonalized fixed Hamiltonian; evolves any state to any time as
/// `ψ(t) = V e^{−iΛt} Vᵀ ψ₀`, one parity sector at a time.
pub struct Propagator {
    cutoff: usize,
    sectors: [Sector; 2],
    tail_tolerance: f64,
}

impl Propagator {
    pub fn new(h: &FockHamiltonian) -> Self {
        let sector = |parity| {
            let eig = SymmetricEigen::new(h.parity_block(parity));
            Sector {
                levels: h.parity_levels(parity),
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        };
        Self {
            cutoff: h.cutoff(),
            sectors: [sector(0), sector(1)],
            tail_tolerance: TAIL_TOLERANCE,
        }
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = tolerance;
        self
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Lowest eigenvector of the even sector, with a non-negative vacuum
    /// amplitude.
    pub fn ground_state(&self) -> FockVector {
        let even = &self.sectors[0];
        let k = even.energies.imin();
        let col = even.vectors.column(k);
        let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
        let mut amps = vec![Complex64::default(); self.cutoff];
        for (i, &n) in even.levels.iter().enumerate() {
            amps[n] = Complex64::new(sign * col[i], 0.0);
        }
        FockVector::from_raw(amps)
    }

    /// `exp(−iHt)·psi`; fails with [`Error::Truncation`] if the evolved state
    /// reaches the top of the basis.
    pub fn evolve(&self, psi: &FockVector, t: f64) -> Result<FockVector> {
        if !t.is_finite() {
            return Err(invalid("t", t, "must be finite"));
        }
        if psi.cutoff() != self.cutoff {
            return Err(Error::DimensionMismatch {
                left: psi.cutoff(),
                right: self.cutoff,
            });
        }
        let mut out = vec![Complex64::default(); self.cutoff];
        for sector in &self.sectors {
            let m = sector.levels.len();
            let re = DVector::from_fn(m, |i, _| psi.amps()[sector.levels[i]].re);
            let im = DVector::from_fn(m, |i, _| psi.amps()[sector.levels[i]].im);
            if re.amax() == 0.0 && im.amax() == 0.0 {
                continue;
            }
            let c_re = sector.vectors.tr_mul(&re);
            let c_im = sector.vectors.tr_mul(&im);
            let mut d_re = DVector::zeros(m);
            let mut d_im = DVector::zeros(m);
            for k in 0..m {
                let (s, c) = (sector.energies[k] * t).sin_cos();
                // (c_re + i c_im)(cos − i sin)
                d_re[k] = c_re[k] * c + c_im[k] * s;
                d_im[k] = c_im[k] * c - c_re[k] * s;
            }
            let o_re = &sector.vectors * d_re;
            let o_im = &sector.vectors * d_im;
            for (i, &n) in sector.levels.iter().enumerate() {
                out[n] = Complex64::new(o_re[i], o_im[i]);
            }
        }
        let state = FockVector::from_raw(out);
        state.check_tail(self.tail_tolerance)?;
        Ok(state)
    }
}

/// One-shot `exp(−iHt)·psi0`. Build a [`Propagator`] when evolving to many
/// times under the same Hamiltonian.
pub fn evolve_fixed(h: &FockHamiltonian, psi0: &FockVector, t: f64) -> Result<FockVector> {
    Propagator::new(h).evolve(psi0, t)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fock::hamiltonian::build_hamiltonian;
    use crate::fock::moments::moments_fock;
    use crate::fock::state::{coherent_fock, fidelity, squeezed_vacuum_fock};
    use crate::model::{make_params, squeeze_parameter};

    #[test]
    fn zero_time_is_identity() {
        let h = build_hamiltonian(&make_params(1.0, 0.7).unwrap(), 64).unwrap();
        let psi = coherent_fock(1.0, 64).unwrap();
        let out = evolve_fixed(&h, &psi, 0.0).unwrap();
        assert!(psi.amps().iter().zip(out.amps()).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn harmonic_revival() {
        let h = build_hamiltonian(&make_params(1.0, 0.0).unwrap(), 64).unwrap();
        let psi = coherent_fock(1.0, 64).unwrap();
        let out = evolve_fixed(&h, &psi, 2.0 * PI).unwrap();
        assert!((fidelity(&psi, &out).unwrap() - 1.0).abs() < 1e-9);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quarter_period_moments() {
        let p = make_params(1.0, 0.5).unwrap();
        let h = build_hamiltonian(&p, 128).unwrap();
        let t = 0.5 * PI / p.normal_frequency().unwrap();
        let out = evolve_fixed(&h, &coherent_fock(1.0, 128).unwrap(), t).unwrap();
        let m = moments_fock(&out);
        assert!((m.mean_p + 1.5 * 2f64.sqrt() / 0.75f64.sqrt()).abs() < 1e-6);
        assert!((m.var_p - 1.5).abs() < 1e-6);
    }

    #[test]
    fn ground_state_is_squeezed_vacuum() {
        let p = make_params(1.0, 0.8).unwrap();
        let prop = Propagator::new(&build_hamiltonian(&p, 128).unwrap());
        let target = squeezed_vacuum_fock(squeeze_parameter(0.8).unwrap(), 128).unwrap();
        assert!((fidelity(&prop.ground_state(), &target).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parity_is_conserved() {
        let h = build_hamiltonian(&make_params(1.0, 0.9).unwrap(), 256).unwrap();
        let prop = Propagator::new(&h);
        let vac = FockVector::vacuum(256).unwrap();
        for t in [0.3, 2.0, 9.0] {
            let out = prop.evolve(&vac, t).unwrap();
            assert!(out.amps().iter().skip(1).step_by(2).all(|a| a.norm() < 1e-12));
        }
    }

    #[test]
    fn truncation_reported() {
        // far beyond the basis: photon number grows without bound above g = 1
        let h = build_hamiltonian(&make_params(1.0, 1.5).unwrap(), 32).unwrap();
        let psi = coherent_fock(1.0, 32).unwrap();
        assert!(matches!(evolve_fixed(&h, &psi, 5.0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let h = build_hamiltonian(&make_params(1.0, 0.5).unwrap(), 32).unwrap();
        let psi = coherent_fock(1.0, 16).unwrap();
        assert!(matches!(evolve_fixed(&h, &psi, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}
