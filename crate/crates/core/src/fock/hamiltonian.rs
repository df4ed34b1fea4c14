use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::ModelParams;

pub const MIN_CUTOFF: usize = 4;

/// Truncated matrix of `H = ω a†a + (ε/2)(a†² + a²)`.
///
/// Only two bands are stored: the diagonal `ω n` and the coupling
/// `(ε/2)√((n+1)(n+2))` between `n` and `n+2`. Even and odd levels never mix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockHamiltonian {
    omega: f64,
    epsilon: f64,
    cutoff: usize,
    /// `√((n+1)(n+2))` for `n = 0 … N−3`.
    pair: Vec<f64>,
}

pub fn build_hamiltonian(params: &ModelParams, cutoff: usize) -> Result<FockHamiltonian> {
    FockHamiltonian::with_drive(params.omega(), params.epsilon(), cutoff)
}

pub(crate) fn pair_factors(cutoff: usize) -> Vec<f64> {
    (0..cutoff.saturating_sub(2))
        .map(|n| (((n + 1) * (n + 2)) as f64).sqrt())
        .collect()
}

impl FockHamiltonian {
    pub fn with_drive(omega: f64, epsilon: f64, cutoff: usize) -> Result<Self> {
        if cutoff < MIN_CUTOFF {
            return Err(invalid("cutoff", cutoff as f64, "must be at least 4"));
        }
        if !(omega.is_finite() && epsilon.is_finite()) {
            return Err(invalid("omega/epsilon", f64::NAN, "must be finite"));
        }
        Ok(Self {
            omega,
            epsilon,
            cutoff,
            pair: pair_factors(cutoff),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn diagonal(&self, n: usize) -> f64 {
        self.omega * n as f64
    }

    /// Matrix element `⟨n|H|n+2⟩`.
    pub fn coupling(&self, n: usize) -> f64 {
        0.5 * self.epsilon * self.pair[n]
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.cutoff;
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = self.diagonal(i);
        }
        for i in 0..n - 2 {
            let c = self.coupling(i);
            h[(i, i + 2)] = c;
            h[(i + 2, i)] = c;
        }
        h
    }

    /// Levels `parity, parity+2, …` of the basis.
    pub fn parity_levels(&self, parity: usize) -> Vec<usize> {
        (parity..self.cutoff).step_by(2).collect()
    }

    /// Tridiagonal block of one parity sector.
    pub fn parity_block(&self, parity: usize) -> DMatrix<f64> {
        let levels = self.parity_levels(parity);
        let m = levels.len();
        let mut h = DMatrix::zeros(m, m);
        for (i, &n) in levels.iter().enumerate() {
            h[(i, i)] = self.diagonal(n);
            if i + 1 < m {
                let c = self.coupling(n);
                h[(i, i + 1)] = c;
                h[(i + 1, i)] = c;
            }
        }
        h
    }

    /// `out = H·psi`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        apply_banded(self.omega, self.epsilon, &self.pair, psi, out);
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_bound(&self) -> f64 {
        spectral_bound(self.omega, self.epsilon, &self.pair)
    }

    /// Eigenvalues of both parity sectors, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = (0..2)
            .flat_map(|p| self.parity_block(p).symmetric_eigenvalues().iter().copied().collect::<Vec<_>>())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

pub(crate) fn apply_banded(
    omega: f64,
    epsilon: f64,
    pair: &[f64],
    psi: &[Complex64],
    out: &mut [Complex64],
) {
    let n = psi.len();
    let half = 0.5 * epsilon;
    for i in 0..n {
        let mut acc = psi[i] * (omega * i as f64);
        if i + 2 < n {
            acc += psi[i + 2] * (half * pair[i]);
        }
        if i >= 2 {
            acc += psi[i - 2] * (half * pair[i - 2]);
        }
        out[i] = acc;
    }
}

pub(crate) fn spectral_bound(omega: f64, epsilon: f64, pair: &[f64]) -> f64 {
    let n = pair.len() + 2;
    let half = 0.5 * epsilon.abs();
    (0..n)
        .map(|i| {
            let mut row = (omega * i as f64).abs();
            if i + 2 < n {
                row += half * pair[i];
            }
            if i >= 2 {
                row += half * pair[i - 2];
            }
            row
        })
        .fold(0.0, f64::max)
}
