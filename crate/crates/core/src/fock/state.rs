use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Default bound on the population of the top tenth of the basis.
pub const TAIL_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of `‖ψ‖²` from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Pure state on the number basis `|0⟩ … |N−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Validates normalization and tail mass against [`TAIL_TOLERANCE`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tail_tolerance(amps, TAIL_TOLERANCE)
    }

    pub fn with_tail_tolerance(amps: Vec<Complex64>, tail_tolerance: f64) -> Result<Self> {
        let v = Self { amps };
        if v.amps.is_empty() {
            return Err(invalid("cutoff", 0.0, "must be positive"));
        }
        let norm = v.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(invalid("norm", norm, "state must be normalized"));
        }
        v.check_tail(tail_tolerance)?;
        Ok(v)
    }

    /// Number state `|n⟩`.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n >= cutoff {
            return Err(invalid("n", n as f64, "must be below the cutoff"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        Self::number(0, cutoff)
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Population of `n >= N − N/10`.
    pub fn tail_mass(&self) -> f64 {
        let n = self.cutoff();
        self.amps[n - n / 10..].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let tail_mass = self.tail_mass();
        if tail_mass > tolerance || tail_mass.is_nan() {
            return Err(Error::Truncation {
                cutoff: self.cutoff(),
                tail_mass,
                tolerance,
            });
        }
        Ok(())
    }

    /// `⟨n⟩`.
    pub fn mean_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    /// Zero-padded copy with `cutoff` levels; never truncates.
    pub fn padded(&self, cutoff: usize) -> Self {
        let mut amps = self.amps.clone();
        if cutoff > amps.len() {
            amps.resize(cutoff, Complex64::new(0.0, 0.0));
        }
        Self { amps }
    }

    /// `⟨self|other⟩` over the common levels.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Coherent state `|α⟩` for real `α`, built by the recursion
/// `c_n = c_{n−1}·α/√n`.
pub fn coherent_fock(alpha: f64, cutoff: usize) -> Result<FockVector> {
    if !alpha.is_finite() {
        return Err(invalid("alpha", alpha, "must be finite"));
    }
    if cutoff == 0 {
        return Err(invalid("cutoff", 0.0, "must be positive"));
    }
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = (-0.5 * alpha * alpha).exp();
    amps.push(Complex64::new(c, 0.0));
    for n in 1..cutoff {
        c *= alpha / (n as f64).sqrt();
        amps.push(Complex64::new(c, 0.0));
    }
    let v = FockVector { amps };
    v.check_tail(TAIL_TOLERANCE)?;
    Ok(renormalized(v))
}

/// Squeezed vacuum `S(r)|0⟩` via `c_{n+2} = tanh r·√((n+1)/(n+2))·c_n`,
/// odd amplitudes zero, `c_0 > 0`, then normalized (`c_0 = (cosh r)^{−1/2}`).
pub fn squeezed_vacuum_fock(r: f64, cutoff: usize) -> Result<FockVector> {
    if !r.is_finite() {
        return Err(invalid("r", r, "must be finite"));
    }
    if cutoff == 0 {
        return Err(invalid("cutoff", 0.0, "must be positive"));
    }
    let t = r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff];
    let mut c = 1.0 / r.cosh().sqrt();
    amps[0] = Complex64::new(c, 0.0);
    let mut n = 0;
    while n + 2 < cutoff {
        c *= t * ((n + 1) as f64 / (n + 2) as f64).sqrt();
        amps[n + 2] = Complex64::new(c, 0.0);
        n += 2;
    }
    let v = FockVector { amps };
    v.check_tail(TAIL_TOLERANCE)?;
    Ok(renormalized(v))
}

fn renormalized(mut v: FockVector) -> FockVector {
    let scale = v.norm_sqr().sqrt().recip();
    for a in &mut v.amps {
        *a *= scale;
    }
    v
}

/// `|⟨ψ|φ⟩|²` for states of equal cutoff.
pub fn fidelity(psi: &FockVector, phi: &FockVector) -> Result<f64> {
    if psi.cutoff() != phi.cutoff() {
        return Err(Error::DimensionMismatch {
            left: psi.cutoff(),
            right: phi.cutoff(),
        });
    }
    Ok(psi.inner(phi).norm_sqr())
}

/// Fidelity with the shorter state zero-padded.
pub fn fidelity_padded(psi: &FockVector, phi: &FockVector) -> f64 {
    // amplitudes above the shorter cutoff meet zeros
    psi.inner(phi).norm_sqr()
}
