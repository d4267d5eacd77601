//! Density matrix of the three-level system.

use num_complex::Complex64 as C64;

use crate::train::QuantumError;
use crate::Mat3;

/// Hermiticity / trace tolerance accepted by [`DensityMatrix3::from_matrix`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance maintained by the evolution maps.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for positive semidefiniteness checks.
pub const PSD_FLOOR: f64 = -1e-10;

/// 3x3 density matrix over the states `{|1>, |2>, |3>}` (indices 0, 1, 2).
///
/// Valid instances are Hermitian, unit trace and positive semidefinite within
/// the tolerances above; the evolution maps re-Hermitize and renormalize after
/// every period so those invariants survive long trains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(Mat3);

impl DensityMatrix3 {
    /// Pure state `|k><k|` for a basis index 0, 1 or 2.
    pub fn pure(index: usize) -> Self {
        assert!(index < 3, "basis index out of range");
        let mut m = Mat3::zeros();
        m[(index, index)] = C64::new(1.0, 0.0);
        Self(m)
    }

    /// Ground state `|1><1|`.
    pub fn ground() -> Self {
        Self::pure(0)
    }

    /// Density matrix of a normalized pure state with given amplitudes.
    pub fn from_pure(amplitudes: &[C64; 3]) -> Result<Self, QuantumError> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(QuantumError::InvalidParameter(format!(
                "state not normalized: |psi|^2 = {norm2}"
            )));
        }
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Ok(Self(m))
    }

    /// Equal superposition `(|1> + |3>)/sqrt(2)`, the ideal state after a
    /// resonant pi/2 pulse on the 1-3 transition.
    pub fn superposition_13() -> Self {
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_pure(&[a, C64::new(0.0, 0.0), a]).expect("normalized by construction")
    }

    /// Validate an arbitrary matrix as a density matrix.
    pub fn from_matrix(m: Mat3) -> Result<Self, QuantumError> {
        let herm = hermiticity_error(&m);
        if herm > HERMITICITY_TOL {
            return Err(QuantumError::InvalidParameter(format!(
                "matrix not Hermitian: max |rho_ij - conj(rho_ji)| = {herm:.3e}"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QuantumError::InvalidParameter(format!(
                "trace must be 1, got {tr}"
            )));
        }
        let rho = Self(m);
        let min_ev = rho.min_eigenvalue();
        if min_ev < PSD_FLOOR {
            return Err(QuantumError::InvalidParameter(format!(
                "matrix not positive semidefinite: min eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Wrap a matrix produced by a trace-preserving map without re-validating.
    pub(crate) fn from_evolution(m: Mat3) -> Self {
        Self(m)
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Population of basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    /// Coherence `Tr(|1><3| rho) = <3|rho|1>`.
    pub fn coherence_13(&self) -> C64 {
        self.0[(2, 0)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Smallest eigenvalue (closed form for a Hermitian 3x3 matrix).
    pub fn min_eigenvalue(&self) -> f64 {
        let m = &self.0;
        let p1 = m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr();
        let d = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re];
        if p1 < 1e-300 {
            return d[0].min(d[1]).min(d[2]);
        }
        let q = (d[0] + d[1] + d[2]) / 3.0;
        let p2 = (d[0] - q).powi(2) + (d[1] - q).powi(2) + (d[2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (m - Mat3::identity() * C64::new(q, 0.0)) / C64::new(p, 0.0);
        let r = (b.determinant().re / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        // Smallest root of the characteristic cubic.
        q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos()
    }

    /// Re-Hermitize and renormalize the trace; bounds floating-point drift
    /// over trains of thousands of periods.
    pub(crate) fn renormalize(&mut self) {
        let adj = self.0.adjoint();
        self.0 = (self.0 + adj) * C64::new(0.5, 0.0);
        let tr = self.0.trace().re;
        if (tr - 1.0).abs() > 1e-15 && tr > 0.0 {
            self.0 /= C64::new(tr, 0.0);
        }
    }
}

/// Populations and the 1-3 coherence of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// `Tr(|1><3| rho)`.
    pub c13: C64,
}

fn hermiticity_error(m: &Mat3) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
