//! Vectorized (superoperator) form of the period map.
//!
//! A linear map `rho -> sum_k A_k rho B_k'` acts on the column-stacked
//! vector `vec(rho)` as the 9x9 matrix `sum_k conj(B_k) (x) A_k`. Period maps
//! raised to large powers (trains of thousands of pulses) are then a handful
//! of 9x9 multiplications via binary exponentiation instead of thousands of
//! dense steps, which is what makes the grid fits affordable.

use num_complex::Complex64 as C64;

use crate::atom::AtomModel;
use crate::density::DensityMatrix3;
use crate::train::{
    decay_kraus, rotation_unitary, z_rotation_unitary, QuantumError, TrainParams,
};
use crate::Mat3;

/// Dense 9x9 superoperator acting on `vec(rho)` (column-major stacking).
pub type SuperOp = nalgebra::SMatrix<C64, 9, 9>;
/// Vectorized density matrix.
pub type RhoVec = nalgebra::SVector<C64, 9>;

/// `conj(B) (x) A`, the superoperator of `rho -> A rho B'` ... with
/// `B' = B.adjoint()` this is `rho -> A rho B.adjoint()`.
fn kron_conj(a: &Mat3, b: &Mat3) -> SuperOp {
    let mut out = SuperOp::zeros();
    // vec(A rho B^dag)_(i + 3j) = sum_{k,l} A_ik conj(B_jl) rho_(k + 3l)
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out[(i + 3 * j, k + 3 * l)] = a[(i, k)] * b[(j, l)].conj();
                }
            }
        }
    }
    out
}

/// Superoperator of the unitary conjugation `rho -> U rho U'`.
pub fn unitary_superop(u: &Mat3) -> SuperOp {
    kron_conj(u, u)
}

/// Superoperator of the Kraus map `rho -> N rho N' + D rho D'`.
pub fn kraus_superop(n: &Mat3, d: &Mat3) -> SuperOp {
    kron_conj(n, n) + kron_conj(d, d)
}

pub fn vectorize(rho: &DensityMatrix3) -> RhoVec {
    let m = rho.matrix();
    let mut v = RhoVec::zeros();
    for i in 0..3 {
        for j in 0..3 {
            v[i + 3 * j] = m[(i, j)];
        }
    }
    v
}

pub fn unvectorize(v: &RhoVec) -> DensityMatrix3 {
    let mut m = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = v[i + 3 * j];
        }
    }
    let mut rho = DensityMatrix3::from_evolution(m);
    rho.renormalize();
    rho
}

/// Precomputed building blocks of a train's period map.
pub struct PeriodMaps {
    /// Full period of a regular pulse: decay o phase o rotation.
    pub full: SuperOp,
    /// Full period of the first (possibly anomalous) pulse.
    pub full_first: SuperOp,
    /// Coherent part only (rotation + phase) of a regular pulse.
    pub coherent: SuperOp,
    /// Coherent part only of the first pulse.
    pub coherent_first: SuperOp,
    /// Complete decay of the excited state (the wait after a train).
    pub complete_decay: SuperOp,
}

impl PeriodMaps {
    pub fn new(params: &TrainParams, atom: &AtomModel) -> Result<Self, QuantumError> {
        let uz = z_rotation_unitary(params.delta(), params.delta_prime(), params.tau_pulse());
        let ur = rotation_unitary(params.theta(), 0.0);
        let ur1 = rotation_unitary(params.theta_first(), params.dphi_first());
        let (kn, kd) = decay_kraus(atom, params.tau_pulse())?;
        let coherent = unitary_superop(&(uz * ur));
        let coherent_first = unitary_superop(&(uz * ur1));
        let decay = kraus_superop(&kn, &kd);
        Ok(Self {
            full: decay * coherent,
            full_first: decay * coherent_first,
            coherent,
            coherent_first,
            complete_decay: complete_decay_superop(atom),
        })
    }

    /// Map of an `n`-pulse train including the final complete decay:
    /// `CD o coherent o full^(n-1)` with the first pulse anomalous
    /// (`n = 0` is the complete decay alone).
    pub fn train_map(&self, n: u32) -> SuperOp {
        if n == 0 {
            return self.complete_decay;
        }
        let m = if n == 1 {
            self.coherent_first
        } else {
            let powered = matrix_power(&self.full, (n - 2) as u64);
            self.coherent * powered * self.full_first
        };
        self.complete_decay * m
    }

    /// Dark-state populations after trains of each length in `counts`,
    /// starting from the ground state. Shares the binary powers of the
    /// period map across the requested lengths.
    pub fn dark_state_populations(&self, counts: &[u32]) -> Vec<f64> {
        let v0 = vectorize(&DensityMatrix3::ground());
        counts
            .iter()
            .map(|&n| {
                let v = self.train_map(n) * v0;
                unvectorize(&v).population(2)
            })
            .collect()
    }
}

/// Superoperator of [`crate::train::complete_decay`].
pub fn complete_decay_superop(atom: &AtomModel) -> SuperOp {
    let mut s = SuperOp::zeros();
    let one = C64::new(1.0, 0.0);
    // Populations: |1> and |3> kept, |2> branches.
    s[(0, 0)] = one; // rho_11 <- rho_11
    s[(8, 8)] = one; // rho_33 <- rho_33
    s[(0, 4)] = C64::new(1.0 - atom.p52(), 0.0); // rho_11 <- rho_22
    s[(8, 4)] = C64::new(atom.p52(), 0.0); // rho_33 <- rho_22
    // 1-3 coherences survive; everything involving |2> dies.
    s[(2, 2)] = one; // rho_31
    s[(6, 6)] = one; // rho_13
    s
}

/// `m^n` by binary exponentiation.
pub fn matrix_power(m: &SuperOp, n: u64) -> SuperOp {
    let mut result = SuperOp::identity();
    let mut base = *m;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = base * result;
        }
        base = base * base;
        e >>= 1;
    }
    result
}
