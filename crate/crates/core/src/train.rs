//! Per-period evolution of the ion under a pulse train.
//!
//! One pulse period acts on the density matrix as
//! `rho -> N Uz Ur rho Ur' Uz' N' + D Uz Ur rho Ur' Uz' D'` (primes denote
//! adjoints): a coherent rotation `Ur` on the 1-2 transition for the pulse
//! itself, a diagonal phase `Uz` accumulated from the detunings over the
//! period, and the Kraus pair `(N, D)` for spontaneous decay of `|2>` during
//! the period. A train of `n` pulses iterates this map with the decay applied
//! between pulses, and the wait after the last pulse is modeled as a complete
//! decay of whatever excited population remains.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::AtomModel;
use crate::density::{DensityMatrix3, Observables};
use crate::Mat3;

/// Errors from the evolution maps.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuantumError {
    /// The decay Kraus pair stops being trace non-increasing: the pulse
    /// period is too long for the two-operator decay map.
    #[error("pulse period too long for the decay map: 1 - p - q = {survival:.6e} < 0")]
    InvalidDecay { survival: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Parameters of a pulse train.
///
/// `theta` is the rotation angle per pulse on the 1-2 transition. `delta` is
/// the angular detuning of the drive from that transition and `delta_prime`
/// an angular shift of the 1-3 splitting, both in rad/ns, applied over one
/// pulse period. The first pulse after a dark time may carry its own angle
/// `theta_first` and rotation-axis phase `dphi_first` (amplifier memory).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    theta: f64,
    theta_first: f64,
    dphi_first: f64,
    delta: f64,
    delta_prime: f64,
    tau_pulse: f64,
}

impl TrainParams {
    /// Train with no first-pulse anomaly. Angles in radians (normalized to
    /// `[0, 2pi)`), detunings in rad/ns, period in ns.
    pub fn new(
        theta: f64,
        delta: f64,
        delta_prime: f64,
        tau_pulse: f64,
    ) -> Result<Self, QuantumError> {
        if !tau_pulse.is_finite() || tau_pulse <= 0.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "pulse period must be positive, got {tau_pulse}"
            )));
        }
        for (name, v) in [("theta", theta), ("delta", delta), ("delta_prime", delta_prime)] {
            if !v.is_finite() {
                return Err(QuantumError::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        let theta = theta.rem_euclid(TAU);
        Ok(Self {
            theta,
            theta_first: theta,
            dphi_first: 0.0,
            delta,
            delta_prime,
            tau_pulse,
        })
    }

    /// Same, with the period given as a repetition rate in GHz.
    pub fn from_rep_rate_ghz(
        theta: f64,
        delta: f64,
        delta_prime: f64,
        rep_rate_ghz: f64,
    ) -> Result<Self, QuantumError> {
        if !rep_rate_ghz.is_finite() || rep_rate_ghz <= 0.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "repetition rate must be positive, got {rep_rate_ghz}"
            )));
        }
        Self::new(theta, delta, delta_prime, 1.0 / rep_rate_ghz)
    }

    /// Configure the first-pulse anomaly (angles in radians).
    pub fn with_first_pulse(mut self, theta_first: f64, dphi_first: f64) -> Self {
        self.theta_first = theta_first.rem_euclid(TAU);
        self.dphi_first = dphi_first.rem_euclid(TAU);
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn theta_first(&self) -> f64 {
        self.theta_first
    }
    pub fn dphi_first(&self) -> f64 {
        self.dphi_first
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }
    pub fn tau_pulse(&self) -> f64 {
        self.tau_pulse
    }

    /// Rotation angle and axis phase of pulse `k` (0-based).
    pub fn pulse_angles(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (self.theta_first, self.dphi_first)
        } else {
            (self.theta, 0.0)
        }
    }
}

/// Rotation of the 1-2 Bloch vector by `theta` around the equatorial axis at
/// angle `phi` from x: `exp(i/2 theta (cos phi sx + sin phi sy))`, identity
/// on `|3>`.
pub fn rotation_unitary(theta: f64, phi: f64) -> Mat3 {
    let half = 0.5 * theta;
    let c = C64::new(half.cos(), 0.0);
    let s = half.sin();
    // i sin(theta/2) e^{-i phi} and i sin(theta/2) e^{+i phi}
    let upper = C64::new(0.0, s) * C64::from_polar(1.0, -phi);
    let lower = C64::new(0.0, s) * C64::from_polar(1.0, phi);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Mat3::new(c, upper, zero, lower, c, zero, zero, zero, one)
}

/// Diagonal phase accumulated over one period from the detunings:
/// `exp(i/2 [delta (|1><1| - |2><2|) + delta' (|1><1| - |3><3|)] tau)`.
pub fn z_rotation_unitary(delta: f64, delta_prime: f64, tau_pulse: f64) -> Mat3 {
    assert!(tau_pulse > 0.0, "pulse period must be positive");
    let zero = C64::new(0.0, 0.0);
    let d1 = C64::from_polar(1.0, 0.5 * (delta + delta_prime) * tau_pulse);
    let d2 = C64::from_polar(1.0, -0.5 * delta * tau_pulse);
    let d3 = C64::from_polar(1.0, -0.5 * delta_prime * tau_pulse);
    Mat3::new(d1, zero, zero, zero, d2, zero, zero, zero, d3)
}

/// Kraus pair for spontaneous decay of `|2>` over one period:
/// `N = |1><1| + sqrt(1-p-q) |2><2| + |3><3|`,
/// `D = sqrt(p) |1><2| + sqrt(q) |3><2|`,
/// with `p = 1 - exp(-gamma_ps tau)` and `q = 1 - exp(-gamma_pd tau)`.
/// `N'N + D'D = I` holds exactly.
pub fn decay_kraus(atom: &AtomModel, tau_pulse: f64) -> Result<(Mat3, Mat3), QuantumError> {
    let (p, q) = decay_probabilities(atom, tau_pulse);
    let survival = 1.0 - p - q;
    if survival < 0.0 {
        return Err(QuantumError::InvalidDecay { survival });
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let n = Mat3::new(
        one,
        zero,
        zero,
        zero,
        C64::new(survival.sqrt(), 0.0),
        zero,
        zero,
        zero,
        one,
    );
    let mut d = Mat3::zeros();
    d[(0, 1)] = C64::new(p.sqrt(), 0.0);
    d[(2, 1)] = C64::new(q.sqrt(), 0.0);
    Ok((n, d))
}

/// Jump probabilities `(p, q)` of the decay map over one period.
pub fn decay_probabilities(atom: &AtomModel, tau_pulse: f64) -> (f64, f64) {
    let p = 1.0 - (-atom.gamma_ps() * tau_pulse).exp();
    let q = 1.0 - (-atom.gamma_pd() * tau_pulse).exp();
    (p, q)
}

/// One full pulse period: rotation, detuning phase, then the decay map.
/// `is_first` selects the first-pulse rotation angle and axis.
pub fn step(
    rho: &DensityMatrix3,
    params: &TrainParams,
    atom: &AtomModel,
    is_first: bool,
) -> Result<DensityMatrix3, QuantumError> {
    let (theta, phi) = if is_first {
        (params.theta_first, params.dphi_first)
    } else {
        (params.theta, 0.0)
    };
    let coherent = apply_pulse_unitaries(rho.matrix(), theta, phi, params);
    let (n, d) = decay_kraus(atom, params.tau_pulse)?;
    let mut out = DensityMatrix3::from_evolution(apply_decay(&coherent, &n, &d));
    out.renormalize();
    Ok(out)
}

/// Complete decay of the excited state: the `|2>` population branches into
/// `|3>` with the atom's dark-state fraction and into `|1>` otherwise; all
/// coherences involving `|2>` vanish, the 1-3 coherence is untouched.
pub fn complete_decay(rho: &DensityMatrix3, atom: &AtomModel) -> DensityMatrix3 {
    let m = rho.matrix();
    let p2 = m[(1, 1)].re;
    let mut out = Mat3::zeros();
    out[(0, 0)] = C64::new(m[(0, 0)].re + (1.0 - atom.p52()) * p2, 0.0);
    out[(1, 1)] = C64::new(0.0, 0.0);
    out[(2, 2)] = C64::new(m[(2, 2)].re + atom.p52() * p2, 0.0);
    out[(0, 2)] = m[(0, 2)];
    out[(2, 0)] = m[(2, 0)];
    let mut rho = DensityMatrix3::from_evolution(out);
    rho.renormalize();
    rho
}

/// Populations and 1-3 coherence of a state.
pub fn observables(rho: &DensityMatrix3) -> Observables {
    Observables {
        p1: rho.population(0),
        p2: rho.population(1),
        p3: rho.population(2),
        c13: rho.coherence_13(),
    }
}

/// Evolve through `n` pulses *without* the final complete decay: the pulse
/// (and its period's phases) is applied `n` times, the decay map between
/// pulses, i.e. `n - 1` times. Exposes the pre-detection state.
pub fn evolve_train(
    rho0: &DensityMatrix3,
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
) -> Result<DensityMatrix3, QuantumError> {
    let mut rho = *rho0;
    if n == 0 {
        return Ok(rho);
    }
    let (kn, kd) = decay_kraus(atom, params.tau_pulse)?;
    for k in 0..n {
        let (theta, phi) = params.pulse_angles(k as usize);
        let mut m = apply_pulse_unitaries(rho.matrix(), theta, phi, params);
        if k + 1 < n {
            m = apply_decay(&m, &kn, &kd);
        }
        rho = DensityMatrix3::from_evolution(m);
        rho.renormalize();
    }
    Ok(rho)
}

/// Full train simulation: `n` pulses (the first flagged as such), decay
/// between pulses, then complete decay of the excited state during the wait
/// after the train. `n = 0` reduces to the complete decay of the input.
pub fn simulate_train(
    rho0: &DensityMatrix3,
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
) -> Result<DensityMatrix3, QuantumError> {
    let rho = evolve_train(rho0, params, atom, n)?;
    Ok(complete_decay(&rho, atom))
}

pub(crate) fn apply_pulse_unitaries(m: &Mat3, theta: f64, phi: f64, params: &TrainParams) -> Mat3 {
    let ur = rotation_unitary(theta, phi);
    let uz = z_rotation_unitary(params.delta, params.delta_prime, params.tau_pulse);
    let u = uz * ur;
    u * m * u.adjoint()
}

pub(crate) fn apply_decay(m: &Mat3, n: &Mat3, d: &Mat3) -> Mat3 {
    n * m * n.adjoint() + d * m * d.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn mat_dist(a: &Mat3, b: &Mat3) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rotation_identity_at_zero_angle() {
        for phi in [0.0, 1.0, 4.5] {
            assert!(mat_dist(&rotation_unitary(0.0, phi), &Mat3::identity()) < 1e-15);
        }
    }

    #[test]
    fn rotation_pi_is_full_flip() {
        let u = rotation_unitary(PI, 0.0);
        let rho = DensityMatrix3::ground();
        let out = u * rho.matrix() * u.adjoint();
        assert_relative_eq!(out[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(out[(0, 0)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_half_pi_matches_two_level_exponential() {
        // Independent route: exp(i/2 theta sx) on the 1-2 block evaluated by
        // hand, cos(theta/2) I + i sin(theta/2) sx.
        let theta = PI / 2.0;
        let u = rotation_unitary(theta, 0.0);
        let rho = DensityMatrix3::ground();
        let out = u * rho.matrix() * u.adjoint();
        assert_relative_eq!(out[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(out[(0, 1)].norm(), 0.5, epsilon = 1e-12);
        // Unitarity.
        assert!(mat_dist(&(u.adjoint() * u), &Mat3::identity()) < 1e-12);
    }

    #[test]
    fn rotation_axis_phase_enters_off_diagonal() {
        let theta = 0.7;
        let phi = 1.9;
        let u = rotation_unitary(theta, phi);
        let upper = C64::new(0.0, (theta / 2.0).sin()) * C64::from_polar(1.0, -phi);
        let lower = C64::new(0.0, (theta / 2.0).sin()) * C64::from_polar(1.0, phi);
        assert!((u[(0, 1)] - upper).norm() < 1e-15);
        assert!((u[(1, 0)] - lower).norm() < 1e-15);
        assert!(mat_dist(&(u.adjoint() * u), &Mat3::identity()) < 1e-12);
    }

    #[test]
    fn z_rotation_identity_when_resonant() {
        assert!(mat_dist(&z_rotation_unitary(0.0, 0.0, 1.0), &Mat3::identity()) < 1e-15);
    }

    #[test]
    fn z_rotation_full_turn_phases() {
        // delta = 2pi rad/ns over 1 ns: diag(-1, -1, 1) up to global phase,
        // evaluated directly from the diagonal exponential.
        let u = z_rotation_unitary(TAU, 0.0, 1.0);
        assert!((u[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((u[(1, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((u[(2, 2)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        // Populations of any state are untouched by a diagonal unitary.
        let rho = DensityMatrix3::superposition_13();
        let out = u * rho.matrix() * u.adjoint();
        for k in 0..3 {
            assert_relative_eq!(out[(k, k)].re, rho.population(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn z_rotation_diagonal_moduli_are_one() {
        let u = z_rotation_unitary(0.321, -1.7, 0.6);
        for k in 0..3 {
            assert_relative_eq!(u[(k, k)].norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn decay_kraus_vanishes_at_zero_period() {
        // tau -> 0 limit: evaluate at a tiny period.
        let atom = AtomModel::standard();
        let (n, d) = decay_kraus(&atom, 1e-12).unwrap();
        assert!(mat_dist(&n, &Mat3::identity()) < 1e-6);
        assert!(d.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-6);
    }

    #[test]
    fn decay_kraus_matches_exponentials_and_completeness() {
        // Independent evaluation of the exponentials at 5 GHz.
        let atom = AtomModel::standard();
        let tau = 0.2;
        let p_expected = 1.0 - (-0.9413 * 0.2 / 6.924f64).exp();
        let q_expected = 1.0 - (-0.0587 * 0.2 / 6.924f64).exp();
        let (p, q) = decay_probabilities(&atom, tau);
        assert_relative_eq!(p, p_expected, epsilon = 1e-15);
        assert_relative_eq!(q, q_expected, epsilon = 1e-15);
        let (n, d) = decay_kraus(&atom, tau).unwrap();
        let completeness = n.adjoint() * n + d.adjoint() * d;
        assert!(mat_dist(&completeness, &Mat3::identity()) < 1e-14);
    }

    #[test]
    fn decay_kraus_rejects_unphysical_period() {
        // Long period limit: the survival 1 - p - q turns negative.
        let atom = AtomModel::standard();
        let err = decay_kraus(&atom, 100.0).unwrap_err();
        assert!(matches!(err, QuantumError::InvalidDecay { .. }));
    }

    #[test]
    fn step_leaves_ground_state_dark() {
        let atom = AtomModel::standard();
        let params = TrainParams::new(0.0, 0.0, 0.0, 0.8).unwrap();
        let rho = DensityMatrix3::ground();
        let out = step(&rho, &params, &atom, false).unwrap();
        assert!(mat_dist(out.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn step_pi_pulse_without_decay_inverts() {
        let atom = AtomModel::without_decay();
        let params = TrainParams::new(PI, 0.0, 0.0, 0.8).unwrap();
        let out = step(&DensityMatrix3::ground(), &params, &atom, false).unwrap();
        assert_relative_eq!(out.population(1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn step_pi_pulse_with_decay_branches() {
        // One-step hand computation: after a pi pulse all population is in
        // |2>, the decay map then distributes (p, q, 1-p-q).
        let atom = AtomModel::standard();
        let tau = 0.8;
        let params = TrainParams::new(PI, 0.0, 0.0, tau).unwrap();
        let (p, q) = decay_probabilities(&atom, tau);
        let out = step(&DensityMatrix3::ground(), &params, &atom, false).unwrap();
        assert_relative_eq!(out.population(1), 1.0 - p - q, epsilon = 1e-12);
        assert_relative_eq!(out.population(0), p, epsilon = 1e-12);
        assert_relative_eq!(out.population(2), q, epsilon = 1e-12);
    }

    #[test]
    fn step_preserves_trace_and_hermiticity() {
        let atom = AtomModel::standard();
        let params = TrainParams::new(1.1, 0.4, -0.2, 0.4)
            .unwrap()
            .with_first_pulse(1.7, 2.2);
        let mut rho = DensityMatrix3::superposition_13();
        for k in 0..200 {
            rho = step(&rho, &params, &atom, k == 0).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-10);
            assert!(rho.hermiticity_error() < 1e-12);
            assert!(rho.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn complete_decay_branches_excited_population() {
        let atom = AtomModel::standard();
        let out = complete_decay(&DensityMatrix3::pure(1), &atom);
        assert_relative_eq!(out.population(0), 1.0 - 0.0587, epsilon = 1e-12);
        assert_relative_eq!(out.population(2), 0.0587, epsilon = 1e-12);
        assert_relative_eq!(out.population(1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn complete_decay_is_identity_off_the_excited_state() {
        let atom = AtomModel::standard();
        let ground = complete_decay(&DensityMatrix3::ground(), &atom);
        assert!(mat_dist(ground.matrix(), DensityMatrix3::ground().matrix()) < 1e-15);
        let sup = DensityMatrix3::superposition_13();
        let out = complete_decay(&sup, &atom);
        assert!(mat_dist(out.matrix(), sup.matrix()) < 1e-15);
        assert_relative_eq!(out.coherence_13().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn observables_of_maximally_mixed_state() {
        let m = Mat3::identity() * C64::new(1.0 / 3.0, 0.0);
        let rho = DensityMatrix3::from_matrix(m).unwrap();
        let obs = observables(&rho);
        assert_relative_eq!(obs.p1, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(obs.p2, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(obs.p3, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(obs.c13, C64::new(0.0, 0.0));
        assert_relative_eq!(obs.p1 + obs.p2 + obs.p3, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn observables_after_half_pulse() {
        let atom = AtomModel::without_decay();
        let params = TrainParams::new(PI / 2.0, 0.0, 0.0, 0.8).unwrap();
        let rho = evolve_train(&DensityMatrix3::ground(), &params, &atom, 1).unwrap();
        let obs = observables(&rho);
        assert_relative_eq!(obs.p1, 0.5, epsilon = 1e-12);
        assert_relative_eq!(obs.p2, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn single_pulse_dark_state_closed_form() {
        // On resonance every decay path branches with the dark-state
        // fraction, so one pulse pumps exactly sin^2(theta/2) * p52.
        let atom = AtomModel::standard();
        for theta in [0.1 * PI, 0.345 * PI, PI] {
            for tau in [0.2, 0.8] {
                let params = TrainParams::new(theta, 0.0, 0.0, tau).unwrap();
                let rho = simulate_train(&DensityMatrix3::ground(), &params, &atom, 1).unwrap();
                let expected = (theta / 2.0).sin().powi(2) * atom.p52();
                assert_relative_eq!(rho.population(2), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn train_without_decay_composes_rotations() {
        let atom = AtomModel::without_decay();
        let theta = 0.345 * PI;
        let params = TrainParams::new(theta, 0.0, 0.0, 0.8).unwrap();
        for n in [1u32, 7, 40] {
            let rho = evolve_train(&DensityMatrix3::ground(), &params, &atom, n).unwrap();
            let u = rotation_unitary(n as f64 * theta, 0.0);
            let expected = u * DensityMatrix3::ground().matrix() * u.adjoint();
            assert!(mat_dist(rho.matrix(), &expected) < 1e-9);
        }
    }

    #[test]
    fn zero_pulse_train_is_complete_decay() {
        let atom = AtomModel::standard();
        let params = TrainParams::new(1.0, 0.0, 0.0, 0.8).unwrap();
        let rho0 = DensityMatrix3::pure(1);
        let out = simulate_train(&rho0, &params, &atom, 0).unwrap();
        assert_relative_eq!(out.population(2), atom.p52(), epsilon = 1e-12);
    }

    #[test]
    fn long_resonant_train_saturates_dark_state() {
        let atom = AtomModel::standard();
        let params = TrainParams::from_rep_rate_ghz(0.345 * PI, 0.0, 0.0, 1.25).unwrap();
        let rho = simulate_train(&DensityMatrix3::ground(), &params, &atom, 5000).unwrap();
        assert!(rho.population(2) > 0.999, "P_D = {}", rho.population(2));
    }
}
