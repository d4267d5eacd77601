//! Quantum-jump trajectory sampler.
//!
//! Independent cross-check of the density-matrix evolution: pure-state
//! trajectories with stochastic decay jumps whose ensemble average reproduces
//! the period map's populations. The implementation deliberately shares no
//! matrix code with the density-matrix path; it works on bare amplitude
//! triples and evaluates its own decay exponentials.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atom::AtomModel;
use crate::exec;
use crate::train::TrainParams;

/// Final-state label of one trajectory.
pub type StateLabel = u8;

/// Sample a single trajectory through an `n`-pulse train and return the
/// measured state label in `{1, 2, 3}`.
///
/// Per period the pulse and detuning phases act on the amplitudes; between
/// pulses the excited amplitude either jumps (to `|1>` with probability
/// `p |a2|^2`, to `|3>` with `q |a2|^2`) or is damped by the no-jump factor
/// `sqrt(1 - p - q)`. The wait after the last pulse is sampled as a complete
/// decay, so the surviving excited population branches with the dark-state
/// fraction before readout. Deterministic for a fixed seed.
pub fn mc_trajectory_final_state(
    psi0: &[C64; 3],
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
    seed: u64,
) -> StateLabel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    trajectory_with_rng(psi0, params, atom, n, &mut rng)
}

fn trajectory_with_rng(
    psi0: &[C64; 3],
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
    rng: &mut ChaCha8Rng,
) -> StateLabel {
    let norm2: f64 = psi0.iter().map(|a| a.norm_sqr()).sum();
    assert!(
        (norm2 - 1.0).abs() < 1e-9,
        "trajectory input state must be normalized"
    );
    let tau = params.tau_pulse();
    let p = 1.0 - (-atom.gamma_ps() * tau).exp();
    let q = 1.0 - (-atom.gamma_pd() * tau).exp();
    let no_jump_amp = (1.0 - p - q).max(0.0).sqrt();

    let mut a = *psi0;
    for k in 0..n {
        let (theta, phi) = params.pulse_angles(k as usize);
        apply_pulse(&mut a, theta, phi);
        apply_phases(&mut a, params.delta(), params.delta_prime(), tau);
        if k + 1 < n {
            let p2 = a[1].norm_sqr();
            let r: f64 = rng.gen();
            if r < p * p2 {
                a = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
            } else if r < (p + q) * p2 {
                // Jump into the dark state is absorbing: no later pulse or
                // phase moves population out of |3>.
                return 3;
            } else {
                a[1] *= no_jump_amp;
                let inv = (a.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt().recip();
                for c in a.iter_mut() {
                    *c *= inv;
                }
            }
        }
    }

    // Readout after the wait: excited population has fully decayed,
    // branching into |3> with the dark-state fraction.
    let p2 = a[1].norm_sqr();
    let p3 = a[2].norm_sqr() + atom.p52() * p2;
    let r: f64 = rng.gen();
    if r < p3 {
        3
    } else {
        1
    }
}

/// Ensemble frequencies `(P1, P3)` over `n_traj` trajectories. Trajectory `i`
/// uses its own seed derived from `(seed, i)`, so the result is independent
/// of scheduling and identical between the parallel and sequential paths.
pub fn ensemble_populations(
    psi0: &[C64; 3],
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
    n_traj: u32,
    seed: u64,
) -> (f64, f64) {
    const CHUNK: u32 = 2048;
    let chunks = n_traj.div_ceil(CHUNK);
    let counts = exec::map_indexed(chunks as usize, |chunk| {
        let lo = chunk as u32 * CHUNK;
        let hi = (lo + CHUNK).min(n_traj);
        count_range(psi0, params, atom, n, seed, lo, hi)
    });
    finalize_counts(&counts, n_traj)
}

/// Sequential reference implementation of [`ensemble_populations`].
pub fn ensemble_populations_seq(
    psi0: &[C64; 3],
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
    n_traj: u32,
    seed: u64,
) -> (f64, f64) {
    let counts = vec![count_range(psi0, params, atom, n, seed, 0, n_traj)];
    finalize_counts(&counts, n_traj)
}

fn count_range(
    psi0: &[C64; 3],
    params: &TrainParams,
    atom: &AtomModel,
    n: u32,
    seed: u64,
    lo: u32,
    hi: u32,
) -> (u64, u64) {
    let mut ones = 0u64;
    let mut threes = 0u64;
    for i in lo..hi {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
        match trajectory_with_rng(psi0, params, atom, n, &mut rng) {
            1 => ones += 1,
            3 => threes += 1,
            _ => {}
        }
    }
    (ones, threes)
}

fn finalize_counts(counts: &[(u64, u64)], n_traj: u32) -> (f64, f64) {
    let ones: u64 = counts.iter().map(|c| c.0).sum();
    let threes: u64 = counts.iter().map(|c| c.1).sum();
    (ones as f64 / n_traj as f64, threes as f64 / n_traj as f64)
}

/// splitmix64 finalizer over the (seed, index) pair.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn apply_pulse(a: &mut [C64; 3], theta: f64, phi: f64) {
    let c = C64::new((0.5 * theta).cos(), 0.0);
    let s = (0.5 * theta).sin();
    let upper = C64::new(0.0, s) * C64::from_polar(1.0, -phi);
    let lower = C64::new(0.0, s) * C64::from_polar(1.0, phi);
    let (a1, a2) = (a[0], a[1]);
    a[0] = c * a1 + upper * a2;
    a[1] = lower * a1 + c * a2;
}

fn apply_phases(a: &mut [C64; 3], delta: f64, delta_prime: f64, tau: f64) {
    a[0] *= C64::from_polar(1.0, 0.5 * (delta + delta_prime) * tau);
    a[1] *= C64::from_polar(1.0, -0.5 * delta * tau);
    a[2] *= C64::from_polar(1.0, -0.5 * delta_prime * tau);
}
