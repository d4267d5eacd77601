//! Simulation and parameter-estimation toolkit for a three-level trapped ion
//! driven by a high-repetition-rate pulsed laser.
//!
//! The ion is modeled as a three-level system: the ground state `|1>`, a
//! short-lived excited state `|2>` that the pulses couple to, and a metastable
//! "dark" state `|3>` reached by spontaneous-decay branching. Each pulse
//! period applies a coherent rotation on the 1-2 transition, detuning phases,
//! and a decay map; iterating the period map over a pulse train yields the
//! dark-state pumping, burst-accumulation and Ramsey signals that the fitting
//! layer inverts for the per-pulse rotation angle and related parameters.
//!
//! Modules:
//! - [`atom`], [`density`], [`train`]: per-period density-matrix evolution.
//! - [`montecarlo`]: independent quantum-jump trajectory sampler used to
//!   cross-check the density-matrix map.
//! - [`experiments`]: the measurement protocols (dark-state scans, bursts,
//!   power scans, Ramsey fringes) built on the core evolution.
//! - [`fit`]: bounded Levenberg-Marquardt engine and the protocol fits.
//! - [`interferometry`]: delayed-arm interferogram synthesis and ellipse-fit
//!   phase extraction.
//! - [`scheduler`]: pulse-sequence compilation onto dual-gate waveforms,
//!   constraint validation, switch-on transients and the power chain.
//!
//! All simulation entry points are pure functions; with the `parallel`
//! feature (on by default) the embarrassingly parallel loops (trajectory
//! ensembles, grid scans, multi-start fits) run on rayon, with identical
//! results to the sequential fallback.

pub mod atom;
pub mod density;
pub mod exec;
pub mod experiments;
pub mod fit;
pub mod interferometry;
pub mod montecarlo;
pub mod scheduler;
pub mod superop;
pub mod train;

pub use atom::AtomModel;
pub use density::{DensityMatrix3, Observables};
pub use train::{
    complete_decay, decay_kraus, observables, rotation_unitary, simulate_train, step,
    z_rotation_unitary, QuantumError, TrainParams,
};

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// 3x3 complex matrix (operators on the three-level Hilbert space).
pub type Mat3 = nalgebra::Matrix3<Complex64>;
