//! Pulse-sequence optimization for a dephasing qubit.
//!
//! A qubit subject to classical, wide-sense-stationary Gaussian frequency
//! noise loses coherence at a rate set by the overlap between the noise
//! spectrum and the filter function of the applied pulse sequence. This
//! crate simulates that physics and trains a double deep Q-network to
//! reshape the pulse times so the overlap shrinks, using the generators of
//! Thompson's group F (exact piecewise-linear maps of the unit interval)
//! as a five-element discrete action set.
//!
//! Layout:
//! - [`filterfn`]: switching function, filter function, attenuation χ and
//!   fidelity, T₂* timescale.
//! - [`spectra`]: randomized Lorentzian test spectra and the
//!   Ornstein–Uhlenbeck trajectory oracle.
//! - [`sequences`]: canonical initial sequences (PDD, CPMG, UDD, CDD, PRDD).
//! - [`thompson`]: exact dyadic-rational piecewise-linear maps, the action
//!   algebra.
//! - [`env`]: the deterministic episode MDP with sparse terminal reward.
//! - [`qnet`]: from-scratch value network, Adam, replay buffer, DDQN
//!   update, epsilon schedule.
//! - [`harness`]: training runs, the multi-spectrum benchmark, trace
//!   replay, and report files.

pub mod env;
pub mod error;
pub mod filterfn;
pub mod harness;
pub mod integrate;
pub mod qnet;
pub mod rng;
pub mod sequences;
pub mod spectra;
pub mod thompson;

pub use error::{Error, Result};
