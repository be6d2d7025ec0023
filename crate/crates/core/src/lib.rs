//! Classical and quantum sawtooth map laboratory.
//!
//! The crate simulates the quantised sawtooth map on `n_q` qubits two ways:
//! with an FFT split-operator propagator ([`propagator`]) and with the
//! gate-level quantum algorithm ([`circuit`]) built from Hadamard and
//! controlled-phase gates. On top of those, [`lab`] measures fidelity decay
//! under two perturbation channels:
//!
//! - *classical errors*: the kick strength fluctuates randomly at every map
//!   step, a perturbation with a classical limit;
//! - *quantum errors*: every gate is replaced by a slightly wrong unitary.
//!
//! [`classical`] holds the classical map and its stability diagnostics.

pub mod circuit;
pub mod classical;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod lab;
pub mod lattice;
pub mod propagator;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
pub use lattice::LatticeParams;
pub use state::{fidelity, gaussian_packet, random_state, Basis, QuantumState, WavePacketSpec};
