use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: u32 = 26;

/// Discretisation of the torus for `n_qubits` qubits: dimension `N = 2^n_qubits`,
/// effective Planck constant `T = 2pi/N`, and kick strength `k = K/T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    n_qubits: u32,
    dim: usize,
    hbar: f64,
    big_k: f64,
    kick: f64,
}

impl LatticeParams {
    pub fn new(n_qubits: u32, big_k: f64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        if !big_k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "K must be finite, got {big_k}"
            )));
        }
        let dim = 1usize << n_qubits;
        let hbar = TAU / dim as f64;
        Ok(Self {
            n_qubits,
            dim,
            hbar,
            big_k,
            kick: big_k / hbar,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T = 2pi/N`, the effective Planck constant.
    pub fn hbar_eff(&self) -> f64 {
        self.hbar
    }

    /// Classical parameter `K`.
    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    /// Quantum kick strength `k = K/T`.
    pub fn kick(&self) -> f64 {
        self.kick
    }

    /// Same lattice with a different `K`.
    pub fn with_big_k(&self, big_k: f64) -> Result<Self> {
        Self::new(self.n_qubits, big_k)
    }

    /// Momentum quantum number of basis index `i`: `n = i - N/2`.
    #[inline]
    pub fn momentum_of(&self, index: usize) -> i64 {
        index as i64 - (self.dim / 2) as i64
    }

    /// Grid angle `theta_l = 2pi l / N`.
    #[inline]
    pub fn angle_of(&self, index: usize) -> f64 {
        self.hbar * index as f64
    }
}
