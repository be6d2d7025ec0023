//! Split-operator evolution of the quantum sawtooth map.
//!
//! One map step is `U = exp(-i T n^2 / 2) exp(i k (theta - pi)^2 / 2)`: the
//! kick is diagonal on the angle grid, the free rotation on the momentum
//! grid, and the two are joined by FFTs. States enter and leave a step in
//! the momentum basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierPlan;
use crate::lattice::LatticeParams;
use crate::rng::{stream, StreamDomain};
use crate::state::{Basis, QuantumState};

fn check_basis(state: &QuantumState, expected: Basis) -> Result<()> {
    if state.basis() != expected {
        return Err(Error::WrongBasis {
            expected,
            found: state.basis(),
        });
    }
    Ok(())
}

/// `(theta_l - pi)^2 / 2` on the angle grid.
fn kick_profile(lattice: &LatticeParams) -> Vec<f64> {
    (0..lattice.dim())
        .map(|l| {
            let x = lattice.angle_of(l) - PI;
            0.5 * x * x
        })
        .collect()
}

/// `n^2 / 2` on the momentum grid.
fn rotation_profile(lattice: &LatticeParams) -> Vec<f64> {
    (0..lattice.dim())
        .map(|i| {
            let n = lattice.momentum_of(i) as f64;
            0.5 * n * n
        })
        .collect()
}

/// Multiplies angle amplitudes by `exp(i k_eff (theta_l - pi)^2 / 2)`.
pub fn apply_kick(state: &mut QuantumState, k_eff: f64) -> Result<()> {
    check_basis(state, Basis::Angle)?;
    let lattice = *state.lattice();
    for (l, a) in state.amplitudes_mut().iter_mut().enumerate() {
        let x = lattice.angle_of(l) - PI;
        *a *= Complex64::cis(0.5 * k_eff * x * x);
    }
    Ok(())
}

/// Multiplies momentum amplitudes by `exp(-i t n^2 / 2)`.
pub fn apply_rotation(state: &mut QuantumState, t: f64) -> Result<()> {
    check_basis(state, Basis::Momentum)?;
    let lattice = *state.lattice();
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        let n = lattice.momentum_of(i) as f64;
        *a *= Complex64::cis(-0.5 * t * n * n);
    }
    Ok(())
}

/// Per-step kick-strength fluctuations `dk(t)` uniform in `[-max, max]`
/// (in units of `k`; the classical parameter moves by `dK = T dk`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPerturbation {
    pub delta_k_max: f64,
    pub seed: u64,
}

impl StepPerturbation {
    pub fn new(delta_k_max: f64, seed: u64) -> Result<Self> {
        if !(delta_k_max.is_finite() && delta_k_max >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kick perturbation must be finite and >= 0, got {delta_k_max}"
            )));
        }
        Ok(Self { delta_k_max, seed })
    }

    /// Builds the perturbation from the classical amplitude `dK`.
    pub fn from_big_k(delta_big_k: f64, lattice: &LatticeParams, seed: u64) -> Result<Self> {
        Self::new(delta_big_k / lattice.hbar_eff(), seed)
    }

    pub fn delta_big_k_max(&self, lattice: &LatticeParams) -> f64 {
        self.delta_k_max * lattice.hbar_eff()
    }

    pub fn draws(&self) -> PerturbationDraws {
        PerturbationDraws {
            amplitude: self.delta_k_max,
            rng: stream(self.seed, StreamDomain::ClassicalKick, 0),
        }
    }
}

pub struct PerturbationDraws {
    amplitude: f64,
    rng: ChaCha8Rng,
}

impl Iterator for PerturbationDraws {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.amplitude == 0.0 {
            return Some(0.0);
        }
        Some(self.rng.random_range(-self.amplitude..=self.amplitude))
    }
}

/// Cached FFT plan and phase tables for one lattice.
#[derive(Debug, Clone)]
pub struct Propagator {
    lattice: LatticeParams,
    plan: FourierPlan,
    kick_profile: Vec<f64>,
    kick_phase: Vec<Complex64>,
    rotation_phase: Vec<Complex64>,
}

impl Propagator {
    pub fn new(lattice: LatticeParams) -> Self {
        let kick_profile = kick_profile(&lattice);
        let kick_phase = kick_profile
            .iter()
            .map(|v| Complex64::cis(lattice.kick() * v))
            .collect();
        let rotation_phase = rotation_profile(&lattice)
            .iter()
            .map(|v| Complex64::cis(-lattice.hbar_eff() * v))
            .collect();
        Self {
            lattice,
            plan: FourierPlan::new(lattice.dim()),
            kick_profile,
            kick_phase,
            rotation_phase,
        }
    }

    pub fn lattice(&self) -> &LatticeParams {
        &self.lattice
    }

    pub fn plan(&self) -> &FourierPlan {
        &self.plan
    }

    fn check(&self, state: &QuantumState) -> Result<()> {
        if state.dim() != self.lattice.dim() {
            return Err(Error::DimensionMismatch {
                left: state.dim(),
                right: self.lattice.dim(),
            });
        }
        check_basis(state, Basis::Momentum)
    }

    /// One map iteration with kick strength `k + delta_k`.
    pub fn step(&self, state: &mut QuantumState, delta_k: f64) -> Result<()> {
        self.check(state)?;
        state.transform_to(Basis::Angle, &self.plan)?;
        let amps = state.amplitudes_mut();
        if delta_k == 0.0 {
            amps.iter_mut()
                .zip(&self.kick_phase)
                .for_each(|(a, u)| *a *= u);
        } else {
            let k = self.lattice.kick() + delta_k;
            amps.iter_mut()
                .zip(&self.kick_profile)
                .for_each(|(a, v)| *a *= Complex64::cis(k * v));
        }
        state.transform_to(Basis::Momentum, &self.plan)?;
        state
            .amplitudes_mut()
            .iter_mut()
            .zip(&self.rotation_phase)
            .for_each(|(a, u)| *a *= u);
        Ok(())
    }

    /// Exact inverse of [`Propagator::step`] with the same `delta_k`.
    pub fn step_inverse(&self, state: &mut QuantumState, delta_k: f64) -> Result<()> {
        self.check(state)?;
        state
            .amplitudes_mut()
            .iter_mut()
            .zip(&self.rotation_phase)
            .for_each(|(a, u)| *a *= u.conj());
        state.transform_to(Basis::Angle, &self.plan)?;
        let amps = state.amplitudes_mut();
        if delta_k == 0.0 {
            amps.iter_mut()
                .zip(&self.kick_phase)
                .for_each(|(a, u)| *a *= u.conj());
        } else {
            let k = self.lattice.kick() + delta_k;
            amps.iter_mut()
                .zip(&self.kick_profile)
                .for_each(|(a, v)| *a *= Complex64::cis(-k * v));
        }
        state.transform_to(Basis::Momentum, &self.plan)
    }
}

/// One map step of `state` (any basis in, momentum basis out).
pub fn step_exact(
    state: &QuantumState,
    lattice: &LatticeParams,
    delta_k: f64,
) -> Result<QuantumState> {
    let prop = Propagator::new(*lattice);
    let mut out = state.clone();
    if out.basis() == Basis::Angle {
        out.transform_to(Basis::Momentum, prop.plan())?;
    }
    prop.step(&mut out, delta_k)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: QuantumState,
    /// `dk` used at each step, in order.
    pub delta_k_drawn: Vec<f64>,
}

/// Iterates `t` map steps, drawing a fresh `dk(t)` per step when perturbed.
pub fn evolve(
    state: &QuantumState,
    lattice: &LatticeParams,
    perturbation: Option<&StepPerturbation>,
    t: usize,
) -> Result<Evolution> {
    let mut unused = Vec::new();
    let (state, delta_k_drawn) = evolve_inner(state, lattice, perturbation, t, &mut unused, false)?;
    Ok(Evolution {
        state,
        delta_k_drawn,
    })
}

/// Like [`evolve`] but keeps every intermediate state (`t + 1` entries).
pub fn evolve_trajectory(
    state: &QuantumState,
    lattice: &LatticeParams,
    perturbation: Option<&StepPerturbation>,
    t: usize,
) -> Result<(Vec<QuantumState>, Vec<f64>)> {
    let mut states = Vec::with_capacity(t + 1);
    let (_, drawn) = evolve_inner(state, lattice, perturbation, t, &mut states, true)?;
    Ok((states, drawn))
}

fn evolve_inner(
    state: &QuantumState,
    lattice: &LatticeParams,
    perturbation: Option<&StepPerturbation>,
    t: usize,
    keep: &mut Vec<QuantumState>,
    keep_all: bool,
) -> Result<(QuantumState, Vec<f64>)> {
    let prop = Propagator::new(*lattice);
    let mut psi = state.clone();
    if psi.basis() == Basis::Angle {
        psi.transform_to(Basis::Momentum, prop.plan())?;
    }
    if keep_all {
        keep.push(psi.clone());
    }
    let mut draws = perturbation
        .copied()
        .unwrap_or(StepPerturbation {
            delta_k_max: 0.0,
            seed: 0,
        })
        .draws();
    let mut logged = Vec::with_capacity(t);
    for _ in 0..t {
        let dk = draws.next().unwrap_or(0.0);
        prop.step(&mut psi, dk)?;
        logged.push(dk);
        if keep_all {
            keep.push(psi.clone());
        }
    }
    Ok((psi, logged))
}
