use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::NoiseRegime;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::LatticeParams;
use crate::state::{gaussian_packet, WavePacketSpec};

/// Which perturbation drives the fidelity decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "lowercase")]
pub enum ErrorChannel {
    /// Per-step kick fluctuations, uniform in `[-dK, dK]` in classical units.
    Classical { delta_big_k: f64 },
    /// Noisy gates with amplitude `epsilon`.
    Quantum { epsilon: f64, regime: NoiseRegime },
}

impl ErrorChannel {
    pub fn is_null(&self) -> bool {
        match *self {
            ErrorChannel::Classical { delta_big_k } => delta_big_k == 0.0,
            ErrorChannel::Quantum { epsilon, .. } => epsilon == 0.0,
        }
    }

    /// `dK` or `epsilon`.
    pub fn strength(&self) -> f64 {
        match *self {
            ErrorChannel::Classical { delta_big_k } => delta_big_k,
            ErrorChannel::Quantum { epsilon, .. } => epsilon,
        }
    }

    pub fn with_strength(&self, value: f64) -> Self {
        match *self {
            ErrorChannel::Classical { .. } => ErrorChannel::Classical { delta_big_k: value },
            ErrorChannel::Quantum { regime, .. } => ErrorChannel::Quantum {
                epsilon: value,
                regime,
            },
        }
    }
}

/// Initial state of every ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Minimum-uncertainty packet at a fixed centre.
    Gaussian { theta0: f64, p0: f64 },
    /// Minimum-uncertainty packet, centre uniform on the torus per initial state.
    UniformPacket,
    /// Random phases with flat moduli.
    Random,
}

impl InitialCondition {
    pub fn label(&self) -> &'static str {
        match self {
            InitialCondition::Gaussian { .. } => "gaussian",
            InitialCondition::UniformPacket => "uniform_packet",
            InitialCondition::Random => "random",
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InitialCondition::Gaussian { theta0, p0 } => write!(f, "gaussian({theta0},{p0})"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensembles {
    pub initial_states: usize,
    pub noise_realizations: usize,
}

impl Ensembles {
    pub fn new(initial_states: usize, noise_realizations: usize) -> Self {
        Self {
            initial_states,
            noise_realizations,
        }
    }

    pub fn members(&self) -> usize {
        self.initial_states * self.noise_realizations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lattice: LatticeParams,
    pub channel: ErrorChannel,
    pub initial: InitialCondition,
    pub t_max: usize,
    pub ensembles: Ensembles,
    pub master_seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(
        lattice: LatticeParams,
        channel: ErrorChannel,
        initial: InitialCondition,
        t_max: usize,
        ensembles: Ensembles,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            lattice,
            channel,
            initial,
            t_max,
            ensembles,
            master_seed,
            execution: Execution::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::InvalidParameter("t_max must be at least 1".into()));
        }
        if self.ensembles.initial_states < 1 || self.ensembles.noise_realizations < 1 {
            return Err(Error::InvalidParameter(format!(
                "ensemble sizes must be at least 1, got {}x{}",
                self.ensembles.initial_states, self.ensembles.noise_realizations
            )));
        }
        let strength = self.channel.strength();
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "perturbation strength must be finite and >= 0, got {strength}"
            )));
        }
        match self.initial {
            InitialCondition::Gaussian { theta0, p0 } => {
                if !(theta0.is_finite() && p0.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "packet centre must be finite".into(),
                    ));
                }
                gaussian_packet(&WavePacketSpec::new(theta0, p0), &self.lattice)?;
            }
            InitialCondition::UniformPacket => {
                gaussian_packet(&WavePacketSpec::new(0.0, 0.0), &self.lattice)?;
            }
            InitialCondition::Random => {}
        }
        Ok(())
    }

    /// Flat `key=value` description, enough to rerun the experiment.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("nq", self.lattice.n_qubits().to_string()),
            ("K", self.lattice.big_k().to_string()),
        ];
        match self.channel {
            ErrorChannel::Classical { delta_big_k } => {
                out.push(("channel", "classical".into()));
                out.push(("deltaK", delta_big_k.to_string()));
            }
            ErrorChannel::Quantum { epsilon, regime } => {
                out.push(("channel", "quantum".into()));
                out.push(("epsilon", epsilon.to_string()));
                out.push(("regime", regime.to_string()));
            }
        }
        out.push(("initial", self.initial.label().into()));
        if let InitialCondition::Gaussian { theta0, p0 } = self.initial {
            out.push(("theta0", theta0.to_string()));
            out.push(("p0", p0.to_string()));
        }
        out.push(("tmax", self.t_max.to_string()));
        out.push(("initial_states", self.ensembles.initial_states.to_string()));
        out.push((
            "noise_realizations",
            self.ensembles.noise_realizations.to_string(),
        ));
        out.push(("seed", self.master_seed.to_string()));
        out
    }

    /// `describe` as `# key=value` header lines.
    pub fn header(&self) -> String {
        self.describe()
            .into_iter()
            .map(|(k, v)| format!("# {k}={v}\n"))
            .collect()
    }
}
