use serde::{Deserialize, Serialize};

use super::config::{ErrorChannel, ExperimentConfig, InitialCondition};
use crate::circuit::{build_sawtooth_circuit, CircuitProgram, CircuitRunner, NoiseModel};
use crate::error::Result;
use crate::exec::map_indexed;
use crate::propagator::{Propagator, StepPerturbation};
use crate::rng::{derive_seed, stream, StreamDomain};
use crate::state::{
    fidelity, gaussian_packet, random_packet_centre, random_state, QuantumState, WavePacketSpec,
};

/// Ensemble-averaged fidelity `f(t)` for `t = 0..=t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub t: Vec<usize>,
    pub f: Vec<f64>,
    /// Standard error of the ensemble mean (zero for a single member).
    pub f_err: Vec<f64>,
    pub members: usize,
    pub config: Option<ExperimentConfig>,
}

impl FidelityCurve {
    /// Curve from bare values, `t = 0, 1, ...`, no error bars.
    pub fn from_values(f: Vec<f64>) -> Self {
        Self {
            t: (0..f.len()).collect(),
            f_err: vec![0.0; f.len()],
            f,
            members: 1,
            config: None,
        }
    }

    /// Mean and standard error over equally long member curves.
    pub fn from_members(members: &[Vec<f64>], config: Option<ExperimentConfig>) -> Self {
        let m = members.len();
        let len = members.first().map_or(0, Vec::len);
        let mut f = vec![0.0; len];
        let mut f_err = vec![0.0; len];
        for t in 0..len {
            let mean = members.iter().map(|c| c[t]).sum::<f64>() / m as f64;
            f[t] = mean;
            if m > 1 {
                let var =
                    members.iter().map(|c| (c[t] - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                f_err[t] = (var / m as f64).sqrt();
            }
        }
        Self {
            t: (0..len).collect(),
            f,
            f_err,
            members: m,
            config,
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }
}

/// Initial state of ensemble row `index`.
pub fn initial_state(config: &ExperimentConfig, index: usize) -> Result<QuantumState> {
    let lattice = &config.lattice;
    match config.initial {
        InitialCondition::Gaussian { theta0, p0 } => {
            gaussian_packet(&WavePacketSpec::new(theta0, p0), lattice)
        }
        InitialCondition::UniformPacket => {
            let mut rng = stream(config.master_seed, StreamDomain::InitialState, index as u64);
            let (theta0, p0) = random_packet_centre(&mut rng);
            gaussian_packet(&WavePacketSpec::new(theta0, p0), lattice)
        }
        InitialCondition::Random => Ok(random_state(
            lattice,
            derive_seed(config.master_seed, StreamDomain::InitialState, index as u64),
        )),
    }
}

/// Noise seed of ensemble member `member`.
pub fn member_noise_seed(config: &ExperimentConfig, member: usize) -> u64 {
    let domain = match config.channel {
        ErrorChannel::Classical { .. } => StreamDomain::ClassicalKick,
        ErrorChannel::Quantum { .. } => StreamDomain::GateNoise,
    };
    derive_seed(config.master_seed, domain, member as u64)
}

/// Perturbed evolution of one ensemble member.
pub(crate) enum PerturbedStepper<'a> {
    Classical {
        draws: crate::propagator::PerturbationDraws,
    },
    Quantum {
        program: &'a CircuitProgram,
        runner: CircuitRunner,
        noise: NoiseModel,
    },
}

impl<'a> PerturbedStepper<'a> {
    pub(crate) fn new(
        config: &ExperimentConfig,
        member: usize,
        program: Option<&'a CircuitProgram>,
    ) -> Result<Self> {
        let seed = member_noise_seed(config, member);
        Ok(match config.channel {
            ErrorChannel::Classical { delta_big_k } => PerturbedStepper::Classical {
                draws: StepPerturbation::from_big_k(delta_big_k, &config.lattice, seed)?.draws(),
            },
            ErrorChannel::Quantum { epsilon, regime } => {
                let program = program.expect("quantum channel needs a circuit");
                PerturbedStepper::Quantum {
                    program,
                    runner: CircuitRunner::new(program.n_qubits()),
                    noise: NoiseModel::new(epsilon, regime, seed)?,
                }
            }
        })
    }

    /// Advances `state` by map step number `step`.
    pub(crate) fn step(
        &mut self,
        prop: &Propagator,
        state: &mut QuantumState,
        step: usize,
    ) -> Result<()> {
        match self {
            PerturbedStepper::Classical { draws } => {
                let dk = draws.next().unwrap_or(0.0);
                prop.step(state, dk)
            }
            PerturbedStepper::Quantum {
                program,
                runner,
                noise,
            } => {
                let mut rng = noise.step_rng(step as u64);
                runner.run(
                    state.amplitudes_mut(),
                    program,
                    noise,
                    &mut rng,
                    step as u64,
                    None,
                );
                Ok(())
            }
        }
    }
}

/// Shared, read-only pieces of an ensemble run.
pub(crate) struct RunContext {
    pub(crate) config: ExperimentConfig,
    pub(crate) propagator: Propagator,
    pub(crate) program: Option<CircuitProgram>,
}

impl RunContext {
    pub(crate) fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let program = match config.channel {
            ErrorChannel::Quantum { .. } => Some(build_sawtooth_circuit(&config.lattice)),
            ErrorChannel::Classical { .. } => None,
        };
        Ok(Self {
            config: *config,
            propagator: Propagator::new(config.lattice),
            program,
        })
    }

    pub(crate) fn stepper(&self, member: usize) -> Result<PerturbedStepper<'_>> {
        PerturbedStepper::new(&self.config, member, self.program.as_ref())
    }

    pub(crate) fn member_initial(&self, member: usize) -> Result<QuantumState> {
        initial_state(
            &self.config,
            member / self.config.ensembles.noise_realizations,
        )
    }

    fn member_curve(&self, member: usize) -> Result<Vec<f64>> {
        let mut ideal = self.member_initial(member)?;
        let mut perturbed = ideal.clone();
        let mut stepper = self.stepper(member)?;
        let mut f = Vec::with_capacity(self.config.t_max + 1);
        f.push(1.0);
        for step in 0..self.config.t_max {
            self.propagator.step(&mut ideal, 0.0)?;
            stepper.step(&self.propagator, &mut perturbed, step)?;
            f.push(fidelity(&ideal, &perturbed)?.clamp(0.0, 1.0));
        }
        Ok(f)
    }
}

/// Fidelity of every ensemble member, in member order
/// (`initial_state * noise_realizations + realization`).
pub fn member_fidelities(config: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    let ctx = RunContext::new(config)?;
    map_indexed(config.ensembles.members(), config.execution, |m| {
        ctx.member_curve(m)
    })
    .into_iter()
    .collect()
}

/// Ensemble-averaged fidelity decay for `config`.
pub fn fidelity_curve(config: &ExperimentConfig) -> Result<FidelityCurve> {
    let members = member_fidelities(config)?;
    Ok(FidelityCurve::from_members(&members, Some(*config)))
}
