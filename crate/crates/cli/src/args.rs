use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "sawtooth",
    version,
    about = "Fidelity decay of the quantum sawtooth map under classical and gate-level errors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase-space orbits of the classical map.
    Poincare(PoincareArgs),
    /// Closed-form and numerical Lyapunov exponent.
    Lyapunov(LyapunovArgs),
    /// Ensemble-averaged fidelity curve with decay fits.
    Fidelity(FidelityArgs),
    /// Fidelity time scale t_f over a grid of qubit numbers and noise strengths.
    TfScan(TfScanArgs),
    /// Decay rate against the kick strength for several initial states.
    RateVsK(RateVsKArgs),
    /// Gate-count and noiseless-equivalence contracts of the circuit.
    CircuitCheck(CircuitCheckArgs),
    /// Ancilla (scattering-circuit) estimate of the fidelity.
    Scattering(ScatteringArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key=value` configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Worker threads for ensemble runs; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Leave the creation-time line out of the output header.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Lattice, perturbation, initial state and ensemble.
#[derive(Debug, Args)]
pub struct Experiment {
    #[arg(long)]
    pub nq: Option<u32>,
    #[arg(long = "K", allow_negative_numbers = true)]
    pub big_k: Option<f64>,
    /// Gate-noise amplitude (quantum channel).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Kick-noise amplitude (classical channel); selects that channel unless
    /// `--channel` says otherwise.
    #[arg(long = "deltaK")]
    pub delta_big_k: Option<f64>,
    #[arg(long, value_parser = ["quantum", "classical"])]
    pub channel: Option<String>,
    #[arg(long, value_parser = ["memoryless", "static"])]
    pub regime: Option<String>,
    #[arg(long, value_parser = ["gaussian", "uniform_packet", "uniform", "random"])]
    pub initial: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub tmax: Option<usize>,
    /// Ensemble size: initial states for random or uniform packets, noise
    /// realizations for a fixed packet.
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long)]
    pub initial_states: Option<usize>,
    #[arg(long)]
    pub noise_realizations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PoincareArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub big_k: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Seed points as `theta:p,theta:p,...` (default: seven island orbits
    /// and one chaotic-layer orbit).
    #[arg(long, allow_hyphen_values = true)]
    pub seeds: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub big_k: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Start of the numerical estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub experiment: Experiment,
    /// Decay model for the summary; `auto` keeps the better fit.
    #[arg(long, value_parser = ["auto", "exponential", "gaussian"])]
    pub model: Option<String>,
    /// Fidelity level defining t_f.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TfScanArgs {
    #[command(flatten)]
    pub experiment: Experiment,
    /// Comma-separated qubit numbers.
    #[arg(long)]
    pub nqs: Option<String>,
    /// Comma-separated gate-noise amplitudes.
    #[arg(long)]
    pub epsilons: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RateVsKArgs {
    #[command(flatten)]
    pub experiment: Experiment,
    /// Comma-separated kick strengths.
    #[arg(long, allow_hyphen_values = true)]
    pub ks: Option<String>,
    /// Comma-separated initial-state kinds.
    #[arg(long)]
    pub initials: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CircuitCheckArgs {
    #[arg(long)]
    pub nq: Option<u32>,
    #[arg(long = "K", allow_negative_numbers = true)]
    pub big_k: Option<f64>,
    /// Random states compared against the exact step.
    #[arg(long)]
    pub states: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScatteringArgs {
    #[command(flatten)]
    pub experiment: Experiment,
    /// Last time step reported (default: tmax).
    #[arg(long)]
    pub t: Option<usize>,
    /// Ensemble member whose noise draws are used.
    #[arg(long)]
    pub member: Option<usize>,
    /// Measurements per ancilla basis; exact expectations when absent.
    #[arg(long)]
    pub shots: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

type Pairs = Vec<(&'static str, Option<String>)>;

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

impl Common {
    pub fn pairs(&self) -> Pairs {
        vec![
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("jobs", s(&self.jobs)),
            (
                "no_timestamp",
                self.no_timestamp.then(|| "true".to_string()),
            ),
            ("seed", s(&self.seed)),
        ]
    }
}

impl Experiment {
    pub fn pairs(&self) -> Pairs {
        vec![
            ("nq", s(&self.nq)),
            ("K", s(&self.big_k)),
            ("epsilon", s(&self.epsilon)),
            ("deltaK", s(&self.delta_big_k)),
            ("channel", self.channel.clone()),
            ("regime", self.regime.clone()),
            ("initial", self.initial.clone()),
            ("theta0", s(&self.theta0)),
            ("p0", s(&self.p0)),
            ("tmax", s(&self.tmax)),
            ("ensemble", s(&self.ensemble)),
            ("initial_states", s(&self.initial_states)),
            ("noise_realizations", s(&self.noise_realizations)),
        ]
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Poincare(_) => "poincare",
            Command::Lyapunov(_) => "lyapunov",
            Command::Fidelity(_) => "fidelity",
            Command::TfScan(_) => "tf-scan",
            Command::RateVsK(_) => "rate-vs-k",
            Command::CircuitCheck(_) => "circuit-check",
            Command::Scattering(_) => "scattering",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Poincare(a) => &a.common,
            Command::Lyapunov(a) => &a.common,
            Command::Fidelity(a) => &a.common,
            Command::TfScan(a) => &a.common,
            Command::RateVsK(a) => &a.common,
            Command::CircuitCheck(a) => &a.common,
            Command::Scattering(a) => &a.common,
        }
    }

    /// Every value given on the command line, keyed like the config file.
    pub fn pairs(&self) -> Pairs {
        let mut out = self.common().pairs();
        match self {
            Command::Poincare(a) => out.extend([
                ("K", s(&a.big_k)),
                ("steps", s(&a.steps)),
                ("seeds", a.seeds.clone()),
            ]),
            Command::Lyapunov(a) => out.extend([
                ("K", s(&a.big_k)),
                ("steps", s(&a.steps)),
                ("theta0", s(&a.theta0)),
                ("p0", s(&a.p0)),
            ]),
            Command::Fidelity(a) => {
                out.extend(a.experiment.pairs());
                out.extend([("model", a.model.clone()), ("threshold", s(&a.threshold))]);
            }
            Command::TfScan(a) => {
                out.extend(a.experiment.pairs());
                out.extend([
                    ("nqs", a.nqs.clone()),
                    ("epsilons", a.epsilons.clone()),
                    ("threshold", s(&a.threshold)),
                ]);
            }
            Command::RateVsK(a) => {
                out.extend(a.experiment.pairs());
                out.extend([("ks", a.ks.clone()), ("initials", a.initials.clone())]);
            }
            Command::CircuitCheck(a) => out.extend([
                ("nq", s(&a.nq)),
                ("K", s(&a.big_k)),
                ("states", s(&a.states)),
            ]),
            Command::Scattering(a) => {
                out.extend(a.experiment.pairs());
                out.extend([
                    ("t", s(&a.t)),
                    ("member", s(&a.member)),
                    ("shots", s(&a.shots)),
                ]);
            }
        }
        out
    }
}
