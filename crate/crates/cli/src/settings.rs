//! Run configuration: defaults, a flat `key=value` file and command-line
//! flags, resolved in that order of increasing precedence.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sawtooth_core::circuit::NoiseRegime;
use sawtooth_core::classical::PhasePoint;
use sawtooth_core::exec::Execution;
use sawtooth_core::lab::{Ensembles, ErrorChannel, ExperimentConfig, InitialCondition};
use sawtooth_core::LatticeParams;

use crate::failure::{Failure, Outcome};

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "command",
    "created_unix",
    "nq",
    "K",
    "channel",
    "deltaK",
    "epsilon",
    "regime",
    "initial",
    "theta0",
    "p0",
    "tmax",
    "ensemble",
    "initial_states",
    "noise_realizations",
    "seed",
    "steps",
    "seeds",
    "nqs",
    "epsilons",
    "ks",
    "initials",
    "threshold",
    "model",
    "t",
    "member",
    "shots",
    "states",
    "format",
    "jobs",
    "out",
    "no_timestamp",
];

/// Parses a config file. Blank lines and lines starting with `#` are
/// skipped; every other line must be `key=value` with a known key.
pub fn parse_config(text: &str) -> Outcome<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("line {}: expected key=value", no + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Failure::config(format!(
                "line {}: unknown key {k:?}",
                no + 1
            )));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

/// Config-file entries overlaid by command-line values.
#[derive(Debug, Default, Clone)]
pub struct Layers {
    pub file: BTreeMap<String, String>,
    pub cli: BTreeMap<String, String>,
}

impl Layers {
    pub fn raw(&self, key: &str) -> Option<&str> {
        self.cli
            .get(key)
            .or_else(|| self.file.get(key))
            .map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Outcome<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| Failure::config(format!("{key}={v}: {e}")))
            })
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Outcome<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str) -> Outcome<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|e| Failure::config(format!("{key}: {x:?}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Quantum,
    Classical,
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quantum" => Ok(Channel::Quantum),
            "classical" => Ok(Channel::Classical),
            _ => Err(format!("unknown channel {s:?}")),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Quantum => "quantum",
            Channel::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Gaussian,
    UniformPacket,
    Random,
}

impl FromStr for InitialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(InitialKind::Gaussian),
            "uniform_packet" | "uniform" => Ok(InitialKind::UniformPacket),
            "random" => Ok(InitialKind::Random),
            _ => Err(format!("unknown initial state {s:?}")),
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialKind::Gaussian => "gaussian",
            InitialKind::UniformPacket => "uniform_packet",
            InitialKind::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Auto,
    Exponential,
    Gaussian,
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(ModelChoice::Auto),
            "exponential" => Ok(ModelChoice::Exponential),
            "gaussian" => Ok(ModelChoice::Gaussian),
            _ => Err(format!("unknown decay model {s:?}")),
        }
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelChoice::Auto => "auto",
            ModelChoice::Exponential => "exponential",
            ModelChoice::Gaussian => "gaussian",
        })
    }
}

/// `theta:p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedPoint(pub PhasePoint);

impl FromStr for SeedPoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (t, p) = s
            .split_once(':')
            .ok_or_else(|| format!("expected theta:p, got {s:?}"))?;
        let t: f64 = t.trim().parse().map_err(|e| format!("{e}"))?;
        let p: f64 = p.trim().parse().map_err(|e| format!("{e}"))?;
        if !(t.is_finite() && p.is_finite()) {
            return Err(format!("seed {s:?} is not finite"));
        }
        Ok(SeedPoint(PhasePoint::new(t, p)))
    }
}

impl fmt::Display for SeedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0.theta, self.0.p)
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub nq: u32,
    pub big_k: f64,
    pub channel: Channel,
    pub epsilon: f64,
    pub delta_big_k: f64,
    pub regime: NoiseRegime,
    pub initial: InitialKind,
    pub theta0: f64,
    pub p0: f64,
    pub tmax: usize,
    pub initial_states: usize,
    pub noise_realizations: usize,
    pub seed: u64,
    pub steps: usize,
    pub seeds: Option<Vec<SeedPoint>>,
    pub nqs: Vec<u32>,
    pub epsilons: Vec<f64>,
    pub ks: Vec<f64>,
    pub initials: Vec<InitialKind>,
    pub threshold: f64,
    pub model: ModelChoice,
    pub t: usize,
    pub member: usize,
    pub shots: Option<usize>,
    pub states: usize,
    pub format: Format,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub no_timestamp: bool,
}

impl RunConfig {
    pub fn resolve(command: &str, layers: &Layers) -> Outcome<Self> {
        if let Some(c) = layers.file.get("command") {
            if c != command {
                return Err(Failure::config(format!(
                    "config file is for `{c}`, not `{command}`"
                )));
            }
        }
        let big_k_default = match command {
            "poincare" => -0.5,
            "tf-scan" => 5.0,
            _ => 0.5,
        };
        let tmax_default = match command {
            "tf-scan" => 64,
            "scattering" => 20,
            _ => 100,
        };
        let channel = match layers.get::<Channel>("channel")? {
            Some(c) => c,
            None if layers.raw("deltaK").is_some() => Channel::Classical,
            None => Channel::Quantum,
        };
        let initial = layers.or("initial", InitialKind::Gaussian)?;
        let ensemble: usize = layers.or("ensemble", 10)?;
        let (rows, cols) = match initial {
            InitialKind::Gaussian => (1, ensemble),
            _ => (ensemble, 1),
        };
        let tmax = layers.or("tmax", tmax_default)?;
        let jobs: Option<usize> = layers.get("jobs")?;
        if jobs == Some(0) {
            return Err(Failure::config("jobs must be at least 1"));
        }
        let no_timestamp = match layers.raw("no_timestamp") {
            None => false,
            Some(v) => v
                .parse()
                .map_err(|e| Failure::config(format!("no_timestamp={v}: {e}")))?,
        };
        Ok(Self {
            command: command.to_string(),
            nq: layers.or("nq", 8)?,
            big_k: layers.or("K", big_k_default)?,
            channel,
            epsilon: layers.or("epsilon", 0.01)?,
            delta_big_k: layers.or("deltaK", 0.0)?,
            regime: layers
                .get::<NoiseRegime>("regime")?
                .unwrap_or(NoiseRegime::Memoryless),
            initial,
            theta0: layers.or("theta0", 1.0)?,
            p0: layers.or("p0", 0.0)?,
            tmax,
            initial_states: layers.or("initial_states", rows)?,
            noise_realizations: layers.or("noise_realizations", cols)?,
            seed: layers.or("seed", 1)?,
            steps: layers.or("steps", 10_000)?,
            seeds: layers.list("seeds")?,
            nqs: layers.list("nqs")?.unwrap_or_else(|| vec![4, 5, 6, 7, 8]),
            epsilons: layers
                .list("epsilons")?
                .unwrap_or_else(|| vec![0.003, 0.005, 0.01, 0.02, 0.03]),
            ks: layers
                .list("ks")?
                .unwrap_or_else(|| vec![-0.5, 0.5, 1.0, 2.0, 5.0]),
            initials: layers.list("initials")?.unwrap_or_else(|| {
                vec![
                    InitialKind::Gaussian,
                    InitialKind::UniformPacket,
                    InitialKind::Random,
                ]
            }),
            threshold: layers.or("threshold", 0.9)?,
            model: layers.or("model", ModelChoice::Auto)?,
            t: layers.or("t", tmax)?,
            member: layers.or("member", 0)?,
            shots: layers.get("shots")?,
            states: layers.or("states", 20)?,
            format: layers.or("format", Format::Csv)?,
            jobs,
            out: layers.raw("out").map(PathBuf::from),
            no_timestamp,
        })
    }

    /// Every setting as `(key, value)`, in config-file order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("command", self.command.clone()),
            ("nq", self.nq.to_string()),
            ("K", self.big_k.to_string()),
            ("channel", self.channel.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("deltaK", self.delta_big_k.to_string()),
            ("regime", self.regime.to_string()),
            ("initial", self.initial.to_string()),
            ("theta0", self.theta0.to_string()),
            ("p0", self.p0.to_string()),
            ("tmax", self.tmax.to_string()),
            ("initial_states", self.initial_states.to_string()),
            ("noise_realizations", self.noise_realizations.to_string()),
            ("seed", self.seed.to_string()),
            ("steps", self.steps.to_string()),
        ];
        if let Some(seeds) = &self.seeds {
            out.push(("seeds", join(seeds)));
        }
        out.extend([
            ("nqs", join(&self.nqs)),
            ("epsilons", join(&self.epsilons)),
            ("ks", join(&self.ks)),
            ("initials", join(&self.initials)),
            ("threshold", self.threshold.to_string()),
            ("model", self.model.to_string()),
            ("t", self.t.to_string()),
            ("member", self.member.to_string()),
        ]);
        if let Some(s) = self.shots {
            out.push(("shots", s.to_string()));
        }
        out.extend([
            ("states", self.states.to_string()),
            ("format", self.format.to_string()),
        ]);
        if let Some(j) = self.jobs {
            out.push(("jobs", j.to_string()));
        }
        if let Some(o) = &self.out {
            out.push(("out", o.display().to_string()));
        }
        out.push(("no_timestamp", self.no_timestamp.to_string()));
        out
    }

    /// Config-file text that resolves back to `self`.
    #[cfg(test)]
    pub fn to_config_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Settings that shape the result of this command, beyond those of the
    /// experiment configuration itself.
    pub fn result_pairs(&self) -> Vec<(String, String)> {
        let keys: &[&str] = match self.command.as_str() {
            "poincare" => &["K", "steps", "seeds"],
            "lyapunov" => &["K", "steps", "theta0", "p0"],
            "fidelity" => &["model", "threshold"],
            "tf-scan" => &["nqs", "epsilons", "threshold"],
            "rate-vs-k" => &["ks", "initials"],
            "circuit-check" => &["nq", "K", "states", "seed"],
            "scattering" => &["t", "member", "shots"],
            _ => &[],
        };
        let mut out = vec![("command".to_string(), self.command.clone())];
        out.extend(
            self.pairs()
                .into_iter()
                .filter(|(k, _)| keys.contains(k))
                .map(|(k, v)| (k.to_string(), v)),
        );
        out
    }

    pub fn execution(&self) -> Execution {
        match self.jobs {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }

    pub fn initial_condition(&self, kind: InitialKind) -> InitialCondition {
        match kind {
            InitialKind::Gaussian => InitialCondition::Gaussian {
                theta0: self.theta0,
                p0: self.p0,
            },
            InitialKind::UniformPacket => InitialCondition::UniformPacket,
            InitialKind::Random => InitialCondition::Random,
        }
    }

    pub fn error_channel(&self) -> ErrorChannel {
        match self.channel {
            Channel::Quantum => ErrorChannel::Quantum {
                epsilon: self.epsilon,
                regime: self.regime,
            },
            Channel::Classical => ErrorChannel::Classical {
                delta_big_k: self.delta_big_k,
            },
        }
    }

    pub fn experiment(&self) -> Outcome<ExperimentConfig> {
        let lattice = LatticeParams::new(self.nq, self.big_k)?;
        Ok(ExperimentConfig::new(
            lattice,
            self.error_channel(),
            self.initial_condition(self.initial),
            self.tmax,
            Ensembles::new(self.initial_states, self.noise_realizations),
            self.seed,
        )?
        .with_execution(self.execution()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layers(file: &str, cli: &[(&str, &str)]) -> Layers {
        Layers {
            file: parse_config(file).unwrap(),
            cli: cli
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let l = layers("nq=6\nK=2\n# comment\n\nseed = 9\n", &[("K", "3")]);
        let rc = RunConfig::resolve("fidelity", &l).unwrap();
        assert_eq!(rc.nq, 6);
        assert_eq!(rc.big_k, 3.0);
        assert_eq!(rc.seed, 9);
        assert_eq!(rc.tmax, 100);
        assert_eq!(rc.channel, Channel::Quantum);
    }

    #[test]
    fn delta_k_selects_classical_channel() {
        let rc = RunConfig::resolve("fidelity", &layers("deltaK=0.01", &[])).unwrap();
        assert_eq!(rc.channel, Channel::Classical);
        let rc =
            RunConfig::resolve("fidelity", &layers("deltaK=0.01\nchannel=quantum", &[])).unwrap();
        assert_eq!(rc.channel, Channel::Quantum);
    }

    #[test]
    fn ensemble_axis_follows_initial_state() {
        let rc = RunConfig::resolve("fidelity", &layers("ensemble=7", &[])).unwrap();
        assert_eq!((rc.initial_states, rc.noise_realizations), (1, 7));
        let rc = RunConfig::resolve(
            "fidelity",
            &layers("ensemble=7\ninitial=random\nnoise_realizations=2", &[]),
        )
        .unwrap();
        assert_eq!((rc.initial_states, rc.noise_realizations), (7, 2));
    }

    #[test]
    fn config_text_round_trips() {
        let l = layers(
            "nq=5\nK=-0.25\nepsilon=0.0125\nseeds=1:0,3.5:-0.25\nshots=400\njobs=2\nout=x.csv\ninitials=random,uniform",
            &[("theta0", "0.1")],
        );
        for cmd in ["fidelity", "poincare", "tf-scan"] {
            let rc = RunConfig::resolve(cmd, &l).unwrap();
            let text = rc.to_config_text();
            let back = RunConfig::resolve(cmd, &layers(&text, &[])).unwrap();
            assert_eq!(rc, back, "{text}");
        }
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(parse_config("nq").is_err());
        assert!(parse_config("colour=blue").is_err());
        assert!(RunConfig::resolve("fidelity", &layers("nq=many", &[])).is_err());
        assert!(RunConfig::resolve("fidelity", &layers("seeds=1", &[])).is_err());
        assert!(RunConfig::resolve("fidelity", &layers("command=poincare", &[])).is_err());
        assert!(RunConfig::resolve("fidelity", &layers("jobs=0", &[])).is_err());
    }
}
