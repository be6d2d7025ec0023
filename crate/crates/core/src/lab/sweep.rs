use serde::{Deserialize, Serialize};

use super::config::{ErrorChannel, ExperimentConfig, InitialCondition};
use super::curve::{fidelity_curve, FidelityCurve};
use super::fit::{estimate_tf, fit_decay, DecayFit, DecayModel, TfRecord};
use crate::circuit::NoiseRegime;
use crate::classical::{lyapunov_exponent, ClassicalParams};
use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::rng::{derive_seed, StreamDomain};

/// Horizon growth limit for [`curve_until_crossing`].
const MAX_DOUBLINGS: u32 = 6;

/// Master seed of grid point `index` of a sweep.
pub fn point_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, StreamDomain::Sweep, index as u64)
}

/// Runs `config`, doubling `t_max` until the curve reaches `threshold`.
/// Member streams do not depend on `t_max`, so the crossing is the one a
/// single long run would give.
pub fn curve_until_crossing(config: &ExperimentConfig, threshold: f64) -> Result<FidelityCurve> {
    let mut cfg = *config;
    for _ in 0..=MAX_DOUBLINGS {
        let curve = fidelity_curve(&cfg)?;
        if curve.f.iter().any(|&f| f <= threshold) {
            return Ok(curve);
        }
        cfg.t_max *= 2;
    }
    Err(Error::NoCrossing {
        threshold,
        t_max: cfg.t_max / 2,
    })
}

/// `t_f` for every `(n_q, epsilon)` pair under memoryless gate noise, each
/// point with a fresh ensemble. `base` supplies `K`, the initial condition,
/// the ensemble sizes, the starting horizon and the master seed.
pub fn sweep_tf(
    base: &ExperimentConfig,
    n_qubits: &[u32],
    epsilons: &[f64],
    threshold: f64,
) -> Result<Vec<TfRecord>> {
    let regime = match base.channel {
        ErrorChannel::Quantum { regime, .. } => regime,
        ErrorChannel::Classical { .. } => NoiseRegime::Memoryless,
    };
    let mut out = Vec::with_capacity(n_qubits.len() * epsilons.len());
    for &nq in n_qubits {
        for &eps in epsilons {
            let mut cfg = *base;
            cfg.lattice = LatticeParams::new(nq, base.lattice.big_k())?;
            cfg.channel = ErrorChannel::Quantum {
                epsilon: eps,
                regime,
            };
            cfg.master_seed = point_seed(base.master_seed, out.len());
            cfg.validate()?;
            let curve = curve_until_crossing(&cfg, threshold)?;
            out.push(estimate_tf(&curve, threshold)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub big_k: f64,
    pub initial: InitialCondition,
    pub lyapunov: f64,
    pub fit: DecayFit,
}

/// Exponential decay rate per `K` and initial condition, with the channel,
/// lattice size and ensembles of `base`.
pub fn sweep_rate_vs_k(
    base: &ExperimentConfig,
    ks: &[f64],
    initials: &[InitialCondition],
) -> Result<Vec<RateRecord>> {
    let mut out = Vec::with_capacity(ks.len() * initials.len());
    for &k in ks {
        for &initial in initials {
            let mut cfg = *base;
            cfg.lattice = base.lattice.with_big_k(k)?;
            cfg.initial = initial;
            cfg.master_seed = point_seed(base.master_seed, out.len());
            cfg.validate()?;
            let curve = fidelity_curve(&cfg)?;
            out.push(RateRecord {
                big_k: k,
                initial,
                lyapunov: lyapunov_exponent(ClassicalParams::new(k)?),
                fit: fit_decay(&curve, DecayModel::Exponential)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayRegime {
    /// Unperturbed: the fidelity stays at one.
    NoDecay,
    /// Rate well below the Lyapunov exponent (or a stable map), growing as `dK^2`.
    FermiGoldenRule,
    /// Rate within 25% of the Lyapunov exponent.
    Lyapunov,
    /// Rate above the Lyapunov exponent.
    AboveLyapunov,
    /// Gaussian-profile decay.
    Gaussian,
}

impl DecayRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayRegime::NoDecay => "no_decay",
            DecayRegime::FermiGoldenRule => "fermi_golden_rule",
            DecayRegime::Lyapunov => "lyapunov",
            DecayRegime::AboveLyapunov => "above_lyapunov",
            DecayRegime::Gaussian => "gaussian",
        }
    }
}

/// Relative distance to the Lyapunov exponent accepted as saturation.
pub const LYAPUNOV_TOLERANCE: f64 = 0.25;

pub fn classify_rate(rate: f64, lyapunov: f64) -> DecayRegime {
    if lyapunov > 0.0 && (rate - lyapunov).abs() <= LYAPUNOV_TOLERANCE * lyapunov {
        DecayRegime::Lyapunov
    } else if lyapunov > 0.0 && rate > lyapunov {
        DecayRegime::AboveLyapunov
    } else {
        DecayRegime::FermiGoldenRule
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeRecord {
    pub delta_big_k: f64,
    /// Perturbation in units of the quantum kick, `dK / T`; above one it
    /// couples many levels.
    pub delta_k: f64,
    pub lyapunov: f64,
    pub fit: Option<DecayFit>,
    pub regime: DecayRegime,
}

/// Fits the decay for each kick-noise amplitude `dK` and labels its regime.
/// `base` supplies `K`, lattice, initial condition and ensembles; its channel
/// is replaced by classical errors.
pub fn classical_error_regimes(
    base: &ExperimentConfig,
    delta_big_ks: &[f64],
    model: DecayModel,
) -> Result<Vec<RegimeRecord>> {
    let lyapunov = lyapunov_exponent(ClassicalParams::new(base.lattice.big_k())?);
    let mut out = Vec::with_capacity(delta_big_ks.len());
    for (i, &dk) in delta_big_ks.iter().enumerate() {
        let delta_k = dk / base.lattice.hbar_eff();
        if dk == 0.0 {
            out.push(RegimeRecord {
                delta_big_k: dk,
                delta_k,
                lyapunov,
                fit: None,
                regime: DecayRegime::NoDecay,
            });
            continue;
        }
        let mut cfg = *base;
        cfg.channel = ErrorChannel::Classical { delta_big_k: dk };
        cfg.master_seed = point_seed(base.master_seed, i);
        cfg.validate()?;
        let curve = fidelity_curve(&cfg)?;
        let fit = fit_decay(&curve, model)?;
        let regime = match model {
            DecayModel::Gaussian => DecayRegime::Gaussian,
            DecayModel::Exponential => classify_rate(fit.rate, lyapunov),
        };
        out.push(RegimeRecord {
            delta_big_k: dk,
            delta_k,
            lyapunov,
            fit: Some(fit),
            regime,
        });
    }
    Ok(out)
}
