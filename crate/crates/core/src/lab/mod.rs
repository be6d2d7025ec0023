//! Fidelity experiments: ensemble curves under classical or gate errors,
//! the ancilla scattering estimator, decay fits and parameter sweeps.

mod config;
mod curve;
mod fit;
mod output;
mod scattering;
mod sweep;

pub use config::{Ensembles, ErrorChannel, ExperimentConfig, InitialCondition};
pub use curve::{
    fidelity_curve, initial_state, member_fidelities, member_noise_seed, FidelityCurve,
};
pub use fit::{
    estimate_tf, fit_decay, fit_decay_with, fit_with_jackknife, linear_fit, proportional_fit,
    DecayFit, DecayModel, FitForm, FitWindow, TfRecord, MIN_FIT_POINTS,
};
pub use output::{curve_csv, rate_csv, regime_csv, tf_csv};
pub use scattering::{
    sampled_fidelity_error, scattering_fidelity, ScatteringMode, ScatteringOutcome,
};
pub use sweep::{
    classical_error_regimes, classify_rate, curve_until_crossing, point_seed, sweep_rate_vs_k,
    sweep_tf, DecayRegime, RateRecord, RegimeRecord, LYAPUNOV_TOLERANCE,
};
