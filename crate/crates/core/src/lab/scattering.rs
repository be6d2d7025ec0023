//! Ancilla-based fidelity estimator.
//!
//! One ancilla qubit on top of the `n_q`-qubit register: Hadamard on the
//! ancilla, `W = (U^t)^dagger U_eps^t` controlled by it, then a measurement of
//! the ancilla in the `x` or `y` basis. The two polarisations are the real and
//! imaginary parts of `<psi|W|psi>`, so `f = <sigma_z>^2 + <sigma_y>^2`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::curve::RunContext;
use crate::circuit::{apply_single_qubit, hadamard_matrix, Matrix2};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamDomain};
use crate::state::{Basis, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScatteringMode {
    /// Exact ancilla expectation values from the joint state.
    Analytic,
    /// Finite-shot estimate, `shots` measurements per basis.
    Sampled { shots: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringOutcome {
    /// Ancilla polarisation measured after the closing Hadamard (`Re <W>`).
    pub sigma_z: f64,
    /// Ancilla polarisation in the `y` basis (`Im <W>`).
    pub sigma_y: f64,
    pub fidelity: f64,
    pub shots: Option<usize>,
    /// Binomial standard error of `fidelity` in sampled mode, propagated
    /// from the two polarisation estimates.
    pub std_error: Option<f64>,
}

/// Standard error of `z^2 + y^2` when `z` and `y` are each estimated from
/// `shots` binary outcomes (normal approximation, `Var(x^2) = 4 m^2 v + 2 v^2`).
pub fn sampled_fidelity_error(sigma_z: f64, sigma_y: f64, shots: usize) -> f64 {
    let var_sq = |s: f64| {
        let v = (1.0 - s * s).max(0.0) / shots as f64;
        4.0 * s * s * v + 2.0 * v * v
    };
    (var_sq(sigma_z) + var_sq(sigma_y)).sqrt()
}

fn s_dagger_then_h() -> Matrix2 {
    let h = hadamard_matrix();
    let phase = Complex64::new(0.0, -1.0);
    [[h[0][0], h[0][1] * phase], [h[1][0], h[1][1] * phase]]
}

/// Probability that the ancilla (top qubit) reads 0.
fn ancilla_zero(amps: &[Complex64]) -> f64 {
    let half = amps.len() / 2;
    let p0: f64 = amps[..half].iter().map(Complex64::norm_sqr).sum();
    let total: f64 = amps.iter().map(Complex64::norm_sqr).sum();
    p0 / total
}

/// Runs the scattering circuit for ensemble member `member` after `t` steps.
/// The perturbed evolution uses the same noise draws as the member's curve
/// in [`super::fidelity_curve`].
pub fn scattering_fidelity(
    config: &ExperimentConfig,
    member: usize,
    t: usize,
    mode: ScatteringMode,
) -> Result<ScatteringOutcome> {
    if member >= config.ensembles.members() {
        return Err(Error::InvalidParameter(format!(
            "member {member} outside ensemble of {}",
            config.ensembles.members()
        )));
    }
    if let ScatteringMode::Sampled { shots: 0 } = mode {
        return Err(Error::InvalidParameter(
            "shot count must be positive".into(),
        ));
    }
    let ctx = RunContext::new(config)?;
    let psi = ctx.member_initial(member)?;
    let dim = psi.dim();
    let ancilla = config.lattice.n_qubits() as usize;

    let mut joint = vec![Complex64::new(0.0, 0.0); 2 * dim];
    joint[..dim].copy_from_slice(psi.amplitudes());
    apply_single_qubit(&mut joint, ancilla, &hadamard_matrix());

    // controlled-W on the ancilla-one branch
    let mut branch =
        QuantumState::from_amplitudes(joint[dim..].to_vec(), Basis::Momentum, config.lattice)?;
    let mut stepper = ctx.stepper(member)?;
    for step in 0..t {
        stepper.step(&ctx.propagator, &mut branch, step)?;
    }
    for _ in 0..t {
        ctx.propagator.step_inverse(&mut branch, 0.0)?;
    }
    joint[dim..].copy_from_slice(branch.amplitudes());

    let mut zx = joint.clone();
    apply_single_qubit(&mut zx, ancilla, &hadamard_matrix());
    let p_x = ancilla_zero(&zx);
    let mut zy = joint;
    apply_single_qubit(&mut zy, ancilla, &s_dagger_then_h());
    let p_y = ancilla_zero(&zy);

    let (sigma_z, sigma_y, shots) = match mode {
        ScatteringMode::Analytic => (2.0 * p_x - 1.0, 2.0 * p_y - 1.0, None),
        ScatteringMode::Sampled { shots } => {
            let mut rng = stream(config.master_seed, StreamDomain::Sampling, member as u64);
            let mut estimate = |p: f64| {
                let zeros = (0..shots)
                    .filter(|_| rng.random_bool(p.clamp(0.0, 1.0)))
                    .count();
                2.0 * zeros as f64 / shots as f64 - 1.0
            };
            let z = estimate(p_x);
            let y = estimate(p_y);
            (z, y, Some(shots))
        }
    };
    Ok(ScatteringOutcome {
        sigma_z,
        sigma_y,
        fidelity: sigma_z * sigma_z + sigma_y * sigma_y,
        shots,
        std_error: shots.map(|n| sampled_fidelity_error(sigma_z, sigma_y, n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::NoiseRegime;
    use crate::lab::config::{Ensembles, ErrorChannel, InitialCondition};
    use crate::lab::curve::member_fidelities;
    use crate::lattice::LatticeParams;

    fn config() -> ExperimentConfig {
        ExperimentConfig::new(
            LatticeParams::new(5, 1.3).unwrap(),
            ErrorChannel::Quantum {
                epsilon: 0.05,
                regime: NoiseRegime::Memoryless,
            },
            InitialCondition::Random,
            12,
            Ensembles::new(2, 2),
            3,
        )
        .unwrap()
    }

    #[test]
    fn zero_steps_give_one() {
        let o = scattering_fidelity(&config(), 1, 0, ScatteringMode::Analytic).unwrap();
        assert!((o.fidelity - 1.0).abs() < 1e-14);
        assert!(o.sigma_y.abs() < 1e-14);
    }

    #[test]
    fn polarisations_are_real_and_imaginary_parts() {
        let cfg = config();
        let ctx = RunContext::new(&cfg).unwrap();
        let psi = ctx.member_initial(2).unwrap();
        let mut w = psi.clone();
        let mut stepper = ctx.stepper(2).unwrap();
        for s in 0..7 {
            stepper.step(&ctx.propagator, &mut w, s).unwrap();
        }
        for _ in 0..7 {
            ctx.propagator.step_inverse(&mut w, 0.0).unwrap();
        }
        let overlap = psi.inner(&w).unwrap();
        let o = scattering_fidelity(&cfg, 2, 7, ScatteringMode::Analytic).unwrap();
        assert!((o.sigma_z - overlap.re).abs() < 1e-12);
        assert!((o.sigma_y - overlap.im).abs() < 1e-12);
        let direct = member_fidelities(&cfg).unwrap();
        assert!((o.fidelity - direct[2][7]).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_seeded_and_validated() {
        let cfg = config();
        let mode = ScatteringMode::Sampled { shots: 500 };
        let a = scattering_fidelity(&cfg, 0, 5, mode).unwrap();
        assert_eq!(a, scattering_fidelity(&cfg, 0, 5, mode).unwrap());
        assert!(a.std_error.unwrap() > 0.0);
        assert!(scattering_fidelity(&cfg, 0, 5, ScatteringMode::Sampled { shots: 0 }).is_err());
        assert!(scattering_fidelity(&cfg, 4, 5, ScatteringMode::Analytic).is_err());
    }

    #[test]
    fn propagated_error_limits() {
        let se = sampled_fidelity_error(1.0, 0.0, 100);
        assert!((se - 2f64.sqrt() / 100.0).abs() < 1e-15);
        let se = sampled_fidelity_error(0.6, 0.0, 10_000);
        assert!((se - 2.0 * 0.6 * 0.008).abs() < 1e-5);
    }
}
