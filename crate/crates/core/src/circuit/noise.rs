//! Unitary gate-noise model.
//!
//! Controlled-phase gates pick up `diag(e^{i e0}, e^{i e1}, e^{i e2}, e^{i e3})`
//! on their two-qubit subspace (two phases for single-qubit phase gates);
//! Hadamards become pi-rotations about an axis tilted by `(nu1, nu2)`. Every
//! parameter is uniform in `[-epsilon, epsilon]`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::kernel::{apply_pair_phases, apply_single_phases, apply_single_qubit, tilted_hadamard};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseRegime {
    /// Fresh parameters at every gate application.
    #[default]
    Memoryless,
    /// Parameters fixed per gate position and reused at every map step.
    Static,
}

impl std::str::FromStr for NoiseRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memoryless" => Ok(NoiseRegime::Memoryless),
            "static" => Ok(NoiseRegime::Static),
            other => Err(Error::InvalidParameter(format!(
                "unknown noise regime {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for NoiseRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseRegime::Memoryless => "memoryless",
            NoiseRegime::Static => "static",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub epsilon: f64,
    pub regime: NoiseRegime,
    pub seed: u64,
}

/// Parameters drawn for one noisy gate application.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoisyGateDraw {
    PairPhases([f64; 4]),
    SinglePhases([f64; 2]),
    Tilt { nu1: f64, nu2: f64 },
}

impl NoisyGateDraw {
    pub fn params(&self) -> Vec<f64> {
        match *self {
            NoisyGateDraw::PairPhases(p) => p.to_vec(),
            NoisyGateDraw::SinglePhases(p) => p.to_vec(),
            NoisyGateDraw::Tilt { nu1, nu2 } => vec![nu1, nu2],
        }
    }
}

const STATIC_STREAM: u64 = u64::MAX;

impl NoiseModel {
    pub fn new(epsilon: f64, regime: NoiseRegime, seed: u64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise amplitude must be finite and >= 0, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            regime,
            seed,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            epsilon: 0.0,
            regime: NoiseRegime::Memoryless,
            seed: 0,
        }
    }

    /// Random stream feeding map step `step`. In the static regime every step
    /// gets the same stream, so gate position `g` always sees the same draw.
    pub fn step_rng(&self, step: u64) -> ChaCha8Rng {
        let mut rng = stream(self.seed, StreamDomain::GateNoise, 0);
        rng.set_stream(match self.regime {
            NoiseRegime::Memoryless => step,
            NoiseRegime::Static => STATIC_STREAM,
        });
        rng
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.random_range(-self.epsilon..=self.epsilon)
    }

    /// Draws the error parameters for one application of `gate`.
    /// Returns `None` (and consumes nothing) when `epsilon == 0`.
    pub fn draw<R: Rng + ?Sized>(&self, gate: &Gate, rng: &mut R) -> Option<NoisyGateDraw> {
        if self.epsilon == 0.0 {
            return None;
        }
        Some(match gate {
            Gate::ControlledPhase { .. } => NoisyGateDraw::PairPhases([
                self.sample(rng),
                self.sample(rng),
                self.sample(rng),
                self.sample(rng),
            ]),
            Gate::Phase { .. } => NoisyGateDraw::SinglePhases([self.sample(rng), self.sample(rng)]),
            Gate::Hadamard { .. } => NoisyGateDraw::Tilt {
                nu1: self.sample(rng),
                nu2: self.sample(rng),
            },
        })
    }
}

/// Ideal phase table of a diagonal gate, with the drawn error added.
pub(crate) fn pair_table(angle: f64, draw: Option<&NoisyGateDraw>) -> [f64; 4] {
    let mut t = [0.0, 0.0, 0.0, angle];
    if let Some(NoisyGateDraw::PairPhases(e)) = draw {
        t.iter_mut().zip(e).for_each(|(a, b)| *a += b);
    }
    t
}

pub(crate) fn single_table(angle: f64, draw: Option<&NoisyGateDraw>) -> [f64; 2] {
    let mut t = [0.0, angle];
    if let Some(NoisyGateDraw::SinglePhases(e)) = draw {
        t.iter_mut().zip(e).for_each(|(a, b)| *a += b);
    }
    t
}

/// Applies `gate` with the given (possibly absent) error draw.
pub fn apply_with_draw(amps: &mut [Complex64], gate: &Gate, draw: Option<&NoisyGateDraw>) {
    match *gate {
        Gate::Hadamard { target } => {
            let (nu1, nu2) = match draw {
                Some(NoisyGateDraw::Tilt { nu1, nu2 }) => (*nu1, *nu2),
                _ => (0.0, 0.0),
            };
            apply_single_qubit(amps, target, &tilted_hadamard(nu1, nu2));
        }
        Gate::ControlledPhase {
            control,
            target,
            angle,
        } => apply_pair_phases(amps, control, target, &pair_table(angle, draw)),
        Gate::Phase { target, angle } => {
            apply_single_phases(amps, target, &single_table(angle, draw))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_bounded_and_arity() {
        let noise = NoiseModel::new(0.05, NoiseRegime::Memoryless, 9).unwrap();
        let mut rng = noise.step_rng(0);
        for g in [
            Gate::Hadamard { target: 0 },
            Gate::Phase {
                target: 0,
                angle: 0.2,
            },
            Gate::ControlledPhase {
                control: 0,
                target: 1,
                angle: 0.2,
            },
        ] {
            for _ in 0..200 {
                let d = noise.draw(&g, &mut rng).unwrap();
                let p = d.params();
                assert_eq!(p.len(), g.noise_arity());
                assert!(p.iter().all(|x| x.abs() <= 0.05));
            }
        }
        assert!(NoiseModel::noiseless()
            .draw(&Gate::Hadamard { target: 0 }, &mut rng)
            .is_none());
        assert!(NoiseModel::new(f64::NAN, NoiseRegime::Static, 0).is_err());
    }

    #[test]
    fn static_streams_repeat_memoryless_do_not() {
        let g = Gate::ControlledPhase {
            control: 0,
            target: 1,
            angle: 0.0,
        };
        let s = NoiseModel::new(0.1, NoiseRegime::Static, 3).unwrap();
        let a = s.draw(&g, &mut s.step_rng(0));
        let b = s.draw(&g, &mut s.step_rng(1));
        assert_eq!(a, b);
        let m = NoiseModel::new(0.1, NoiseRegime::Memoryless, 3).unwrap();
        let a = m.draw(&g, &mut m.step_rng(0));
        let b = m.draw(&g, &mut m.step_rng(1));
        assert_ne!(a, b);
    }

    #[test]
    fn regime_parses() {
        assert_eq!(
            "static".parse::<NoiseRegime>().unwrap(),
            NoiseRegime::Static
        );
        assert!("sticky".parse::<NoiseRegime>().is_err());
    }
}
