use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary gate of the sawtooth circuit.
///
/// `Phase` is the single-qubit `diag(1, e^{i angle})` produced by the diagonal
/// terms of a quadratic-phase block; it is booked as a controlled-phase with
/// coinciding control and target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Hadamard {
        target: usize,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Phase {
        target: usize,
        angle: f64,
    },
}

impl Gate {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange { index: q, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Hadamard { target } | Gate::Phase { target, .. } => check(target),
            Gate::ControlledPhase {
                control, target, ..
            } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidParameter(format!(
                        "controlled-phase needs distinct qubits, got {control} twice"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, Gate::Hadamard { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Hadamard { .. } => "H",
            Gate::ControlledPhase { .. } => "CP",
            Gate::Phase { .. } => "P",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Hadamard { .. } => None,
            Gate::ControlledPhase { angle, .. } | Gate::Phase { angle, .. } => Some(angle),
        }
    }

    /// Number of noise parameters a noisy application draws.
    pub fn noise_arity(&self) -> usize {
        match self {
            Gate::ControlledPhase { .. } => 4,
            Gate::Phase { .. } | Gate::Hadamard { .. } => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Gate::Hadamard { target: 3 }.validate(3).is_err());
        assert!(Gate::Hadamard { target: 2 }.validate(3).is_ok());
        let cp = Gate::ControlledPhase {
            control: 1,
            target: 1,
            angle: 0.1,
        };
        assert!(cp.validate(3).is_err());
        let cp = Gate::ControlledPhase {
            control: 0,
            target: 5,
            angle: 0.1,
        };
        assert!(matches!(
            cp.validate(3),
            Err(Error::QubitOutOfRange { index: 5, .. })
        ));
    }
}
