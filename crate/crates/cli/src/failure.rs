use std::fmt;

use sawtooth_core::Error;

/// Error with its exit status: 1 for bad configuration, 2 for a failed run
/// or a violated numerical contract.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn config(msg: impl fmt::Display) -> Self {
        Failure::Config(anyhow::anyhow!("{msg}"))
    }

    pub fn runtime(msg: impl fmt::Display) -> Self {
        Failure::Runtime(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Runtime(e) => write!(f, "run failed: {e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientPoints { .. } | Error::NoCrossing { .. } => {
                Failure::Runtime(e.into())
            }
            _ => Failure::Config(e.into()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
