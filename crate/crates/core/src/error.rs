use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The displacement argument lies outside the travel allowed by the stops.
    #[error("displacement {z:e} m outside allowed travel (limit {limit:e} m)")]
    OutOfTravel { z: f64, limit: f64 },

    #[error("design failed validation: {}", format_violations(.0))]
    InvalidDesign(Vec<Violation>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("gap too large for layout budget: pitch {pitch:e} m exceeds edge budget {budget:e} m")]
    LayoutTooSmall { pitch: f64, budget: f64 },

    #[error("no feasible cell in sweep table")]
    NoFeasibleCell,

    #[error("no candidate mass reached the target displacement {target:e} m")]
    TargetNotReached { target: f64 },

    /// Both switch events fell inside one integration step.
    #[error("integration step too coarse at t = {t:e} s: charge and transfer events in one step")]
    StepTooCoarse { t: f64 },

    #[error("simulation state fault at t = {t:e} s: {message}")]
    StateFault { t: f64, message: String },

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("spectrum file {path}: {message}")]
    Spectrum { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("{}: {}", v.field, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
