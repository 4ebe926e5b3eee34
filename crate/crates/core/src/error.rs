use thiserror::Error;

use crate::model::LatchMode;

pub type Result<T> = std::result::Result<T, EpjError>;

/// Coarse grouping used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Simulation,
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpjError {
    #[error("malformed config: {0}")]
    Parse(String),

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("joint angle {phi} rad outside [0, pi]")]
    Domain { phi: f64 },

    #[error("spring length vanishes (l_OC = l_OD at phi = 0)")]
    Singular,

    #[error("latch is {found:?}, expected {expected:?}")]
    LatchState {
        found: LatchMode,
        expected: LatchMode,
    },

    #[error("non-finite {field} at t = {t} s")]
    NonFinite { field: &'static str, t: f64 },

    #[error("latch never closed before t_max = {t_max} s (min phi reached {min_phi} rad)")]
    Watchdog { t_max: f64, min_phi: f64 },

    #[error("joint driven past full extension (phi > pi) at t = {t} s")]
    OverCenter { t: f64 },

    #[error("stored spring energy {spring} J exceeds launch kinetic budget {budget} J")]
    Infeasible { spring: f64, budget: f64 },

    #[error("no sign change of omega_end on [{lower}, {upper}]: {f_lower} and {f_upper} rad/s")]
    Bracket {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("every sweep point failed (first cause: {0})")]
    SweepFailed(String),
}

impl EpjError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        EpjError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            EpjError::Parse(_) | EpjError::MissingKey(_) | EpjError::Invalid { .. } => {
                ErrorClass::Config
            }
            EpjError::Bracket { .. } => ErrorClass::Bracket,
            _ => ErrorClass::Simulation,
        }
    }
}
