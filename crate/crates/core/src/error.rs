use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("target false-alarm probability {target} is unachievable: activity probability is only {pi_a}")]
    UnachievableTarget { target: f64, pi_a: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("threshold calibration needs at least {required} PRI samples, got {available}")]
    InsufficientSamples { required: usize, available: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
