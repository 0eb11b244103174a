use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("duplicate position in configuration at index {0}")]
    DuplicatePosition(usize),

    #[error("point {index} lies outside the window")]
    OutsideWindow { index: usize },

    #[error("no point with index {0}")]
    MissingPoint(usize),

    #[error("configuration of {0} points is too large for subset enumeration (max {1})")]
    TooManyPoints(usize, usize),

    #[error("boundary configuration is not tempered: point with radius {radius} at scale {scale} exceeds g = {bound}")]
    NotTempered { radius: f64, scale: f64, bound: f64 },

    #[error("all {0} partition-function samples were zero; log Z/|Λ| <= {1}")]
    AllZero(usize, f64),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
