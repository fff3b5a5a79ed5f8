use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical parameter is outside its valid domain.
    #[error("invalid parameter `{name}`: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The effective complex pulse width has a non-positive real part, i.e.
    /// the absorption coefficient acts as gain and the Gaussian closed forms
    /// no longer converge.
    #[error("gain regime: effective width parameter has non-positive real part (re = {re:.3e})")]
    GainRegime { re: f64 },

    /// A sampling grid fails one of the resolution or span preconditions.
    #[error("grid underresolved: {0}")]
    GridUnderresolved(String),

    /// A field with zero norm was handed to a moment computation.
    #[error("zero-norm field: moments are undefined")]
    ZeroNorm,

    /// Probabilities handed to a random choice do not form a distribution.
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
}
