use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain where the routine is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested range exceeds what the sieve supports.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// `p^(1/2+eps) - cos(t ln p)` could reach zero, leaving the principal
    /// branch of the Euler-factor arctangent.
    #[error("branch safety violated: eps = {eps} must exceed -1/2")]
    BranchSafety { eps: f64 },

    #[error("degenerate antiderivative: a and b are both zero")]
    Degenerate,

    /// Integration-by-parts series truncated outside its validity region.
    #[error("truncation order j_max = {j_max} invalid for t = {t} (need 1 <= j_max <= 8 and j_max < t/10)")]
    TruncationValidity { j_max: usize, t: f64 },

    /// A modulus fell below the floor where a phase derivative is meaningful.
    #[error("near-zero singularity at t = {t}: |value|^2 = {modulus_sq:e}")]
    NearZero { t: f64, modulus_sq: f64 },

    /// A sample grid is too coarse for the requested smoothing window.
    #[error("resolution error: grid step {step} not below W/4 = {limit}")]
    Resolution { step: f64, limit: f64 },

    /// The oracle was asked for a point outside its accuracy envelope.
    #[error("accuracy envelope exceeded: |t| = {t} > {limit}")]
    Envelope { t: f64, limit: f64 },

    #[error("malformed prime cache: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
