//! Error types shared across the crate.

/// Common result type for this library.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by kinematics, sensing, calibration, simulation, and
/// reconstruction operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Bridge output voltage outside the physically reachable band, i.e. a
    /// saturated or disconnected sensor. `k` is the inversion ratio that
    /// must lie strictly inside (0, 1).
    #[error("bridge voltage out of range (k = {k}); sensor saturated or disconnected")]
    BridgeOutOfRange { k: f64 },

    /// Too few distinct abscissae to determine the cubic fit.
    #[error("rank-deficient fit: {distinct} distinct abscissae, need at least {needed}")]
    RankDeficient { distinct: usize, needed: usize },

    /// Calibration record does not match the sensor channel layout.
    #[error("mismatched calibration: {0}")]
    MismatchedCalibration(String),

    /// Share of saturated/invalid samples exceeded the configured threshold.
    #[error("too many invalid samples on channel {channel}: {invalid} of {total}")]
    TooManyInvalidSamples {
        channel: usize,
        invalid: usize,
        total: usize,
    },

    /// Actuation command drives the plant outside its feasible range.
    #[error("infeasible command: {0}")]
    InfeasibleCommand(String),

    /// Series or trajectory lengths (or timestamps) do not line up.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
