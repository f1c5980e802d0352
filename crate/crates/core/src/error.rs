use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The scaled angular momentum does not touch the extrusion.
    #[error("mu = {mu} outside classical contact range |mu| < sin(alpha) = {limit}")]
    NoContact { mu: f64, limit: f64 },

    #[error("no caustic for alpha = {alpha} >= pi/2 (deflection covers the full circle)")]
    NoCaustic { alpha: f64 },

    #[error("theta = {theta} outside classical support (|theta| <= {limit})")]
    OutsideSupport { theta: f64, limit: f64 },

    /// Neumann function exceeds the floating-point range. In this regime the
    /// partial wave does not reach the extrusion and its phase shift is zero.
    #[error("Y_{order}({x}) overflows; treat the phase shift of this order as 0")]
    BesselOverflow { order: usize, x: f64 },

    /// Simple stationary phase does not apply close to a caustic.
    #[error("stationary phase not applicable at theta = {theta} (caustic at {theta_c})")]
    StationaryPhaseInvalid { theta: f64, theta_c: f64 },

    #[error("numerical failure: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
