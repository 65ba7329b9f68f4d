//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Adaptive quadrature hit the subdivision cap before reaching its
    /// tolerance. The carried estimate is the best one available.
    #[error("quadrature did not converge after {subdivisions} subdivisions: \
             estimated error {abs_error:.3e} exceeds target {target:.3e}")]
    QuadratureNonConvergence {
        subdivisions: usize,
        abs_error: f64,
        target: f64,
        estimate_re: f64,
        estimate_im: f64,
    },

    /// A sampled-grid coefficient was evaluated outside its support.
    /// Extrapolation is forbidden, not clamped.
    #[error("evaluation at t = {t} outside the sampled grid [{lo}, {hi}]")]
    GridExtrapolation { t: f64, lo: f64, hi: f64 },

    /// A rational coefficient 1/(T − t) was evaluated at or beyond t = T.
    #[error("coefficient 1/(T - t) evaluated at t = {t} with singularity at T = {horizon}")]
    CoefficientSingularity { t: f64, horizon: f64 },

    /// The argument path of a characteristic exponent passed too close to a
    /// pole; results across the pole would silently cross a branch cut.
    #[error("transform argument within {distance:.3e} of pole at ({pole_re}, {pole_im}); \
             threshold {threshold:.3e}")]
    PoleProximity {
        distance: f64,
        threshold: f64,
        pole_re: f64,
        pole_im: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The truncated series did not meet its tolerance within `n_max` terms.
    #[error("series did not converge within {n_max} terms; tail bound {tail_bound:.3e}")]
    SeriesNonConvergence { n_max: usize, tail_bound: f64 },

    #[error("empty sample array")]
    EmptySamples,

    #[error("route `{route}` is not available for the `{family}` process family")]
    UnsupportedRoute {
        route: &'static str,
        family: &'static str,
    },

    #[error("inversion integral did not converge: {detail}")]
    InversionFailure { detail: String },

    /// A principal-branch power or logarithm would be evaluated across its
    /// cut, where the closed forms stop being continuous in the parameters.
    #[error("branch cut crossed: {detail}")]
    BranchCut { detail: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
