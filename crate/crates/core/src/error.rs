use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("negative evolution time t = {0} s")]
    NegativeTime(f64),

    /// Antisymmetrizing two identical packets gives a vanishing wavefunction.
    #[error("degenerate two-fermion state: identical packets cannot be antisymmetrized")]
    DegenerateState,

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("the probability-density center never reaches the detector")]
    NoCrossing,

    #[error("no arrival at the detector: flux integral {norm_integral:e} is below threshold")]
    NoArrival { norm_integral: f64 },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {best_estimate:?}, error {error_estimate:e})"
    )]
    ConvergenceFailure {
        best_estimate: Vec<f64>,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("time cutoff did not converge; last cutoff {cutoff:e} s")]
    CutoffNotConverged { cutoff: f64 },

    #[error("grid propagation unstable: norm drift {drift:e} exceeds bound")]
    StepSize { drift: f64 },

    #[error("grid does not cover the density bulk: {0}")]
    GridCoverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

pub(crate) fn ensure_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite, got {value}"),
        })
    }
}
