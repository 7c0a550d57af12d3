use thiserror::Error;

/// Errors produced by the coefficient, predictor and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The process model violates one of its structural conditions.
    #[error("invalid model: {0}")]
    ModelValidation(String),

    /// An infinite sum could not be truncated within the requested tolerance.
    #[error("truncation failure: {what} (achieved {achieved:.3e}, required {required:.3e})")]
    Truncation {
        what: String,
        achieved: f64,
        required: f64,
    },

    /// A caller-supplied argument is out of range or inconsistent.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Loss of positive definiteness while solving for predictor coefficients.
    #[error("degenerate autocovariance at order {order}: {detail}")]
    Degeneracy { order: usize, detail: String },

    /// The requested operation needs a memory regime the model does not satisfy.
    #[error("regime violation: {0}")]
    Regime(String),

    /// Two independent predictor routes disagree beyond tolerance.
    #[error("predictor routes disagree: max abs diff {max_abs_diff:.3e} exceeds {tolerance:.3e} (n = {n})")]
    OracleDisagreement {
        n: usize,
        max_abs_diff: f64,
        tolerance: f64,
    },

    /// The explicit k-series did not settle within the allowed depth.
    #[error("series did not converge within K = {k_max} terms (last term {last_term:.3e}); try a larger K")]
    NonConvergence { k_max: usize, last_term: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
