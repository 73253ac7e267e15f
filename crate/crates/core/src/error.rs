use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),

    #[error("operation requires n = {required}, got n = {actual}")]
    UnsupportedDimension { required: String, actual: usize },

    #[error("quadrature budget of {evaluations} evaluations exceeded (best estimate {estimate:e}, error {error_estimate:e})")]
    BudgetExceeded {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("step size underflow at t = {t} (h = {step:e}); problem looks stiff")]
    Stiffness { t: f64, step: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
