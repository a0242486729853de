use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("overflow at (k = {k}, eta = {eta}): exponent {exponent} is not representable")]
    Overflow { k: i64, eta: f64, exponent: f64 },

    #[error("time horizon exceeded: nu*t = {nu_t} > {limit} (admissible t < {horizon})")]
    Horizon { nu_t: f64, limit: f64, horizon: f64 },

    #[error("laplace integral does not converge for Re z = {re_z}; admissible abscissa is Re z > {admissible}")]
    Convergence { re_z: f64, admissible: f64 },

    #[error("stability violation: penrose margin {kappa} is not positive")]
    Stability { kappa: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("cap error: {0}")]
    Cap(String),

    #[error("blow-up at t = {t}: non-finite value in mode {k}")]
    BlowUp { t: f64, k: i64 },

    #[error("positivity error: F = mu + h <= 0 at (x = {x}, v = {v})")]
    Positivity { x: f64, v: f64 },

    #[error("fit window error: {0}")]
    Window(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// True for errors that stem from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::Argument(_) | Error::Capability(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
