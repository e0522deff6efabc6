use thiserror::Error;

/// Errors raised by the solver, the diagnostics and the configuration layer.
#[derive(Debug, Error)]
pub enum NskError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("multiplier `{label}` is undefined at xi = {xi:?}")]
    UndefinedMultiplier { label: String, xi: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dyadic block {j} outside resolvable range [{min}, {max}]")]
    BlockOutOfRange { j: i32, min: i32, max: i32 },

    #[error("invertibility radius exceeded at t = {t}: scaled density variable {value} outside [{lower}, {upper}]")]
    Invertibility {
        t: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("vacuum at t = {t}: min density {min_rho} <= floor {floor}")]
    Vacuum { t: f64, min_rho: f64, floor: f64 },

    #[error("CFL violation at t = {t}: dt = {dt} exceeds limit {limit}")]
    Cfl { t: f64, dt: f64, limit: f64 },

    #[error("blow-up at t = {t}: monitored norm grew by a factor {growth}")]
    BlowUp { t: f64, growth: f64 },

    #[error("time mismatch: {left} vs {right} (tolerance {tol})")]
    TimeMismatch { left: f64, right: f64, tol: f64 },

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),

    #[error("config line {line}, key `{key}`: {msg}")]
    Config { line: usize, key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl NskError {
    /// Runtime aborts (as opposed to validation failures) of a simulation.
    pub fn is_runtime_abort(&self) -> bool {
        matches!(
            self,
            NskError::Invertibility { .. }
                | NskError::Vacuum { .. }
                | NskError::Cfl { .. }
                | NskError::BlowUp { .. }
        )
    }

    /// Short machine-readable reason tag used in result summaries.
    pub fn reason(&self) -> &'static str {
        match self {
            NskError::InvalidGrid(_) => "invalid-grid",
            NskError::Incompatible(_) => "incompatible",
            NskError::UndefinedMultiplier { .. } => "undefined-multiplier",
            NskError::InvalidParameter(_) => "invalid-parameter",
            NskError::BlockOutOfRange { .. } => "block-out-of-range",
            NskError::Invertibility { .. } => "invertibility",
            NskError::Vacuum { .. } => "vacuum",
            NskError::Cfl { .. } => "cfl",
            NskError::BlowUp { .. } => "blow-up",
            NskError::TimeMismatch { .. } => "time-mismatch",
            NskError::Fit(_) => "fit",
            NskError::Inadmissible(_) => "inadmissible",
            NskError::Config { .. } => "config",
            NskError::Io(_) => "io",
            NskError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, NskError>;
