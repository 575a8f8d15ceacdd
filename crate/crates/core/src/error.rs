use thiserror::Error;

/// Errors produced by propagation, curve analysis and the tunneling-time estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LzError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integration config: {0}")]
    InvalidConfig(String),

    #[error("integration window too small: alpha*|t_start| = {sweep} < 10*delta = {limit}")]
    WindowTooSmall { sweep: f64, limit: f64 },

    #[error("norm drift {drift:e} exceeds the allowed {allowed:e}")]
    NormDriftExceeded { drift: f64, allowed: f64 },

    #[error("window not converged: doubling the window changed P(t_end) by {change:e}")]
    WindowNotConverged { change: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("numeric tail not settled: consecutive segment averages differ by {difference:e}")]
    TailNotSettled { difference: f64 },

    #[error("no half-width crossing before t = {t_max}")]
    NoCrossing { t_max: f64 },

    #[error("S1 = P(0) = {s1:e} is too small to form |S2/S1|")]
    DegenerateS1 { s1: f64 },

    #[error("dP/dt(0) = {slope:e} vanishes")]
    ZeroSlope { slope: f64 },

    #[error("time {t} lies outside the trajectory window [{t_start}, {t_end}]")]
    OutOfWindow { t: f64, t_start: f64, t_end: f64 },
}

impl LzError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            LzError::InvalidParams(_) => "invalid_params",
            LzError::InvalidConfig(_) => "invalid_config",
            LzError::WindowTooSmall { .. } => "window_too_small",
            LzError::NormDriftExceeded { .. } => "norm_drift_exceeded",
            LzError::WindowNotConverged { .. } => "window_not_converged",
            LzError::StepUnderflow { .. } => "step_underflow",
            LzError::TailNotSettled { .. } => "tail_not_settled",
            LzError::NoCrossing { .. } => "no_crossing",
            LzError::DegenerateS1 { .. } => "degenerate_s1",
            LzError::ZeroSlope { .. } => "zero_slope",
            LzError::OutOfWindow { .. } => "out_of_window",
        }
    }
}

pub type Result<T> = std::result::Result<T, LzError>;
