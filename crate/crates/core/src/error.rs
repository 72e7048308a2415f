use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("principal-value point E = {e} (omega = {omega_pole}) is not covered by the grid (coverage up to omega = {omega_edge})")]
    PrincipalValueCoverage {
        e: f64,
        omega_pole: f64,
        omega_edge: f64,
    },

    #[error("root finding did not converge after {iterations} iterations (last residual {residual:e})")]
    RootFinding { iterations: usize, residual: f64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("integration failure at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
