//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: dimension mismatches, out-of-range depths,
    /// non-finite entries, missing roles.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `z I - A` (or a closed-loop counterpart) is singular at the
    /// requested complex frequency.
    #[error("complex frequency {z} coincides with an eigenvalue of the system")]
    EigenvalueHit { z: num_complex::Complex64 },

    /// The plant/controller interconnection has a singular algebraic loop.
    #[error("closed loop is not well-posed: algebraic loop gain is singular")]
    IllPosedLoop,

    /// Divergence guard tripped during closed-loop collection.
    #[error("closed loop diverged at sample {step} (|y| = {magnitude:.3e})")]
    DivergedLoop { step: usize, magnitude: f64 },

    /// FRF estimation hit a zero denominator at an excited bin.
    #[error("degenerate FRF bin {bin} in period {period}: zero input-injection correlation")]
    DegenerateBin { bin: usize, period: usize },

    /// The supplied past window is not consistent with the data.
    #[error("past trajectory inconsistent with data: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    InconsistentPast { residual: f64, tolerance: f64 },

    /// Frequency-response evaluation did not reach the requested residual.
    #[error("frequency-response evaluation failed: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    EvaluationFailed { residual: f64, tolerance: f64 },

    /// The kernel construction for the LQR right inverse broke down.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Convex program is (detectably) infeasible.
    #[error("problem infeasible: {0}")]
    Infeasible(String),

    /// Solver hit its iteration cap before reaching the tolerance.
    #[error("solver reached the iteration limit ({0} iterations)")]
    MaxIterations(usize),

    /// A factorization or step computation failed inside a solver.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Receding-horizon loop failed at a specific step.
    #[error("control failure at step {step}: {source}")]
    ControlFailure { step: usize, source: Box<Error> },

    /// Bad CLI / file configuration.
    #[error("config error: {0}")]
    ConfigError(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Machine-readable error kind used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::EigenvalueHit { .. } => "EigenvalueHit",
            Error::IllPosedLoop => "IllPosedLoop",
            Error::DivergedLoop { .. } => "DivergedLoop",
            Error::DegenerateBin { .. } => "DegenerateBin",
            Error::InconsistentPast { .. } => "InconsistentPast",
            Error::EvaluationFailed { .. } => "EvaluationFailed",
            Error::DegenerateData(_) => "DegenerateData",
            Error::Infeasible(_) => "Infeasible",
            Error::MaxIterations(_) => "MaxIterations",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::ControlFailure { .. } => "ControlFailure",
            Error::ConfigError(_) => "ConfigError",
            Error::Io(_) => "Io",
            Error::Serde(_) => "Serde",
        }
    }
}
