use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "elliptic solve did not converge after {iterations} iterations (residual {final_residual:.3e}, target {tolerance:.3e})"
    )]
    EllipticNonConvergence {
        iterations: usize,
        final_residual: f64,
        tolerance: f64,
        residual_history: Vec<f64>,
    },

    #[error("numerical blow-up in field `{field}` at node (i={i}, j={j}), t={t}: value {value}")]
    BlowUp {
        field: &'static str,
        i: usize,
        j: usize,
        t: f64,
        value: f64,
    },

    #[error("forcing is singular at the axis: {0}")]
    SingularForcing(String),

    #[error("missing diagnostic series: {0}")]
    MissingSeries(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BlowUp { .. } | Error::EllipticNonConvergence { .. } => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
