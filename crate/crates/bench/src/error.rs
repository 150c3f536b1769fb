use std::path::Path;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Solver(#[from] apdpro::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("reference did not converge: KKT residual {residual:.3e} after {iterations} iterations")]
    ReferenceUnconverged { residual: f64, iterations: usize },

    #[error("reference file {path}: {message}")]
    ReferenceFile { path: String, message: String },
}

impl BenchError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io { path: path.display().to_string(), source }
    }
}
