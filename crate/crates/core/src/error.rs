use thiserror::Error;

use crate::quad::QuadratureError;
use crate::specfun::SpecFunError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cannot parse '{token}': {message}")]
    Parse { token: String, message: String },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("inscribed polygons still growing at {vertices} vertices (length {last}); curve may not be rectifiable")]
    NotRectifiable { last: f64, vertices: usize },
    #[error("extension is degenerate at r = {r}, theta = {theta}: |u_z| = {dz}")]
    Degenerate { r: f64, theta: f64, dz: f64 },
    #[error("extension is not quasiconformal on the grid: |mu| = {mu} at r = {r}, theta = {theta}")]
    NotQuasiconformal { mu: f64, r: f64, theta: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical limit process rather than bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::Quadrature(QuadratureError::NoConvergence { .. })
                | Error::SpecFun(SpecFunError::NoConvergence { .. })
                | Error::NotRectifiable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
