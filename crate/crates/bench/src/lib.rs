//! Benchmark harness for the `hoid` crate: test-tensor generators, `.dten`
//! and CSV I/O, and rank sweeps across methods and selectors.

pub mod gen;
pub mod io;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Decomposition(#[from] hoid::Error),
}
