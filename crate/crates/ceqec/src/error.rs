use std::path::PathBuf;

use ceqec_core::analysis::AnalysisError;
use ceqec_core::code::CodeError;
use ceqec_core::extraction::ExtractionError;
use ceqec_core::frame::FrameError;
use ceqec_core::ftec::FtecError;
use ceqec_core::montecarlo::MonteCarloError;
use ceqec_core::noise::NoiseError;
use ceqec_core::search::SearchError;
use thiserror::Error;

/// A text-format error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Ftec(#[from] FtecError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("circuit is invalid:\n{0}")]
    InvalidCircuit(String),
    #[error("{0}")]
    Config(String),
    /// Bad command-line usage that the argument parser cannot detect.
    #[error("{0}")]
    Usage(String),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
