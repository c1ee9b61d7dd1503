use std::path::PathBuf;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input has {got} values but the network has {expected} channels")]
    InputShape { expected: usize, got: usize },

    #[error("bit vector width {got} does not match expected width {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("channel counts differ: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("images {0:?} do not form a bijection on 1..=n")]
    NotAPermutation(Vec<usize>),

    #[error("channel count {0} out of supported range {1}")]
    Unsupported(usize, &'static str),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("prefix depth {prefix} exceeds target depth {target}")]
    PrefixTooDeep { prefix: usize, target: usize },

    #[error("subnetwork size {m} out of range 1..={n}")]
    SubnetSize { m: usize, n: usize },

    #[error("solver command failed to start: {0}")]
    SolverSpawn(String),

    #[error("solver output malformed: {0}")]
    SolverOutput(String),

    #[error("outcome has status {0}, expected SAT")]
    NotSat(String),

    #[error("decoded layer {layer} uses channel {channel} twice")]
    DecodeIntegrity { layer: usize, channel: usize },

    #[error("no solver available: {0}")]
    NoSolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("could not read {path}: {source}")]
    FileIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
