//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SpnError {
    #[error("matrix order {n} exceeds the hard cap {max} for this operation")]
    OrderTooLarge { n: usize, max: usize },
    #[error("matrix is not copositive")]
    NotCopositive,
    #[error("vertex {v} is not a cut vertex separating the given parts")]
    NotCutVertex { v: usize },
    #[error("graph of the matrix does not match the expected pattern: {0}")]
    GraphMismatch(String),
    #[error("input graph is disconnected")]
    DisconnectedInput,
    #[error("graph is neither 2-connected nor a single edge")]
    NotTwoConnected,
    #[error("pattern or host graph too large: {0}")]
    PatternTooLarge(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("graph has {n} vertices, above the classification cap {max}")]
    GraphTooLarge { n: usize, max: usize },
    #[error("internal consistency failure: {0}")]
    InternalInconsistency(String),
    #[error("edge ({i},{j}) is not negative")]
    EdgeNotNegative { i: usize, j: usize },
    #[error("path {x}-{y}-{z} is not a negative path")]
    PathNotNegative { x: usize, y: usize, z: usize },
    #[error("invalid perturbation constant c: {0}")]
    BadC(String),
    #[error("witness graph is not a subgraph of the target")]
    NotSubgraph,
    #[error("no dual certificate found: {0}")]
    CertificateNotFound(String),
    #[error("graph is not classified NOT_SPN")]
    GraphIsNotNotSpn,
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("input matrix is not symmetric (entries ({i},{j}) and ({j},{i}) differ by {delta:e})")]
    AsymmetricInput { i: usize, j: usize, delta: f64 },
    #[error("graph file mixes signed and unsigned edge lines")]
    MixedSignedness,
    #[error("graph file contains a loop or duplicate edge at line {line}")]
    LoopOrDuplicate { line: usize },
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

pub type Result<T> = std::result::Result<T, SpnError>;
