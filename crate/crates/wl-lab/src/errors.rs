use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex index {vertex} out of range (n = {n})")]
    Range { vertex: usize, n: usize },

    #[error("conflicting declaration for arc ({u},{v}): colors {old} and {new}")]
    Conflict { u: usize, v: usize, old: String, new: String },

    #[error("refinement budget exceeded: {required} tuples needed, {allowed} allowed (set WL_LAB_MEM_MB to raise)")]
    Resource { required: u128, allowed: u128 },

    #[error("size guard exceeded: {actual} > {limit} ({what})")]
    SizeGuard { what: &'static str, actual: usize, limit: usize },

    #[error("unsupported order {n}: {what}")]
    UnsupportedOrder { n: usize, what: &'static str },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("unknown fiber id {0}")]
    UnknownFiber(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
