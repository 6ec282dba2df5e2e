use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The closed-form connection interval is only stated for a constant
    /// annulus probability.
    #[error("p' interval needs a constant annulus probability; linear-decay kernel requires an explicit effective p")]
    KernelUnsupported,

    #[error("node {0} is not a terminal")]
    UnknownTerminal(NodeId),

    #[error("invalid relay partition: {0}")]
    InvalidPartition(String),

    #[error("brute-force enumeration limited to {max} relays, graph has {n}")]
    SizeGuard { n: usize, max: usize },

    #[error("coding rate {rate} exceeds multicast capacity {capacity}")]
    RateExceedsCapacity { rate: usize, capacity: u64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by caller input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
