use thiserror::Error;

use crate::crypto::NodeId;

/// Rejected configuration, raised before any trial state is built.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("network needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("epsilon must lie in (0, 0.5], got {0}")]
    Epsilon(f64),
    #[error("f = {f} exceeds the resilience bound floor((1/2 - {eps}) * {n}) = {max}")]
    TooManyFaults { f: usize, max: usize, n: usize, eps: f64 },
    #[error("committee constant must be positive and finite, got {0}")]
    CommitteeConstant(f64),
    #[error("word factor must be at least 1")]
    WordFactor,
    #[error("digest width must lie in 8..=64 bits, got {0}")]
    DigestBits(u32),
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("random input domain must be non-empty")]
    EmptyDomain,
    #[error("sweep needs at least one network size")]
    NoSizes,
    #[error("{0}")]
    Parse(String),
}

/// A violation of the simulation contract. Any of these aborts the trial.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimFault {
    #[error("setup phase out of order: expected {expected}, attempted {attempted}")]
    PhaseOrder {
        expected: &'static str,
        attempted: &'static str,
    },
    #[error("adversary attempted to sign for honest node {0}")]
    Forgery(NodeId),
    #[error("adversary emitted an envelope from honest node {0}")]
    Impersonation(NodeId),
    #[error(
        "honest payload {from} -> {to} sent in round {sent} is delivered in round {readable}, \
         after the phase boundary {deadline}"
    )]
    CapacityOverflow {
        from: NodeId,
        to: NodeId,
        sent: u64,
        readable: u64,
        deadline: u64,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}
