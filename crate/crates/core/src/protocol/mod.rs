//! Honest protocol logic: candidates, referees and the explicit-mode tally.
//!
//! Nothing in here sees global node indices of peers. Nodes address each
//! other through [`Port`]s and learn identities only from signed content.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::committee::CandidateSet;
use crate::crypto::Pki;

pub mod ballot;
pub mod candidate;
pub mod chain;
pub mod explicit;
pub mod message;
pub mod referee;

pub use ballot::{compute_priority, Ballot, BallotKind, PriorityBallot};
pub use candidate::CandidateState;
pub use chain::{validate_chain, verify_links, SignatureChain};
pub use explicit::FinalTally;
pub use message::{BitSizes, FinalVote, Payload, PayloadKind, Port, Priority, SignedMessage, Step0Vote};
pub use referee::RefereeState;

/// Public information every node can compute locally.
#[derive(Clone, Copy, Debug)]
pub struct ProtocolContext<'a> {
    pub pki: &'a Pki,
    pub committee: &'a CandidateSet,
    /// Number of chain iterations, equal to the committee size.
    pub iterations: usize,
    /// Largest value of the public input domain. Anything above it is junk.
    pub max_value: u64,
}

impl ProtocolContext<'_> {
    pub fn admits(&self, value: u64) -> bool {
        value <= self.max_value
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "state", content = "value")]
pub enum Decision {
    #[default]
    Undecided,
    Decided(u64),
}

impl Decision {
    pub fn value(&self) -> Option<u64> {
        match *self {
            Decision::Decided(v) => Some(v),
            Decision::Undecided => None,
        }
    }
}

/// A payload queued on a local port.
#[derive(Clone, Debug)]
pub struct Outgoing {
    pub port: Port,
    pub payload: Rc<Payload>,
}
