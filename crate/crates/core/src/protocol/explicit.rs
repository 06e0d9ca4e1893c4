use std::collections::{BTreeMap, BTreeSet};

use crate::crypto::NodeId;

use super::message::{FinalVote, SignedMessage};
use super::{Decision, ProtocolContext};

/// Counts final announcements received by one node in explicit mode.
///
/// The decision is the value announced by the most distinct committee
/// members. Ties go to the larger value so that all nodes holding the same
/// announcements decide the same way.
#[derive(Debug, Default, Clone)]
pub struct FinalTally {
    support: BTreeMap<u64, BTreeSet<NodeId>>,
}

impl FinalTally {
    pub fn new() -> Self {
        FinalTally::default()
    }

    pub fn receive(&mut self, ctx: &ProtocolContext<'_>, vote: &FinalVote) -> bool {
        let signer = vote.signature.signer;
        if !ctx.committee.contains(signer) {
            return false;
        }
        let (buf, len) = SignedMessage::Final { value: vote.value }.encode();
        if !ctx.pki.verify_node(signer, &buf[..len], &vote.signature) {
            return false;
        }
        self.support.entry(vote.value).or_default().insert(signer);
        true
    }

    pub fn support(&self, value: u64) -> usize {
        self.support.get(&value).map_or(0, BTreeSet::len)
    }

    pub fn decide(&self) -> Decision {
        self.support
            .iter()
            .max_by_key(|(value, signers)| (signers.len(), **value))
            .map_or(Decision::Undecided, |(value, _)| Decision::Decided(*value))
    }
}
