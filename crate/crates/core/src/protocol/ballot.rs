use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::committee::CandidateSet;
use crate::crypto::{digest_words, NodeId, Pki};

use super::message::{Priority, SignedMessage, Step0Vote};

/// The Step-0 view of one value: who endorsed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityBallot {
    pub value: u64,
    pub support_count: usize,
    pub signer_set: BTreeSet<NodeId>,
}

impl PriorityBallot {
    pub fn priority(&self) -> Priority {
        Priority::Majority {
            support: self.support_count,
            value: self.value,
        }
    }
}

/// Picks the highest-priority value endorsed by more than half of a committee
/// of `committee_size`. Several values can clear the threshold when corrupt
/// candidates endorse more than one value; the larger support wins, then the
/// larger value. `None` when no value clears the threshold.
pub fn compute_priority(
    ballots: &BTreeMap<u64, BTreeSet<NodeId>>,
    committee_size: usize,
) -> Option<PriorityBallot> {
    ballots
        .iter()
        .filter(|(_, signers)| 2 * signers.len() > committee_size)
        .max_by_key(|(value, signers)| (signers.len(), **value))
        .map(|(value, signers)| PriorityBallot {
            value: *value,
            support_count: signers.len(),
            signer_set: signers.clone(),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallotKind {
    /// Backed by Step-0 votes from a strict majority of the committee.
    Majority,
    /// Backed by a single Step-0 vote; competes for the minimum value.
    Default,
}

/// A value together with the Step-0 votes that establish its priority.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ballot {
    pub kind: BallotKind,
    pub value: u64,
    /// Sorted by signer, one vote per signer.
    pub evidence: Vec<Step0Vote>,
}

impl Ballot {
    pub fn majority(value: u64, votes: impl IntoIterator<Item = Step0Vote>) -> Self {
        let mut evidence: Vec<Step0Vote> = votes.into_iter().collect();
        evidence.sort_by_key(|v| v.signature.signer);
        evidence.dedup_by_key(|v| v.signature.signer);
        Ballot {
            kind: BallotKind::Majority,
            value,
            evidence,
        }
    }

    pub fn default_value(vote: Step0Vote) -> Self {
        Ballot {
            kind: BallotKind::Default,
            value: vote.value,
            evidence: vec![vote],
        }
    }

    pub fn priority(&self) -> Priority {
        match self.kind {
            BallotKind::Majority => Priority::Majority {
                support: self.evidence.len(),
                value: self.value,
            },
            BallotKind::Default => Priority::Default { value: self.value },
        }
    }

    /// Binds kind, value and the exact evidence. Chain links sign this.
    pub fn digest(&self) -> u64 {
        let kind = match self.kind {
            BallotKind::Majority => 1,
            BallotKind::Default => 2,
        };
        digest_words(
            [kind, self.value, self.evidence.len() as u64]
                .into_iter()
                .chain(self.evidence.iter().flat_map(|v| {
                    [v.signature.signer.0 as u64, v.signature.tag]
                })),
        )
    }

    /// Evidence is well formed: every vote is for this value, verifies, comes
    /// from a distinct committee member, and the support matches the kind.
    pub fn verify(&self, committee: &CandidateSet, pki: &Pki) -> bool {
        let support = self.evidence.len();
        let sized = match self.kind {
            BallotKind::Majority => 2 * support > committee.len(),
            BallotKind::Default => support == 1,
        };
        if !sized {
            return false;
        }
        let mut prev: Option<NodeId> = None;
        for vote in &self.evidence {
            let signer = vote.signature.signer;
            if prev.is_some_and(|p| p >= signer) {
                return false;
            }
            prev = Some(signer);
            if vote.value != self.value || !committee.contains(signer) {
                return false;
            }
            let (buf, len) = SignedMessage::Vote { value: vote.value }.encode();
            if !pki.verify_node(signer, &buf[..len], &vote.signature) {
                return false;
            }
        }
        true
    }
}
