use serde::{Deserialize, Serialize};

use crate::committee::CandidateSet;
use crate::crypto::{digest_words, NodeId, Pki, Signature, Signer};

use super::ballot::Ballot;
use super::message::{Priority, SignedMessage};

/// A ballot plus an ordered list of link signatures from distinct committee
/// members. Link `j` signs the ballot digest and the tag of link `j - 1`, so
/// links cannot be reordered or spliced between chains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureChain {
    pub ballot: Ballot,
    pub links: Vec<Signature>,
}

impl SignatureChain {
    /// A fresh chain carrying the proposer's own link.
    pub fn start(ballot: Ballot, signer: &impl Signer) -> Self {
        let mut chain = SignatureChain {
            ballot,
            links: Vec::new(),
        };
        chain.extend(signer);
        chain
    }

    pub fn extend(&mut self, signer: &impl Signer) {
        let msg = self.link_message(self.links.len());
        self.links.push(msg.sign_with(signer));
    }

    /// The message link `position` signs.
    pub fn link_message(&self, position: usize) -> SignedMessage {
        link_message(self.ballot.digest(), &self.links, position)
    }

    pub fn priority(&self) -> Priority {
        self.ballot.priority()
    }

    pub fn value(&self) -> u64 {
        self.ballot.value
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn has_signer(&self, node: NodeId) -> bool {
        self.links.iter().any(|s| s.signer == node)
    }

    /// Content digest, used for duplicate suppression.
    pub fn digest(&self) -> u64 {
        digest_words(
            std::iter::once(self.ballot.digest())
                .chain(self.links.iter().flat_map(|s| [s.signer.0 as u64, s.tag])),
        )
    }
}

fn link_message(ballot_digest: u64, links: &[Signature], position: usize) -> SignedMessage {
    SignedMessage::Link {
        ballot: ballot_digest,
        prev: if position == 0 {
            0
        } else {
            links[position - 1].tag
        },
    }
}

/// Links verify and are signed by distinct committee members. Does not look
/// at the ballot evidence.
pub fn verify_links(chain: &SignatureChain, committee: &CandidateSet, pki: &Pki) -> bool {
    let ballot = chain.ballot.digest();
    for (i, sig) in chain.links.iter().enumerate() {
        if !committee.contains(sig.signer) || chain.links[..i].iter().any(|s| s.signer == sig.signer) {
            return false;
        }
        let (buf, len) = link_message(ballot, &chain.links, i).encode();
        if !pki.verify_node(sig.signer, &buf[..len], sig) {
            return false;
        }
    }
    true
}

/// A chain is acceptable in `iteration` iff its evidence is well formed, all
/// links verify, link signers are distinct committee members, and it carries
/// at least `iteration` links (and at least one).
pub fn validate_chain(
    chain: &SignatureChain,
    iteration: usize,
    committee: &CandidateSet,
    pki: &Pki,
) -> bool {
    chain.links.len() >= iteration.max(1)
        && chain.ballot.verify(committee, pki)
        && verify_links(chain, committee, pki)
}
