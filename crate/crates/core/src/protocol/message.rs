use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::committee::word_bits;
use crate::crypto::{Signature, Signer};

use super::chain::SignatureChain;

/// Local port number. Port 0 is the node itself; ports `1..n` lead to peers
/// in an order the node cannot see.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Port(pub u32);

impl Port {
    pub const SELF: Port = Port(0);
}

/// The exact byte strings that get signed. Each variant is domain separated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignedMessage {
    /// Step-0 endorsement of an input value.
    Vote { value: u64 },
    /// One chain link: binds the ballot digest and the previous link's tag.
    Link { ballot: u64, prev: u64 },
    /// Explicit-mode announcement of the decided value.
    Final { value: u64 },
}

impl SignedMessage {
    pub fn encode(&self) -> ([u8; 17], usize) {
        let mut buf = [0u8; 17];
        match *self {
            SignedMessage::Vote { value } => {
                buf[0] = 1;
                buf[1..9].copy_from_slice(&value.to_le_bytes());
                (buf, 9)
            }
            SignedMessage::Link { ballot, prev } => {
                buf[0] = 2;
                buf[1..9].copy_from_slice(&ballot.to_le_bytes());
                buf[9..17].copy_from_slice(&prev.to_le_bytes());
                (buf, 17)
            }
            SignedMessage::Final { value } => {
                buf[0] = 3;
                buf[1..9].copy_from_slice(&value.to_le_bytes());
                (buf, 9)
            }
        }
    }

    pub fn sign_with(&self, signer: &impl Signer) -> Signature {
        let (buf, len) = self.encode();
        signer.sign(&buf[..len])
    }
}

/// A signed Step-0 input value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step0Vote {
    pub value: u64,
    pub signature: Signature,
}

impl Step0Vote {
    pub fn sign(value: u64, signer: &impl Signer) -> Self {
        Step0Vote {
            value,
            signature: SignedMessage::Vote { value }.sign_with(signer),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinalVote {
    pub value: u64,
    pub signature: Signature,
}

impl FinalVote {
    pub fn sign(value: u64, signer: &impl Signer) -> Self {
        FinalVote {
            value,
            signature: SignedMessage::Final { value }.sign_with(signer),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    Vote(Step0Vote),
    Chain(SignatureChain),
    Final(FinalVote),
    /// Adversarial filler of the given size. Honest nodes drop it.
    Noise { bits: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Vote,
    Chain,
    Final,
    Noise,
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Vote(_) => PayloadKind::Vote,
            Payload::Chain(_) => PayloadKind::Chain,
            Payload::Final(_) => PayloadKind::Final,
            Payload::Noise { .. } => PayloadKind::Noise,
        }
    }

    pub fn bit_size(&self, sizes: &BitSizes) -> u64 {
        match self {
            Payload::Vote(v) => sizes.header() + sizes.value(v.value) + sizes.signature(),
            Payload::Final(v) => sizes.header() + sizes.value(v.value) + sizes.signature(),
            Payload::Chain(c) => sizes.chain(c.ballot.value, c.ballot.evidence.len() + c.links.len()),
            Payload::Noise { bits } => (*bits).max(1),
        }
    }

    /// Every signature in the payload, paired with the message it claims to
    /// sign.
    pub fn signed_parts(&self) -> Vec<(SignedMessage, Signature)> {
        match self {
            Payload::Vote(v) => vec![(SignedMessage::Vote { value: v.value }, v.signature)],
            Payload::Final(v) => vec![(SignedMessage::Final { value: v.value }, v.signature)],
            Payload::Chain(c) => {
                let mut out: Vec<_> = c
                    .ballot
                    .evidence
                    .iter()
                    .map(|e| (SignedMessage::Vote { value: e.value }, e.signature))
                    .collect();
                out.extend(
                    c.links
                        .iter()
                        .enumerate()
                        .map(|(i, s)| (c.link_message(i), *s)),
                );
                out
            }
            Payload::Noise { .. } => Vec::new(),
        }
    }
}

/// CONGEST accounting sizes, all derived from public parameters.
///
/// A word is `ceil(log2 n)` bits. A signature entry is `kappa` bits of
/// signature plus a `ceil(log2 |C|)`-bit committee slot naming the signer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitSizes {
    pub word: u64,
    pub kappa: u64,
    pub slot: u64,
    pub word_factor: u64,
}

impl BitSizes {
    pub fn new(n: usize, committee_size: usize, word_factor: u64) -> Self {
        let word = word_bits(n);
        BitSizes {
            word,
            kappa: word,
            slot: word_bits(committee_size),
            word_factor,
        }
    }

    /// Per-edge, per-round capacity in bits.
    pub fn congest_budget(&self) -> u64 {
        self.word_factor * self.word
    }

    pub fn header(&self) -> u64 {
        self.word
    }

    pub fn value(&self, value: u64) -> u64 {
        let len = 64 - u64::from(value.leading_zeros());
        self.word.max(len)
    }

    pub fn signature(&self) -> u64 {
        self.kappa + self.slot
    }

    pub fn chain(&self, value: u64, signatures: usize) -> u64 {
        self.header() + self.value(value) + signatures as u64 * self.signature()
    }

    pub fn fragments(&self, bits: u64) -> u64 {
        bits.div_ceil(self.congest_budget()).max(1)
    }

    /// Fragments of the largest chain an honest node can ever emit:
    /// `k` evidence votes plus `k` links over a word-sized value.
    pub fn max_chain_fragments(&self, committee_size: usize) -> u64 {
        self.fragments(self.chain(0, 2 * committee_size))
    }
}

/// Priority order among ballots.
///
/// Majority ballots beat default ballots. Among majority ballots the larger
/// support wins, then the larger value. Among default ballots the smaller
/// value wins, so the maximum default ballot carries the minimum value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Priority {
    Default { value: u64 },
    Majority { support: usize, value: u64 },
}

impl Priority {
    pub fn value(&self) -> u64 {
        match *self {
            Priority::Default { value } | Priority::Majority { value, .. } => value,
        }
    }
}

impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        use Priority::*;
        match (self, other) {
            (Default { .. }, Majority { .. }) => Ordering::Less,
            (Majority { .. }, Default { .. }) => Ordering::Greater,
            (Default { value: a }, Default { value: b }) => b.cmp(a),
            (
                Majority {
                    support: sa,
                    value: va,
                },
                Majority {
                    support: sb,
                    value: vb,
                },
            ) => sa.cmp(sb).then(va.cmp(vb)),
        }
    }
}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
