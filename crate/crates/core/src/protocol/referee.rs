use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;

use crate::crypto::NodeId;

use super::chain::{validate_chain, SignatureChain};
use super::message::{Payload, Port, Priority, SignedMessage, Step0Vote};
use super::{Outgoing, ProtocolContext};

/// Referee role of a node. Every node is potentially a referee; it only
/// learns which ports lead to candidates from the Step-0 votes it receives.
#[derive(Debug, Default)]
pub struct RefereeState {
    /// `C_w`: ports that delivered a verified candidate vote, first contact
    /// first.
    candidate_ports: Vec<Port>,
    /// At most two distinct values per signer are kept; two already expose an
    /// equivocator, more would only inflate traffic.
    votes: BTreeMap<NodeId, Vec<Step0Vote>>,
    best_forwarded: Option<Priority>,
    forwarded: HashSet<u64>,
    verified: HashSet<u64>,
}

impl RefereeState {
    pub fn new() -> Self {
        RefereeState::default()
    }

    pub fn candidate_ports(&self) -> &[Port] {
        &self.candidate_ports
    }

    pub fn is_active(&self) -> bool {
        !self.candidate_ports.is_empty()
    }

    pub fn best_forwarded(&self) -> Option<Priority> {
        self.best_forwarded
    }

    /// Step-0 votes received on their ports. A port joins `C_w` when it
    /// delivers a vote verifying under a committee member's key.
    pub fn register_votes(
        &mut self,
        ctx: &ProtocolContext<'_>,
        inbox: impl IntoIterator<Item = (Port, Step0Vote)>,
    ) {
        for (port, vote) in inbox {
            let signer = vote.signature.signer;
            if !ctx.committee.contains(signer) || !ctx.admits(vote.value) {
                continue;
            }
            let (buf, len) = SignedMessage::Vote { value: vote.value }.encode();
            if !ctx.pki.verify_node(signer, &buf[..len], &vote.signature) {
                continue;
            }
            if !self.candidate_ports.contains(&port) {
                self.candidate_ports.push(port);
            }
            let kept = self.votes.entry(signer).or_default();
            if kept.len() < 2 && kept.iter().all(|v| v.value != vote.value) {
                kept.push(vote);
            }
        }
    }

    /// Step-0 relay: every kept vote goes to every port in `C_w`, the
    /// senders included.
    pub fn relay_votes(&self) -> Vec<Outgoing> {
        let mut out = Vec::new();
        for vote in self.votes.values().flatten() {
            let payload = Rc::new(Payload::Vote(*vote));
            out.extend(self.candidate_ports.iter().map(|&port| Outgoing {
                port,
                payload: Rc::clone(&payload),
            }));
        }
        out
    }

    pub fn kept_votes(&self) -> impl Iterator<Item = &Step0Vote> {
        self.votes.values().flatten()
    }

    /// One iteration: forward the highest-priority valid chain to all of
    /// `C_w` if it beats everything forwarded before.
    pub fn iterate(
        &mut self,
        ctx: &ProtocolContext<'_>,
        chains: impl IntoIterator<Item = SignatureChain>,
        iteration: usize,
    ) -> Vec<Outgoing> {
        let mut top: Option<SignatureChain> = None;
        for chain in chains {
            if top.as_ref().is_some_and(|t| t.priority() >= chain.priority())
                || self.best_forwarded.is_some_and(|b| b >= chain.priority())
                || chain.links.len() < iteration.max(1)
                || !ctx.admits(chain.value())
            {
                continue;
            }
            let digest = chain.digest();
            if self.forwarded.contains(&digest) {
                continue;
            }
            let ok = self.verified.contains(&digest)
                || validate_chain(&chain, iteration, ctx.committee, ctx.pki);
            if ok {
                self.verified.insert(digest);
                top = Some(chain);
            }
        }
        let Some(chain) = top else {
            return Vec::new();
        };
        self.best_forwarded = Some(chain.priority());
        self.forwarded.insert(chain.digest());
        let payload = Rc::new(Payload::Chain(chain));
        self.candidate_ports
            .iter()
            .map(|&port| Outgoing {
                port,
                payload: Rc::clone(&payload),
            })
            .collect()
    }
}
