use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::rc::Rc;

use crate::crypto::{KeyPair, NodeId, Signature};

use super::ballot::{compute_priority, Ballot};
use super::chain::{validate_chain, SignatureChain};
use super::message::{FinalVote, Payload, Port, Priority, SignedMessage, Step0Vote};
use super::{Decision, Outgoing, ProtocolContext};

/// State machine of one honest candidate.
///
/// `relay_ports` are the ports the candidate talks through: its sampled
/// referees in KT0, the other candidates in KT1.
#[derive(Debug)]
pub struct CandidateState {
    keys: KeyPair,
    input: u64,
    relay_ports: Vec<Port>,
    votes: BTreeMap<u64, BTreeMap<NodeId, Step0Vote>>,
    best: Option<SignatureChain>,
    last_sent: Option<Priority>,
    sent_history: Vec<Priority>,
    decision: Decision,
    issued: Vec<Signature>,
    verified: HashSet<u64>,
}

fn broadcast(ports: &[Port], payload: Payload) -> Vec<Outgoing> {
    let payload = Rc::new(payload);
    ports
        .iter()
        .map(|&port| Outgoing {
            port,
            payload: Rc::clone(&payload),
        })
        .collect()
}

impl CandidateState {
    pub fn new(keys: KeyPair, input: u64, relay_ports: Vec<Port>) -> Self {
        CandidateState {
            keys,
            input,
            relay_ports,
            votes: BTreeMap::new(),
            best: None,
            last_sent: None,
            sent_history: Vec::new(),
            decision: Decision::Undecided,
            issued: Vec::new(),
            verified: HashSet::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.keys.owner()
    }

    pub fn input(&self) -> u64 {
        self.input
    }

    pub fn relay_ports(&self) -> &[Port] {
        &self.relay_ports
    }

    /// Every signature this node produced, in order.
    pub fn issued(&self) -> &[Signature] {
        &self.issued
    }

    /// Priorities of everything sent after Step 0, in order.
    pub fn sent_history(&self) -> &[Priority] {
        &self.sent_history
    }

    pub fn best(&self) -> Option<&SignatureChain> {
        self.best.as_ref()
    }

    pub fn decision(&self) -> Decision {
        self.decision
    }

    /// Step 0: sign the input value and send it to every relay port.
    pub fn step0(&mut self) -> Vec<Outgoing> {
        let vote = Step0Vote::sign(self.input, &self.keys);
        self.issued.push(vote.signature);
        self.record_vote(vote);
        broadcast(&self.relay_ports, Payload::Vote(vote))
    }

    fn record_vote(&mut self, vote: Step0Vote) {
        self.votes
            .entry(vote.value)
            .or_default()
            .insert(vote.signature.signer, vote);
    }

    /// Accepts relayed Step-0 votes. Votes that do not verify under a
    /// committee member's key are dropped.
    pub fn receive_votes(
        &mut self,
        ctx: &ProtocolContext<'_>,
        votes: impl IntoIterator<Item = Step0Vote>,
    ) {
        for vote in votes {
            let signer = vote.signature.signer;
            if !ctx.committee.contains(signer) || !ctx.admits(vote.value) {
                continue;
            }
            let (buf, len) = SignedMessage::Vote { value: vote.value }.encode();
            if ctx.pki.verify_node(signer, &buf[..len], &vote.signature) {
                self.record_vote(vote);
            }
        }
    }

    /// Value -> endorsing candidates, as seen after the Step-0 relay.
    pub fn ballots(&self) -> BTreeMap<u64, BTreeSet<NodeId>> {
        self.votes
            .iter()
            .map(|(v, signers)| (*v, signers.keys().copied().collect()))
            .collect()
    }

    pub fn step0_values(&self) -> Vec<u64> {
        self.votes.keys().copied().collect()
    }

    /// The ballot this candidate proposes after Step 0: the highest-priority
    /// majority value if one exists, otherwise the smallest value it saw.
    pub fn initial_ballot(&self, committee_size: usize) -> Ballot {
        match compute_priority(&self.ballots(), committee_size) {
            Some(p) => Ballot::majority(p.value, self.votes[&p.value].values().copied()),
            None => {
                let (_, signers) = self
                    .votes
                    .iter()
                    .next()
                    .expect("own vote is always recorded before proposing");
                let vote = *signers.values().next().expect("non-empty vote set");
                Ballot::default_value(vote)
            }
        }
    }

    /// Closing step of Step 0: sign the initial ballot and send it out.
    pub fn propose(&mut self, ctx: &ProtocolContext<'_>) -> Vec<Outgoing> {
        if self.votes.is_empty() {
            self.record_vote(Step0Vote::sign(self.input, &self.keys));
        }
        let chain = SignatureChain::start(self.initial_ballot(ctx.committee.len()), &self.keys);
        self.issued.push(chain.links[0]);
        self.send(chain)
    }

    fn send(&mut self, chain: SignatureChain) -> Vec<Outgoing> {
        let priority = chain.priority();
        self.last_sent = Some(priority);
        self.sent_history.push(priority);
        self.best = Some(chain.clone());
        broadcast(&self.relay_ports, Payload::Chain(chain))
    }

    fn accept(&mut self, ctx: &ProtocolContext<'_>, chain: &SignatureChain, iteration: usize) -> bool {
        if chain.links.len() < iteration.max(1) || !ctx.admits(chain.value()) {
            return false;
        }
        let digest = chain.digest();
        if self.verified.contains(&digest) {
            return true;
        }
        let ok = validate_chain(chain, iteration, ctx.committee, ctx.pki);
        if ok {
            self.verified.insert(digest);
        }
        ok
    }

    /// One iteration: adopt the best valid chain if it beats everything seen
    /// so far, sign it and pass it on. Nothing is sent in the final
    /// iteration since no one would process it.
    pub fn iterate(
        &mut self,
        ctx: &ProtocolContext<'_>,
        chains: impl IntoIterator<Item = SignatureChain>,
        iteration: usize,
    ) -> Vec<Outgoing> {
        let mut top: Option<SignatureChain> = None;
        for chain in chains {
            if top.as_ref().is_some_and(|t| t.priority() >= chain.priority()) {
                continue;
            }
            if self.accept(ctx, &chain, iteration) {
                top = Some(chain);
            }
        }
        let Some(mut chain) = top else {
            return Vec::new();
        };
        let current = self.best.as_ref().map(SignatureChain::priority);
        if current.is_some_and(|p| p >= chain.priority()) {
            return Vec::new();
        }
        if chain.has_signer(self.id()) || iteration >= ctx.iterations {
            self.best = Some(chain);
            return Vec::new();
        }
        chain.extend(&self.keys);
        self.issued.push(*chain.links.last().expect("just extended"));
        self.send(chain)
    }

    /// Final state after the iteration budget.
    pub fn decide(&mut self) -> Decision {
        self.decision = match &self.best {
            Some(chain) => Decision::Decided(chain.value()),
            None => Decision::Decided(
                self.votes.keys().next().copied().unwrap_or(self.input),
            ),
        };
        self.decision
    }

    /// Explicit mode: announce the decision on ports `0..n`.
    pub fn announce(&mut self, n: usize) -> Vec<Outgoing> {
        let Decision::Decided(value) = self.decision else {
            return Vec::new();
        };
        let vote = FinalVote::sign(value, &self.keys);
        self.issued.push(vote.signature);
        let ports: Vec<Port> = (0..n as u32).map(Port).collect();
        broadcast(&ports, Payload::Final(vote))
    }

    pub fn last_sent(&self) -> Option<Priority> {
        self.last_sent
    }
}
