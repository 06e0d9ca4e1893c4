use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::crypto::NodeId;
use crate::error::SimFault;
use crate::protocol::{Ballot, Payload, Priority, SignatureChain, Step0Vote};
use crate::seed;
use crate::sim::Phase;

use super::{Adversary, AdversaryView, CorruptKeys, Envelope};

fn envelope(from: NodeId, to: NodeId, payload: Payload) -> Envelope {
    Envelope {
        from,
        to,
        payload: Rc::new(payload),
    }
}

/// Where a corrupt candidate would send its protocol messages: its referees
/// in KT0, the rest of the committee in KT1.
fn relay_targets(view: &AdversaryView<'_>, candidate: NodeId) -> Vec<NodeId> {
    if view.schedule.kt1 {
        view.committee.iter().filter(|&c| c != candidate).collect()
    } else {
        view.referees.referees(candidate).to_vec()
    }
}

/// Honest Step-0 votes the adversary has seen so far, by value.
#[derive(Debug, Default)]
struct VoteBook {
    by_value: BTreeMap<u64, BTreeMap<NodeId, Step0Vote>>,
}

impl VoteBook {
    fn observe(&mut self, view: &AdversaryView<'_>) {
        for env in view.honest {
            if let Payload::Vote(v) = env.payload.as_ref() {
                if view.committee.contains(v.signature.signer) {
                    self.by_value
                        .entry(v.value)
                        .or_default()
                        .insert(v.signature.signer, *v);
                }
            }
        }
    }

    fn honest_support(&self, value: u64) -> usize {
        self.by_value.get(&value).map_or(0, BTreeMap::len)
    }

    /// A ballot for `value` with exactly `support` votes (majority kind) or
    /// a single corrupt vote (default kind when `support` is `None`).
    fn ballot(
        &self,
        value: u64,
        support: Option<usize>,
        corrupt: &[NodeId],
        keys: &CorruptKeys,
    ) -> Result<Ballot, SimFault> {
        let Some(support) = support else {
            return Ok(Ballot::default_value(keys.vote(corrupt[0], value)?));
        };
        let mut votes: Vec<Step0Vote> = self
            .by_value
            .get(&value)
            .map(|m| m.values().copied().collect())
            .unwrap_or_default();
        votes.truncate(support);
        for &c in corrupt {
            if votes.len() >= support {
                break;
            }
            if votes.iter().all(|v| v.signature.signer != c) {
                votes.push(keys.vote(c, value)?);
            }
        }
        Ok(Ballot::majority(value, votes))
    }

    /// The strongest ballot the adversary can build for `value`.
    fn strongest(
        &self,
        value: u64,
        corrupt: &[NodeId],
        committee_size: usize,
        keys: &CorruptKeys,
    ) -> Result<Ballot, SimFault> {
        let support = self.honest_support(value) + corrupt.len();
        if 2 * support > committee_size {
            self.ballot(value, Some(support), corrupt, keys)
        } else {
            self.ballot(value, None, corrupt, keys)
        }
    }
}

/// Crash faults: corrupt nodes never send anything.
#[derive(Debug, Default, Clone, Copy)]
pub struct Silent;

impl Adversary for Silent {
    fn name(&self) -> &str {
        "silent"
    }

    fn act(&mut self, _: &AdversaryView<'_>, _: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        Ok(Vec::new())
    }
}

/// Sprays well-formed but arbitrary votes and default chains from corrupt
/// candidates, and garbage payloads from every corrupt node, at each honest
/// activation.
#[derive(Debug)]
pub struct RandomNoise {
    rng: ChaCha8Rng,
    fanout: usize,
}

impl RandomNoise {
    pub fn new(adversary_seed: u64) -> Self {
        RandomNoise {
            rng: seed::rng(adversary_seed, "random-noise", 0),
            fanout: 3,
        }
    }
}

impl Adversary for RandomNoise {
    fn name(&self) -> &str {
        "random-noise"
    }

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        if view.phase.is_none() {
            return Ok(Vec::new());
        }
        let members = view.committee.members();
        let budget = 8 * crate::committee::word_bits(view.n);
        let mut out = Vec::new();
        for node in view.corrupt.iter() {
            for _ in 0..self.fanout {
                let to = if self.rng.gen_bool(0.5) {
                    members[self.rng.gen_range(0..members.len())]
                } else {
                    NodeId(self.rng.gen_range(0..view.n))
                };
                let value = self.rng.gen_range(0..=view.max_value);
                let payload = if !view.committee.contains(node) {
                    Payload::Noise {
                        bits: self.rng.gen_range(1..=3 * budget),
                    }
                } else {
                    match self.rng.gen_range(0..3) {
                        0 => Payload::Vote(keys.vote(node, value)?),
                        1 => {
                            let ballot = Ballot::default_value(keys.vote(node, value)?);
                            Payload::Chain(keys.start_chain(ballot, node)?)
                        }
                        _ => Payload::Noise {
                            bits: self.rng.gen_range(1..=3 * budget),
                        },
                    }
                };
                out.push(envelope(node, to, payload));
            }
        }
        Ok(out)
    }
}

/// Corrupt candidates split every message they send: value `0` to one half of
/// their recipients and the largest domain value to the other half, for
/// Step-0 votes, proposals and explicit-mode announcements.
#[derive(Debug, Default)]
pub struct Equivocate {
    book: VoteBook,
}

impl Equivocate {
    fn split<F>(&self, view: &AdversaryView<'_>, mut make: F) -> Result<Vec<Envelope>, SimFault>
    where
        F: FnMut(NodeId, u64) -> Result<Payload, SimFault>,
    {
        let mut out = Vec::new();
        for c in view.corrupt_candidates() {
            let targets = relay_targets(view, c);
            let half = targets.len() / 2;
            let a = Rc::new(make(c, 0)?);
            let b = Rc::new(make(c, view.max_value)?);
            for (i, &to) in targets.iter().enumerate() {
                let payload = if i < half { Rc::clone(&a) } else { Rc::clone(&b) };
                out.push(Envelope { from: c, to, payload });
            }
        }
        Ok(out)
    }
}

impl Adversary for Equivocate {
    fn name(&self) -> &str {
        "equivocate"
    }

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        self.book.observe(view);
        let corrupt: Vec<NodeId> = view.corrupt_candidates().collect();
        match view.phase {
            Some(Phase::Step0) => self.split(view, |c, v| Ok(Payload::Vote(keys.vote(c, v)?))),
            Some(Phase::Proposal) => {
                let k = view.committee.len();
                self.split(view, |c, v| {
                    let mut order = corrupt.clone();
                    order.retain(|&x| x != c);
                    order.insert(0, c);
                    let ballot = self.book.strongest(v, &order, k, keys)?;
                    Ok(Payload::Chain(keys.start_chain(ballot, c)?))
                })
            }
            Some(Phase::Candidate(i)) if view.schedule.explicit && i == view.schedule.iterations => {
                let mut out = Vec::new();
                for &c in &corrupt {
                    let a = Rc::new(Payload::Final(keys.final_vote(c, 0)?));
                    let b = Rc::new(Payload::Final(keys.final_vote(c, view.max_value)?));
                    for to in 0..view.n {
                        let payload = if to % 2 == 0 { Rc::clone(&a) } else { Rc::clone(&b) };
                        out.push(Envelope {
                            from: c,
                            to: NodeId(to),
                            payload,
                        });
                    }
                }
                Ok(out)
            }
            _ => Ok(Vec::new()),
        }
    }
}

/// The Dolev-Strong stretcher. Corrupt candidates stay quiet until the
/// chain iterations, then in iteration `i` release a chain carrying `i`
/// corrupt links and a priority just above the best honest chain, to exactly
/// one honest candidate. The recipient rotates every iteration.
#[derive(Debug, Default)]
pub struct DelayChain {
    book: VoteBook,
    best_honest: Option<Priority>,
    next_target: usize,
}

impl DelayChain {
    /// The smallest priority the adversary can back that beats `floor`.
    fn pick(&self, view: &AdversaryView<'_>, corrupt: usize) -> Option<(u64, Option<usize>)> {
        let k = view.committee.len();
        let mut best: Option<(Priority, u64, Option<usize>)> = None;
        let mut consider = |p: Priority, value: u64, support: Option<usize>| {
            if self.best_honest.is_some_and(|f| p <= f) {
                return;
            }
            if best.as_ref().is_none_or(|(b, _, _)| p < *b) {
                best = Some((p, value, support));
            }
        };
        for value in 0..=view.max_value.min(1 << 12) {
            let max_support = self.book.honest_support(value) + corrupt;
            for support in k / 2 + 1..=max_support {
                consider(Priority::Majority { support, value }, value, Some(support));
            }
            consider(Priority::Default { value }, value, None);
        }
        best.map(|(_, v, s)| (v, s))
    }

    fn release(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys, iteration: usize) -> Result<Vec<Envelope>, SimFault> {
        let corrupt: Vec<NodeId> = view.corrupt_candidates().collect();
        let honest: Vec<NodeId> = view.honest_candidates().collect();
        if corrupt.len() < iteration.max(1) || honest.is_empty() {
            return Ok(Vec::new());
        }
        let Some((value, support)) = self.pick(view, corrupt.len()) else {
            return Ok(Vec::new());
        };
        let ballot = self.book.ballot(value, support, &corrupt, keys)?;
        let mut chain = keys.start_chain(ballot, corrupt[0])?;
        for &c in &corrupt[1..iteration.max(1)] {
            keys.extend(&mut chain, c)?;
        }
        let to = honest[self.next_target % honest.len()];
        self.next_target += 1;
        Ok(vec![envelope(corrupt[0], to, Payload::Chain(chain))])
    }
}

impl Adversary for DelayChain {
    fn name(&self) -> &str {
        "delay-chain"
    }

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        self.book.observe(view);
        for env in view.honest {
            if let Payload::Chain(c) = env.payload.as_ref() {
                let p = c.priority();
                if self.best_honest.is_none_or(|b| p > b) {
                    self.best_honest = Some(p);
                }
            }
        }
        // Releases land in the candidates' inboxes just before iteration `i`.
        let iteration = match (view.phase, view.schedule.kt1) {
            (Some(Phase::Referee(i)), false) => i,
            (Some(Phase::Proposal), true) => 1,
            (Some(Phase::Candidate(i)), true) if i < view.schedule.iterations => i + 1,
            _ => return Ok(Vec::new()),
        };
        self.release(view, keys, iteration)
    }
}

/// Corrupt referees tamper with everything they relay: changed values,
/// swapped signers, dropped, duplicated or reordered links. Every mutation
/// must fail verification at the receiving candidate.
#[derive(Debug, Default)]
pub struct RefereeLie {
    contacts: BTreeMap<NodeId, BTreeSet<NodeId>>,
    votes: BTreeMap<NodeId, Vec<Step0Vote>>,
    chains: BTreeMap<NodeId, Vec<SignatureChain>>,
    round_robin: usize,
}

impl RefereeLie {
    fn mutate_chain(&mut self, chain: &SignatureChain, committee: &[NodeId]) -> SignatureChain {
        let mut bad = chain.clone();
        self.round_robin += 1;
        match self.round_robin % 4 {
            0 => bad.ballot.value ^= 1,
            1 if bad.links.len() > 1 => {
                let last = bad.links.len() - 1;
                bad.links.swap(0, last);
            }
            2 => {
                let dup = bad.links[0];
                bad.links.push(dup);
            }
            _ => {
                let other = committee
                    .iter()
                    .copied()
                    .find(|&c| !chain.has_signer(c))
                    .unwrap_or(committee[0]);
                if let Some(l) = bad.links.last_mut() {
                    l.signer = other;
                }
            }
        }
        bad
    }
}

impl Adversary for RefereeLie {
    fn name(&self) -> &str {
        "referee-lie"
    }

    fn act(&mut self, view: &AdversaryView<'_>, _: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        for env in view.honest {
            if !view.corrupt.contains(env.to) || env.to == env.from {
                continue;
            }
            match env.payload.as_ref() {
                Payload::Vote(v) if view.committee.contains(env.from) => {
                    self.contacts.entry(env.to).or_default().insert(env.from);
                    self.votes.entry(env.to).or_default().push(*v);
                }
                Payload::Chain(c) if view.committee.contains(env.from) => {
                    self.chains.entry(env.to).or_default().push(c.clone());
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        match view.phase {
            Some(Phase::Relay) => {
                for (referee, votes) in std::mem::take(&mut self.votes) {
                    let contacts = &self.contacts[&referee];
                    for (i, vote) in votes.iter().enumerate() {
                        let mut bad = *vote;
                        if i % 2 == 0 {
                            bad.value ^= 1;
                        } else {
                            bad.signature.signer = view.committee.members()[i % view.committee.len()];
                            if bad.signature.signer == vote.signature.signer {
                                bad.value ^= 2;
                            }
                        }
                        let payload = Rc::new(Payload::Vote(bad));
                        for &to in contacts {
                            out.push(Envelope {
                                from: referee,
                                to,
                                payload: Rc::clone(&payload),
                            });
                        }
                    }
                }
            }
            Some(Phase::Referee(_)) => {
                let members = view.committee.members().to_vec();
                for (referee, chains) in std::mem::take(&mut self.chains) {
                    let Some(contacts) = self.contacts.get(&referee).cloned() else {
                        continue;
                    };
                    let Some(best) = chains.iter().max_by_key(|c| c.priority()) else {
                        continue;
                    };
                    let bad = self.mutate_chain(best, &members);
                    let payload = Rc::new(Payload::Chain(bad));
                    for to in contacts {
                        out.push(Envelope {
                            from: referee,
                            to,
                            payload: Rc::clone(&payload),
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(out)
    }
}
