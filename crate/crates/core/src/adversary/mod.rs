//! Static, rushing, full-information Byzantine adversary.
//!
//! One [`Adversary`] controls every corrupt node. The engine calls
//! [`Adversary::act`] once per round after the honest nodes have produced
//! their envelopes for that round, so the adversary sees them first.
//! Corrupt nodes may send anything to anyone, but can only sign with corrupt
//! keys ([`CorruptKeys`]); honest signatures can be replayed, never minted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::committee::{CandidateSet, RefereeAssignment};
use crate::crypto::{KeyPair, NodeId, Pki, Signature};
use crate::error::{ConfigError, SimFault};
use crate::protocol::{
    Ballot, CandidateState, FinalVote, Payload, SignatureChain, SignedMessage, Step0Vote,
};
use crate::seed;
use crate::sim::{Phase, Schedule};

mod strategies;

pub use strategies::{DelayChain, Equivocate, RandomNoise, RefereeLie, Silent};

/// A payload between two nodes, addressed by global index. The engine maps
/// it onto ports.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub from: NodeId,
    pub to: NodeId,
    pub payload: Rc<Payload>,
}

/// The nodes under adversarial control.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptSet {
    nodes: BTreeSet<NodeId>,
}

impl CorruptSet {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        CorruptSet {
            nodes: nodes.into_iter().collect(),
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }
}

/// `floor((1/2 - eps) n)`, the largest tolerated number of faults.
pub fn max_faults(n: usize, eps: f64) -> usize {
    ((0.5 - eps) * n as f64 + 1e-9).floor().max(0.0) as usize
}

/// Picks `f` nodes uniformly at random, deterministically in the adversary
/// seed. The strategy plays no part, so different strategies can be compared
/// on the same corrupt set.
pub fn choose_corrupt_set(n: usize, f: usize, eps: f64, adversary_seed: u64) -> Result<CorruptSet, ConfigError> {
    let max = max_faults(n, eps);
    if f > max {
        return Err(ConfigError::TooManyFaults { f, max, n, eps });
    }
    let mut rng = seed::rng(adversary_seed, "corrupt-set", 0);
    Ok(CorruptSet::new(index::sample(&mut rng, n, f).into_iter().map(NodeId)))
}

/// Signing capability for corrupt nodes only.
pub struct CorruptKeys {
    keys: BTreeMap<NodeId, KeyPair>,
}

impl fmt::Debug for CorruptKeys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.keys.keys()).finish()
    }
}

impl CorruptKeys {
    pub fn new(keys: impl IntoIterator<Item = KeyPair>) -> Self {
        CorruptKeys {
            keys: keys.into_iter().map(|k| (k.owner(), k)).collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.keys.keys().copied()
    }

    pub fn holds(&self, node: NodeId) -> bool {
        self.keys.contains_key(&node)
    }

    fn pair(&self, node: NodeId) -> Result<&KeyPair, SimFault> {
        self.keys.get(&node).ok_or(SimFault::Forgery(node))
    }

    /// Signs for a corrupt node. Asking for an honest node's signature is a
    /// forgery attempt.
    pub fn sign(&self, node: NodeId, msg: &SignedMessage) -> Result<Signature, SimFault> {
        Ok(msg.sign_with(self.pair(node)?))
    }

    pub fn vote(&self, node: NodeId, value: u64) -> Result<Step0Vote, SimFault> {
        Ok(Step0Vote::sign(value, self.pair(node)?))
    }

    pub fn final_vote(&self, node: NodeId, value: u64) -> Result<FinalVote, SimFault> {
        Ok(FinalVote::sign(value, self.pair(node)?))
    }

    pub fn start_chain(&self, ballot: Ballot, node: NodeId) -> Result<SignatureChain, SimFault> {
        Ok(SignatureChain::start(ballot, self.pair(node)?))
    }

    pub fn extend(&self, chain: &mut SignatureChain, node: NodeId) -> Result<(), SimFault> {
        chain.extend(self.pair(node)?);
        Ok(())
    }
}

/// Everything the adversary sees in one round.
pub struct AdversaryView<'a> {
    pub round: u64,
    /// The honest activation in this round, if any.
    pub phase: Option<Phase>,
    pub n: usize,
    pub schedule: &'a Schedule,
    pub pki: &'a Pki,
    pub committee: &'a CandidateSet,
    pub referees: &'a RefereeAssignment,
    pub corrupt: &'a CorruptSet,
    /// Ground-truth inputs of all nodes.
    pub inputs: &'a [u64],
    /// Largest value in the public input domain.
    pub max_value: u64,
    /// Honest envelopes emitted this round.
    pub honest: &'a [Envelope],
    pub(crate) candidates: &'a [Option<CandidateState>],
}

impl AdversaryView<'_> {
    /// State of an honest candidate.
    pub fn candidate(&self, node: NodeId) -> Option<&CandidateState> {
        self.candidates.get(node.0).and_then(Option::as_ref)
    }

    pub fn honest_candidates(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.committee.iter().filter(|c| !self.corrupt.contains(*c))
    }

    pub fn corrupt_candidates(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.committee.iter().filter(|c| self.corrupt.contains(*c))
    }
}

/// Extension point for custom strategies.
pub trait Adversary {
    fn name(&self) -> &str;

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault>;
}

/// The shipped strategy catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Silent,
    RandomNoise,
    Equivocate,
    DelayChain,
    RefereeLie,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Silent,
        StrategyKind::RandomNoise,
        StrategyKind::Equivocate,
        StrategyKind::DelayChain,
        StrategyKind::RefereeLie,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Silent => "silent",
            StrategyKind::RandomNoise => "random-noise",
            StrategyKind::Equivocate => "equivocate",
            StrategyKind::DelayChain => "delay-chain",
            StrategyKind::RefereeLie => "referee-lie",
        }
    }

    pub fn build(&self, adversary_seed: u64) -> Box<dyn Adversary> {
        match self {
            StrategyKind::Silent => Box::new(Silent),
            StrategyKind::RandomNoise => Box::new(RandomNoise::new(adversary_seed)),
            StrategyKind::Equivocate => Box::new(Equivocate::default()),
            StrategyKind::DelayChain => Box::new(DelayChain::default()),
            StrategyKind::RefereeLie => Box::new(RefereeLie::default()),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| ConfigError::Parse(format!("unknown adversary strategy `{s}`")))
    }
}
