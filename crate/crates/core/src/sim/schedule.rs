use serde::{Deserialize, Serialize};

use crate::protocol::BitSizes;

/// What honest nodes do in a given round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "phase", content = "iteration")]
pub enum Phase {
    /// Candidates sign their inputs.
    Step0,
    /// Referees register contacts and relay Step-0 votes (KT0 only).
    Relay,
    /// Candidates read the votes and send their initial ballot.
    Proposal,
    /// Referees forward the best chain of iteration `i` (KT0 only).
    Referee(usize),
    /// Candidates extend the best chain of iteration `i`. The last one also
    /// decides and, in explicit mode, announces.
    Candidate(usize),
    /// Every node tallies final announcements (explicit mode only).
    Tally,
}

/// The fixed round layout of a trial.
///
/// Slot lengths come from public parameters only: a vote slot fits one vote,
/// the relay phase fits `2|C|` votes per edge, and a chain slot fits the
/// largest chain an honest node can emit. Every honest payload is therefore
/// readable before the next activation of its receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub kt1: bool,
    pub explicit: bool,
    pub iterations: usize,
    pub vote_fragments: u64,
    pub chain_fragments: u64,
    pub relay_start: u64,
    pub proposal: u64,
}

impl Schedule {
    pub fn new(sizes: &BitSizes, committee_size: usize, max_value: u64, kt1: bool, explicit: bool) -> Self {
        let vote_bits = sizes.header() + sizes.value(max_value) + sizes.signature();
        let vote_fragments = sizes.fragments(vote_bits);
        let chain_fragments = sizes.fragments(sizes.chain(max_value, 2 * committee_size));
        let relay_start = vote_fragments;
        let proposal = if kt1 {
            relay_start
        } else {
            relay_start + 2 * committee_size as u64 * vote_fragments
        };
        Schedule {
            kt1,
            explicit,
            iterations: committee_size,
            vote_fragments,
            chain_fragments,
            relay_start,
            proposal,
        }
    }

    pub fn referee_round(&self, iteration: usize) -> Option<u64> {
        (!self.kt1).then(|| self.proposal + self.chain_fragments * (2 * iteration as u64 - 1))
    }

    pub fn candidate_round(&self, iteration: usize) -> u64 {
        let per = if self.kt1 { 1 } else { 2 };
        self.proposal + self.chain_fragments * per * iteration as u64
    }

    /// Round in which candidates decide.
    pub fn decide_round(&self) -> u64 {
        self.candidate_round(self.iterations)
    }

    /// Round of the last activation.
    pub fn end_round(&self) -> u64 {
        self.decide_round() + if self.explicit { self.vote_fragments } else { 0 }
    }

    /// Total rounds elapsed, counting round 0.
    pub fn rounds(&self) -> u64 {
        self.end_round() + 1
    }

    /// All activations in round order.
    pub fn activations(&self) -> Vec<(u64, Phase)> {
        let mut out = vec![(0, Phase::Step0)];
        if !self.kt1 {
            out.push((self.relay_start, Phase::Relay));
        }
        out.push((self.proposal, Phase::Proposal));
        for i in 1..=self.iterations {
            if let Some(r) = self.referee_round(i) {
                out.push((r, Phase::Referee(i)));
            }
            out.push((self.candidate_round(i), Phase::Candidate(i)));
        }
        if self.explicit {
            out.push((self.end_round(), Phase::Tally));
        }
        out
    }
}
