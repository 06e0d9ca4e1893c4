//! Committee formation: global coin, hash-lottery candidates, referee
//! sampling, zero-message leader election and the coin-free variant.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::crypto::{lottery_digests, Digest, NodeId, PublicKey};
use crate::error::ConfigError;
use crate::seed;

/// Constant used by the desk profile. Keeps `|C|` within `[15, 45]` for
/// every `n` in `64..=4096`.
pub const DESK_CONSTANT: f64 = 3.5;

/// Shared random value revealed to every node after corruption is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoinValue(pub u64);

pub fn draw_coin(trial_seed: u64) -> CoinValue {
    CoinValue(seed::derive(trial_seed, "global-coin", 0))
}

/// `log2 n`. All logarithms in the protocol are base 2.
pub fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

/// `ceil(log2 n)`, at least 1. The CONGEST word size.
pub fn word_bits(n: usize) -> u64 {
    let mut bits = 0u64;
    while (1u128 << bits) < n as u128 {
        bits += 1;
    }
    bits.max(1)
}

fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// The Chernoff-derived constant `3 alpha / eps^2` with `alpha = 1/2 - eps`.
pub fn paper_constant(eps: f64) -> f64 {
    3.0 * (0.5 - eps) / (eps * eps)
}

/// How the committee constant `c` is chosen. Serialized as `"paper"`,
/// `"desk"` or the constant itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ProfileRepr", try_from = "ProfileRepr")]
pub enum CommitteeProfile {
    /// `c = 3 alpha / eps^2`.
    Paper,
    /// `c = DESK_CONSTANT`.
    Desk,
    Constant(f64),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ProfileRepr {
    Name(String),
    Constant(f64),
}

impl From<CommitteeProfile> for ProfileRepr {
    fn from(p: CommitteeProfile) -> Self {
        match p {
            CommitteeProfile::Paper => ProfileRepr::Name("paper".into()),
            CommitteeProfile::Desk => ProfileRepr::Name("desk".into()),
            CommitteeProfile::Constant(c) => ProfileRepr::Constant(c),
        }
    }
}

impl TryFrom<ProfileRepr> for CommitteeProfile {
    type Error = ConfigError;

    fn try_from(r: ProfileRepr) -> Result<Self, Self::Error> {
        match r {
            ProfileRepr::Name(s) => s.parse(),
            ProfileRepr::Constant(c) => Ok(CommitteeProfile::Constant(c)),
        }
    }
}

impl FromStr for CommitteeProfile {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(CommitteeProfile::Paper),
            "desk" => Ok(CommitteeProfile::Desk),
            other => other
                .parse::<f64>()
                .map(CommitteeProfile::Constant)
                .map_err(|_| ConfigError::Parse(format!("unknown committee profile `{s}`"))),
        }
    }
}

impl fmt::Display for CommitteeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommitteeProfile::Paper => f.write_str("paper"),
            CommitteeProfile::Desk => f.write_str("desk"),
            CommitteeProfile::Constant(c) => write!(f, "{c}"),
        }
    }
}

impl CommitteeProfile {
    pub fn constant(&self, eps: f64) -> f64 {
        match *self {
            CommitteeProfile::Paper => paper_constant(eps),
            CommitteeProfile::Desk => DESK_CONSTANT,
            CommitteeProfile::Constant(c) => c,
        }
    }
}

/// Requested committee size `ceil(c log2 n)` before clamping to `n`.
pub fn requested_committee_size(n: usize, c: f64) -> usize {
    ceil_tol(c * log2(n)).max(1)
}

/// `min(ceil(c log2 n), n)`.
pub fn committee_size(n: usize, c: f64) -> usize {
    requested_committee_size(n, c).min(n)
}

/// `min(ceil(2 sqrt(n log2 n)), n)`.
pub fn referee_sample_size(n: usize) -> usize {
    ceil_tol(2.0 * (n as f64 * log2(n)).sqrt()).min(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    HashLottery,
    SmallestPubkey,
}

/// The candidate (committee) set. Recomputable by every node from public
/// information, so membership checks need no communication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    /// Members in rank order (smallest digest or key first).
    members: Vec<NodeId>,
    sorted: Vec<NodeId>,
    mode: SelectionMode,
    /// Set when the requested size exceeded `n` and was clamped.
    clamped_from: Option<usize>,
}

impl CandidateSet {
    fn new(members: Vec<NodeId>, mode: SelectionMode, clamped_from: Option<usize>) -> Self {
        let mut sorted = members.clone();
        sorted.sort();
        CandidateSet {
            members,
            sorted,
            mode,
            clamped_from,
        }
    }

    /// Members in rank order.
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.sorted.binary_search(&node).is_ok()
    }

    pub fn mode(&self) -> SelectionMode {
        self.mode
    }

    /// Config warning: the requested size, when it had to be clamped to `n`.
    pub fn clamped_from(&self) -> Option<usize> {
        self.clamped_from
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }
}

fn rank_select<K: Ord + Copy>(
    keys: &[K],
    size: usize,
    mode: SelectionMode,
) -> CandidateSet {
    let n = keys.len();
    let clamped_from = (size > n).then_some(size);
    let size = size.clamp(1, n.max(1)).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| keys[i]);
    CandidateSet::new(
        order.into_iter().take(size).map(NodeId).collect(),
        mode,
        clamped_from,
    )
}

/// Candidates ranked by pre-computed lottery digests, ties broken toward the
/// larger public key.
pub fn select_by_digests(
    digests: &[Digest],
    public_keys: &[PublicKey],
    committee_size: usize,
) -> CandidateSet {
    assert_eq!(digests.len(), public_keys.len());
    let keys: Vec<(Digest, std::cmp::Reverse<PublicKey>)> = digests
        .iter()
        .zip(public_keys)
        .map(|(d, pk)| (*d, std::cmp::Reverse(*pk)))
        .collect();
    rank_select(&keys, committee_size, SelectionMode::HashLottery)
}

/// The `committee_size` nodes whose `H_coin(pk)` digests are smallest.
pub fn select_candidates(
    coin: CoinValue,
    public_keys: &[PublicKey],
    committee_size: usize,
    digest_bits: u32,
) -> CandidateSet {
    let digests = lottery_digests(coin, public_keys, digest_bits);
    select_by_digests(&digests, public_keys, committee_size)
}

/// The `committee_size` nodes holding the smallest public keys.
pub fn select_candidates_by_pubkey(public_keys: &[PublicKey], committee_size: usize) -> CandidateSet {
    rank_select(public_keys, committee_size, SelectionMode::SmallestPubkey)
}

/// Private sampling stream of one candidate.
pub fn referee_rng(trial_seed: u64, candidate: NodeId) -> rand_chacha::ChaCha8Rng {
    seed::rng(trial_seed, "referees", candidate.0 as u64)
}

/// Uniform sample without replacement of `referee_sample_size(n)` nodes.
/// The candidate itself may be drawn.
pub fn sample_referees<R: Rng + ?Sized>(candidate: NodeId, n: usize, rng: &mut R) -> Vec<NodeId> {
    let _ = candidate;
    let m = referee_sample_size(n);
    if m >= n {
        return (0..n).map(NodeId).collect();
    }
    let mut picked: Vec<NodeId> = index::sample(rng, n, m).into_iter().map(NodeId).collect();
    picked.sort();
    picked
}

/// Referee lists per candidate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefereeAssignment {
    lists: BTreeMap<NodeId, Vec<NodeId>>,
}

impl RefereeAssignment {
    pub fn sample(trial_seed: u64, n: usize, committee: &CandidateSet) -> Self {
        let lists = committee
            .iter()
            .map(|c| {
                let mut rng = referee_rng(trial_seed, c);
                (c, sample_referees(c, n, &mut rng))
            })
            .collect();
        RefereeAssignment { lists }
    }

    pub fn referees(&self, candidate: NodeId) -> &[NodeId] {
        self.lists.get(&candidate).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &[NodeId])> {
        self.lists.iter().map(|(c, r)| (*c, r.as_slice()))
    }
}

/// Leader: the node whose key is nearest to the coin; a tie goes to the
/// larger key. Uses no communication.
pub fn elect_leader(coin: CoinValue, public_keys: &[PublicKey]) -> NodeId {
    let r = coin.0;
    let (idx, _) = public_keys
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da = a.0.abs_diff(r);
            let db = b.0.abs_diff(r);
            da.cmp(&db).then(b.0.cmp(&a.0))
        })
        .expect("leader election needs at least one node");
    NodeId(idx)
}

/// Strictly fewer than half of the committee is corrupt.
pub fn honest_majority(committee: &CandidateSet, is_corrupt: impl Fn(NodeId) -> bool) -> bool {
    let bad = committee.iter().filter(|&c| is_corrupt(c)).count();
    2 * bad < committee.len()
}

/// Every pair of honest candidates shares at least one honest referee.
pub fn pairwise_honest_referee_coverage(
    assignment: &RefereeAssignment,
    committee: &CandidateSet,
    n: usize,
    is_corrupt: impl Fn(NodeId) -> bool,
) -> bool {
    let words = n.div_ceil(64);
    let sets: Vec<Vec<u64>> = committee
        .iter()
        .filter(|&c| !is_corrupt(c))
        .map(|c| {
            let mut bits = vec![0u64; words];
            for r in assignment.referees(c) {
                if !is_corrupt(*r) {
                    bits[r.0 / 64] |= 1 << (r.0 % 64);
                }
            }
            bits
        })
        .collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].iter().zip(&sets[j]).any(|(a, b)| a & b != 0) {
                return false;
            }
        }
    }
    true
}
