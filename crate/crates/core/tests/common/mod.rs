//! Exhaustive small-committee oracle.
//!
//! With `n = |C| <= 4` every node is a candidate and every node referees for
//! every candidate. The reference evaluator below models the protocol on
//! abstract chains (ballot plus signer list) with plain set semantics and
//! explores every tie-break a shuffled inbox could produce. The scripted
//! adversary drives the real engine with the same schedule.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::rc::Rc;

use sublinear_ba::adversary::{Adversary, AdversaryView, CorruptKeys, CorruptSet, Envelope};
use sublinear_ba::error::SimFault;
use sublinear_ba::protocol::{Ballot, Payload, SignatureChain, Step0Vote};
use sublinear_ba::sim::{run_trial_with_corrupt, InputSpec, TrialConfig};
use sublinear_ba::{CommitteeProfile, NodeId};

/// What the corrupt node does with its Step-0 vote.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step0Plan {
    Silent,
    /// The same value to every honest referee.
    Uniform(u64),
    /// First value to the lower half of the honest referees, second to the rest.
    Split(u64, u64),
    /// A vote handed straight to one honest candidate (by position among the
    /// honest nodes) during the relay phase, bypassing the referees.
    Direct(u64, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Delivered to these honest candidates for candidate iteration `slot`.
    Candidates(Vec<usize>),
    /// Delivered to every honest referee for referee iteration `slot`.
    Referees,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Content {
    /// Fresh one-link chain on a default ballot backed by the corrupt vote.
    Default(u64),
    /// Fresh one-link chain on a majority ballot assembled from the honest
    /// Step-0 votes for the value plus a corrupt vote.
    Majority(u64),
    /// The best honest chain seen so far, extended by the corrupt node.
    ExtendObserved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPlan {
    pub slot: usize,
    pub target: Target,
    pub content: Content,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub step0: Step0Plan,
    pub chain: Option<ChainPlan>,
}

impl Script {
    pub fn silent() -> Self {
        Script {
            step0: Step0Plan::Silent,
            chain: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub n: usize,
    pub corrupt: Option<usize>,
    /// One per node; the corrupt node's entry is fixed to 3 so the value
    /// domain is always `0..=3`.
    pub inputs: Vec<u64>,
    pub script: Script,
    pub trial_seed: u64,
}

impl Case {
    fn honest(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| Some(i) != self.corrupt).collect()
    }
}

fn chain_key(c: &SignatureChain) -> (Reverse<usize>, Reverse<Vec<usize>>, Reverse<Vec<usize>>) {
    (
        Reverse(c.links.len()),
        Reverse(c.links.iter().map(|s| s.signer.0).collect()),
        Reverse(c.ballot.evidence.iter().map(|v| v.signature.signer.0).collect()),
    )
}

/// Runs a [`Script`] against the engine.
pub struct Scripted {
    script: Script,
    z: NodeId,
    honest_votes: BTreeMap<NodeId, Step0Vote>,
    observed: Vec<SignatureChain>,
    seen: HashSet<u64>,
}

impl Scripted {
    pub fn new(script: Script, z: NodeId) -> Self {
        Scripted {
            script,
            z,
            honest_votes: BTreeMap::new(),
            observed: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn chain(&self, content: Content, keys: &CorruptKeys) -> Result<Option<SignatureChain>, SimFault> {
        let z = self.z;
        Ok(match content {
            Content::Default(x) => Some(keys.start_chain(Ballot::default_value(keys.vote(z, x)?), z)?),
            Content::Majority(x) => {
                let mut ev: Vec<Step0Vote> = self.honest_votes.values().filter(|v| v.value == x).copied().collect();
                ev.push(keys.vote(z, x)?);
                Some(keys.start_chain(Ballot::majority(x, ev), z)?)
            }
            Content::ExtendObserved => {
                let pick = self
                    .observed
                    .iter()
                    .filter(|c| !c.has_signer(z))
                    .max_by_key(|c| (c.priority(), chain_key(c)))
                    .cloned();
                match pick {
                    Some(mut c) => {
                        keys.extend(&mut c, z)?;
                        Some(c)
                    }
                    None => None,
                }
            }
        })
    }
}

impl Adversary for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        for env in view.honest {
            match env.payload.as_ref() {
                Payload::Vote(v) if view.round == 0 => {
                    self.honest_votes.insert(v.signature.signer, *v);
                }
                Payload::Chain(c) => {
                    if self.seen.insert(c.digest()) {
                        self.observed.push(c.clone());
                    }
                }
                _ => {}
            }
        }
        let z = self.z;
        let honest: Vec<NodeId> = (0..view.n).map(NodeId).filter(|v| !view.corrupt.contains(*v)).collect();
        let s = view.schedule;
        let mut out = Vec::new();
        let mut send = |to: NodeId, payload: Payload| {
            out.push(Envelope {
                from: z,
                to,
                payload: Rc::new(payload),
            })
        };
        if view.round == 0 {
            match self.script.step0 {
                Step0Plan::Uniform(x) => {
                    for &h in &honest {
                        send(h, Payload::Vote(keys.vote(z, x)?));
                    }
                }
                Step0Plan::Split(x, y) => {
                    let half = honest.len().div_ceil(2);
                    for (j, &h) in honest.iter().enumerate() {
                        send(h, Payload::Vote(keys.vote(z, if j < half { x } else { y })?));
                    }
                }
                _ => {}
            }
        }
        if view.round == s.relay_start {
            if let Step0Plan::Direct(x, j) = self.script.step0 {
                send(honest[j], Payload::Vote(keys.vote(z, x)?));
            }
        }
        if let Some(plan) = self.script.chain.clone() {
            let (round, to): (u64, Vec<NodeId>) = match &plan.target {
                Target::Candidates(ts) => (
                    s.referee_round(plan.slot).expect("KT0 schedule"),
                    ts.iter().map(|&j| honest[j]).collect(),
                ),
                Target::Referees => (
                    if plan.slot == 1 {
                        s.proposal
                    } else {
                        s.candidate_round(plan.slot - 1)
                    },
                    honest.clone(),
                ),
            };
            if view.round == round {
                if let Some(chain) = self.chain(plan.content, keys)? {
                    let payload = Rc::new(Payload::Chain(chain));
                    for t in to {
                        out.push(Envelope {
                            from: z,
                            to: t,
                            payload: Rc::clone(&payload),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Decisions of the honest nodes, in index order, from the real engine.
pub fn simulate(case: &Case) -> Result<Vec<u64>, SimFault> {
    let config = TrialConfig {
        n: case.n,
        epsilon: 0.1,
        faults: Some(usize::from(case.corrupt.is_some())),
        profile: CommitteeProfile::Constant(100.0),
        trial_seed: case.trial_seed,
        inputs: InputSpec::Fixed {
            values: case.inputs.clone(),
        },
        ..TrialConfig::new(case.n)
    };
    let corrupt = CorruptSet::new(case.corrupt.map(NodeId));
    let z = NodeId(case.corrupt.unwrap_or(usize::MAX));
    let mut adv = Scripted::new(case.script.clone(), z);
    let run = run_trial_with_corrupt(&config, corrupt, &mut adv)?;
    assert_eq!(run.report.committee_size, case.n, "oracle cases need a full committee");
    Ok(case
        .honest()
        .into_iter()
        .map(|i| run.report.outcomes[i].value().expect("honest candidates decide"))
        .collect())
}

// ---- reference evaluator ----

/// Majority ballots rank above default ballots; majority by (support,
/// value), default by smallest value.
type Rank = (u8, usize, i64);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Chain {
    majority: bool,
    value: u64,
    evidence: Vec<usize>,
    links: Vec<usize>,
}

impl Chain {
    fn rank(&self) -> Rank {
        if self.majority {
            (1, self.evidence.len(), self.value as i64)
        } else {
            (0, 0, -(self.value as i64))
        }
    }

    fn pick_key(&self) -> (Rank, Reverse<usize>, Reverse<Vec<usize>>, Reverse<Vec<usize>>) {
        (
            self.rank(),
            Reverse(self.links.len()),
            Reverse(self.links.clone()),
            Reverse(self.evidence.clone()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct World {
    best: Vec<Chain>,
    forwarded: Vec<Option<Rank>>,
    /// Honest chains sent in the last candidate activation.
    outbox: Vec<Chain>,
    /// Every chain an honest candidate ever sent.
    emitted: BTreeSet<Chain>,
    /// Chains waiting at each honest candidate.
    inbox: Vec<BTreeSet<Chain>>,
}

fn view_votes(case: &Case, h: usize) -> BTreeMap<u64, BTreeSet<usize>> {
    let honest = case.honest();
    let mut votes: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
    for &j in &honest {
        votes.entry(case.inputs[j]).or_default().insert(j);
    }
    if let Some(z) = case.corrupt {
        let mut zs = Vec::new();
        match case.script.step0 {
            Step0Plan::Silent => {}
            Step0Plan::Uniform(x) => zs.push(x),
            Step0Plan::Split(x, y) => {
                zs.push(x);
                if honest.len() >= 2 {
                    zs.push(y);
                }
            }
            Step0Plan::Direct(x, j) => {
                if honest[j] == h {
                    zs.push(x);
                }
            }
        }
        for x in zs {
            votes.entry(x).or_default().insert(z);
        }
    }
    votes
}

fn initial_chain(case: &Case, h: usize) -> Chain {
    let k = case.n;
    let votes = view_votes(case, h);
    let majority = votes
        .iter()
        .filter(|(_, s)| 2 * s.len() > k)
        .max_by_key(|(v, s)| (s.len(), **v));
    match majority {
        Some((v, s)) => Chain {
            majority: true,
            value: *v,
            evidence: s.iter().copied().collect(),
            links: vec![h],
        },
        None => {
            let (v, s) = votes.iter().next().expect("own vote");
            Chain {
                majority: false,
                value: *v,
                evidence: vec![*s.iter().next().expect("non-empty")],
                links: vec![h],
            }
        }
    }
}

fn injected(case: &Case, content: Content, emitted: &BTreeSet<Chain>) -> Option<Chain> {
    let z = case.corrupt?;
    match content {
        Content::Default(x) => Some(Chain {
            majority: false,
            value: x,
            evidence: vec![z],
            links: vec![z],
        }),
        Content::Majority(x) => {
            let mut ev: Vec<usize> = case.honest().into_iter().filter(|&j| case.inputs[j] == x).collect();
            ev.push(z);
            ev.sort_unstable();
            Some(Chain {
                majority: true,
                value: x,
                evidence: ev,
                links: vec![z],
            })
        }
        Content::ExtendObserved => emitted
            .iter()
            .filter(|c| !c.links.contains(&z))
            .max_by_key(|c| c.pick_key())
            .map(|c| {
                let mut c = c.clone();
                c.links.push(z);
                c
            }),
    }
}

/// Chains of maximal rank, each a possible pick of a shuffled inbox.
fn top_choices<'a>(chains: impl Iterator<Item = &'a Chain>) -> Vec<Chain> {
    let mut top: Vec<&Chain> = Vec::new();
    for c in chains {
        match top.first().map(|t| t.rank().cmp(&c.rank())) {
            None | Some(std::cmp::Ordering::Equal) => top.push(c),
            Some(std::cmp::Ordering::Less) => {
                top.clear();
                top.push(c);
            }
            Some(std::cmp::Ordering::Greater) => {}
        }
    }
    top.sort();
    top.dedup();
    top.into_iter().cloned().collect()
}

fn dedup(worlds: Vec<World>) -> Vec<World> {
    if worlds.len() < 2 {
        return worlds;
    }
    let set: HashSet<World> = worlds.into_iter().collect();
    set.into_iter().collect()
}

/// Every honest decision vector reachable under some inbox order.
pub fn reference(case: &Case) -> BTreeSet<Vec<u64>> {
    let honest = case.honest();
    let k = case.n;
    let plan = case.script.chain.clone();
    let plan_at = |i: usize, to_referees: bool| {
        plan.as_ref()
            .filter(|p| p.slot == i && matches!(p.target, Target::Referees) == to_referees)
    };

    let best: Vec<Chain> = honest.iter().map(|&h| initial_chain(case, h)).collect();
    let start = World {
        outbox: best.clone(),
        emitted: best.iter().cloned().collect(),
        best,
        forwarded: vec![None; honest.len()],
        inbox: vec![BTreeSet::new(); honest.len()],
    };
    let mut worlds: HashSet<World> = HashSet::from([start]);

    for i in 1..=k {
        // Referee iteration i: every honest node relays for every candidate.
        let mut next = HashSet::new();
        for w in worlds {
            let mut pool: BTreeSet<Chain> = w.outbox.iter().cloned().collect();
            if let Some(p) = plan_at(i, true) {
                pool.extend(injected(case, p.content, &w.emitted));
            }
            let mut partial = vec![w];
            for r in 0..honest.len() {
                let mut grown = Vec::new();
                for w in partial {
                    let fresh = pool
                        .iter()
                        .filter(|c| c.links.len() >= i && w.forwarded[r].is_none_or(|b| c.rank() > b));
                    let picks = top_choices(fresh);
                    if picks.is_empty() {
                        grown.push(w);
                        continue;
                    }
                    for c in picks {
                        let mut w2 = w.clone();
                        w2.forwarded[r] = Some(c.rank());
                        // A candidate ignores anything not above its own best.
                        for (inbox, best) in w2.inbox.iter_mut().zip(&w2.best) {
                            if c.rank() > best.rank() {
                                inbox.insert(c.clone());
                            }
                        }
                        grown.push(w2);
                    }
                }
                partial = dedup(grown);
            }
            for mut w in partial {
                if let Some(p) = plan_at(i, false) {
                    if let (Target::Candidates(ts), Some(c)) = (&p.target, injected(case, p.content, &w.emitted)) {
                        for &t in ts {
                            w.inbox[t].insert(c.clone());
                        }
                    }
                }
                w.outbox.clear();
                next.insert(w);
            }
        }
        worlds = next;

        // Candidate iteration i.
        let mut next = HashSet::new();
        for w in worlds {
            let mut partial = vec![w];
            for (j, &h) in honest.iter().enumerate() {
                let mut grown = Vec::new();
                for w in partial {
                    let picks = top_choices(w.inbox[j].iter().filter(|c| c.links.len() >= i));
                    let Some(rank) = picks.first().map(Chain::rank) else {
                        grown.push(w);
                        continue;
                    };
                    if w.best[j].rank() >= rank {
                        grown.push(w);
                        continue;
                    }
                    for mut c in picks {
                        let mut w2 = w.clone();
                        if c.links.contains(&h) || i >= k {
                            w2.best[j] = c;
                        } else {
                            c.links.push(h);
                            w2.best[j] = c.clone();
                            w2.emitted.insert(c.clone());
                            w2.outbox.push(c);
                        }
                        grown.push(w2);
                    }
                }
                partial = dedup(grown);
            }
            for mut w in partial {
                for inbox in &mut w.inbox {
                    inbox.clear();
                }
                w.outbox.sort();
                w.outbox.dedup();
                next.insert(w);
            }
        }
        worlds = next;
    }
    worlds
        .into_iter()
        .map(|w| w.best.iter().map(|c| c.value).collect())
        .collect()
}

// ---- enumeration ----

fn subsets_targets(h: usize) -> Vec<Target> {
    let mut t: Vec<Target> = (0..h).map(|j| Target::Candidates(vec![j])).collect();
    if h > 1 {
        t.push(Target::Candidates((0..h).collect()));
    }
    t.push(Target::Referees);
    t
}

/// The bounded adversary schedules for one honest-input assignment.
pub fn scripts(n: usize, honest_inputs: &[u64]) -> Vec<Script> {
    let h = honest_inputs.len();
    let mut step0 = vec![Step0Plan::Silent];
    step0.extend((0..4).map(Step0Plan::Uniform));
    for x in 0..4 {
        for y in 0..4 {
            if x != y {
                step0.push(Step0Plan::Split(x, y));
            }
        }
    }
    for x in 0..4 {
        step0.extend((0..h).map(|j| Step0Plan::Direct(x, j)));
    }
    let mut contents = vec![Content::Default(0), Content::Default(3), Content::ExtendObserved];
    for x in 0..4u64 {
        let support = honest_inputs.iter().filter(|&&v| v == x).count() + 1;
        if 2 * support > n {
            contents.push(Content::Majority(x));
        }
    }
    let mut chains = vec![None];
    for slot in 1..=n {
        for target in subsets_targets(h) {
            for &content in &contents {
                chains.push(Some(ChainPlan {
                    slot,
                    target: target.clone(),
                    content,
                }));
            }
        }
    }
    let mut out = Vec::with_capacity(step0.len() * chains.len());
    for &s in &step0 {
        for c in &chains {
            out.push(Script {
                step0: s,
                chain: c.clone(),
            });
        }
    }
    out
}

/// Every case for `n` nodes with `f` corrupt.
pub fn cases(n: usize, f: usize) -> Vec<Case> {
    let h = n - f;
    let mut out = Vec::new();
    for code in 0..4u64.pow(h as u32) {
        let honest_inputs: Vec<u64> = (0..h).map(|j| (code >> (2 * j)) & 3).collect();
        let corrupt = (f == 1).then(|| if code % 2 == 0 { 0 } else { n - 1 });
        let mut inputs = Vec::with_capacity(n);
        let mut it = honest_inputs.iter();
        for i in 0..n {
            inputs.push(if Some(i) == corrupt { 3 } else { *it.next().expect("honest input") });
        }
        let list = if f == 0 {
            vec![Script::silent()]
        } else {
            scripts(n, &honest_inputs)
        };
        for script in list {
            let trial_seed = (n as u64) << 48 | (code << 24) | out.len() as u64;
            out.push(Case {
                n,
                corrupt,
                inputs: inputs.clone(),
                script,
                trial_seed,
            });
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct OracleSummary {
    pub cases: usize,
    pub matches: usize,
    /// Cases whose reference outcome depends on delivery order.
    pub order_dependent: usize,
    pub first_mismatch: Option<String>,
}

pub fn run_oracle(configs: &[(usize, usize)]) -> OracleSummary {
    let mut s = OracleSummary::default();
    for &(n, f) in configs {
        for case in cases(n, f) {
            s.cases += 1;
            let want = reference(&case);
            if want.len() > 1 {
                s.order_dependent += 1;
            }
            let got = simulate(&case);
            let ok = matches!(&got, Ok(d) if want.len() == 1 && want.contains(d));
            if ok {
                s.matches += 1;
            } else if s.first_mismatch.is_none() {
                s.first_mismatch = Some(format!("{case:?}: engine {got:?}, reference {want:?}"));
            }
        }
    }
    s
}
