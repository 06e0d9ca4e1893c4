use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::adversary::{choose_corrupt_set, Adversary, AdversaryView, CorruptKeys, CorruptSet, Envelope};
use crate::committee::{
    draw_coin, elect_leader, honest_majority, pairwise_honest_referee_coverage, referee_sample_size,
    select_candidates, select_candidates_by_pubkey, CandidateSet, CoinValue, RefereeAssignment,
};
use crate::crypto::{KeyPair, NodeId, Pki, Signature};
use crate::error::SimFault;
use crate::protocol::{
    BitSizes, CandidateState, Decision, FinalTally, Outgoing, Payload, PayloadKind, Port,
    ProtocolContext, RefereeState, SignatureChain, Step0Vote,
};
use crate::seed;

use super::config::{Mode, TrialConfig};
use super::network::PortMap;
use super::report::{check_properties, Outcome, PropertyVerdict, TrialReport};
use super::schedule::{Phase, Schedule};
use super::trace::TraceRecord;

/// Setup steps, in the only order the engine accepts them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetupStage {
    Commitment,
    Pki,
    Coin,
    Selection,
    Referees,
}

impl SetupStage {
    const ORDER: [SetupStage; 5] = [
        SetupStage::Commitment,
        SetupStage::Pki,
        SetupStage::Coin,
        SetupStage::Selection,
        SetupStage::Referees,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SetupStage::Commitment => "adversary commitment",
            SetupStage::Pki => "key publication",
            SetupStage::Coin => "global coin",
            SetupStage::Selection => "candidate selection",
            SetupStage::Referees => "referee sampling",
        }
    }
}

/// Enforces the setup order: the corrupt set is fixed before any key or coin
/// exists, so neither can depend on it.
#[derive(Debug, Default)]
pub struct SetupLedger {
    done: usize,
}

impl SetupLedger {
    pub fn new() -> Self {
        SetupLedger::default()
    }

    pub fn enter(&mut self, stage: SetupStage) -> Result<(), SimFault> {
        match SetupStage::ORDER.get(self.done) {
            Some(&expected) if expected == stage => {
                self.done += 1;
                Ok(())
            }
            Some(expected) => Err(SimFault::PhaseOrder {
                expected: expected.name(),
                attempted: stage.name(),
            }),
            None => Err(SimFault::PhaseOrder {
                expected: "protocol execution",
                attempted: stage.name(),
            }),
        }
    }

    pub fn commit(&mut self, corrupt: CorruptSet) -> Result<CorruptSet, SimFault> {
        self.enter(SetupStage::Commitment)?;
        Ok(corrupt)
    }

    pub fn publish_keys(&mut self, trial_seed: u64, n: usize) -> Result<(Pki, Vec<KeyPair>), SimFault> {
        self.enter(SetupStage::Pki)?;
        Ok(Pki::generate(trial_seed, n, 64))
    }

    pub fn draw_coin(&mut self, trial_seed: u64) -> Result<CoinValue, SimFault> {
        self.enter(SetupStage::Coin)?;
        Ok(draw_coin(trial_seed))
    }
}

/// Everything a trial produced, beyond the serializable report.
#[derive(Debug)]
pub struct TrialRun {
    pub report: TrialReport,
    pub schedule: Schedule,
    /// Final states of the honest candidates.
    pub candidates: Vec<CandidateState>,
    /// Every signature produced by an honest node.
    pub honest_signatures: HashSet<Signature>,
    /// Every distinct chain an honest node sent, recorded only when tracing.
    pub honest_chains: Vec<SignatureChain>,
}

struct Pending {
    readable: u64,
    port: Port,
    payload: Rc<Payload>,
}

#[derive(Default)]
struct Counters {
    messages: u64,
    bits: u64,
    payloads: u64,
    step0: u64,
    finals: u64,
    adversary: u64,
}

struct Network<'a> {
    ports: PortMap,
    sizes: BitSizes,
    corrupt: &'a CorruptSet,
    busy: HashMap<(usize, usize), u64>,
    inbox: Vec<Vec<Pending>>,
    counters: Counters,
    trace: Option<Vec<TraceRecord>>,
}

impl Network<'_> {
    fn send(&mut self, from: NodeId, to: NodeId, payload: Rc<Payload>, round: u64, deadline: Option<u64>) -> Result<(), SimFault> {
        let bits = payload.bit_size(&self.sizes);
        let frags = self.sizes.fragments(bits);
        let busy = self.busy.entry((from.0, to.0)).or_insert(0);
        let start = round.max(*busy);
        let readable = start + frags;
        *busy = readable;
        if let Some(deadline) = deadline {
            if readable > deadline {
                return Err(SimFault::CapacityOverflow {
                    from,
                    to,
                    sent: round,
                    readable,
                    deadline,
                });
            }
            self.counters.messages += frags;
            self.counters.bits += bits;
            self.counters.payloads += 1;
            if round == 0 {
                self.counters.step0 += frags;
            }
            if payload.kind() == PayloadKind::Final {
                self.counters.finals += frags;
            }
        } else {
            self.counters.adversary += frags;
        }
        if let Some(trace) = &mut self.trace {
            let budget = self.sizes.congest_budget();
            let mut left = bits;
            for j in 0..frags {
                let chunk = left.min(budget);
                left -= chunk;
                trace.push(TraceRecord {
                    round: start + j,
                    sender: from.0,
                    receiver: to.0,
                    kind: payload.kind(),
                    bits: chunk,
                    honest: deadline.is_some(),
                });
            }
        }
        if !self.corrupt.contains(to) {
            let port = self.ports.port_of(to, from);
            self.inbox[to.0].push(Pending {
                readable,
                port,
                payload,
            });
        }
        Ok(())
    }

    fn take(&mut self, node: NodeId, round: u64, rng: &mut ChaCha8Rng) -> Vec<(Port, Rc<Payload>)> {
        let queue = &mut self.inbox[node.0];
        if queue.is_empty() {
            return Vec::new();
        }
        let mut ready = Vec::new();
        let mut i = 0;
        while i < queue.len() {
            if queue[i].readable <= round {
                let p = queue.swap_remove(i);
                ready.push((p.port, p.payload));
            } else {
                i += 1;
            }
        }
        // Arrival order carries no information.
        ready.sort_by_key(|(port, _)| *port);
        ready.shuffle(rng);
        ready
    }
}

fn votes(items: &[(Port, Rc<Payload>)]) -> impl Iterator<Item = (Port, Step0Vote)> + '_ {
    items.iter().filter_map(|(port, p)| match p.as_ref() {
        Payload::Vote(v) => Some((*port, *v)),
        _ => None,
    })
}

fn chains(items: &[(Port, Rc<Payload>)]) -> impl Iterator<Item = SignatureChain> + '_ {
    items.iter().filter_map(|(_, p)| match p.as_ref() {
        Payload::Chain(c) => Some(c.clone()),
        _ => None,
    })
}

/// Runs one trial with the configured strategy.
pub fn run_trial(config: &TrialConfig) -> Result<TrialReport, SimFault> {
    let mut adversary = config.strategy.build(config.adversary_seed);
    Ok(run_trial_with(config, adversary.as_mut())?.report)
}

/// Runs one trial against a caller-supplied adversary, with the corrupt set
/// drawn from the adversary seed.
pub fn run_trial_with(config: &TrialConfig, adversary: &mut dyn Adversary) -> Result<TrialRun, SimFault> {
    config.validate()?;
    let corrupt = choose_corrupt_set(config.n, config.faults(), config.epsilon, config.adversary_seed)?;
    run_trial_with_corrupt(config, corrupt, adversary)
}

/// Runs one trial with an explicit corrupt set.
pub fn run_trial_with_corrupt(
    config: &TrialConfig,
    corrupt: CorruptSet,
    adversary: &mut dyn Adversary,
) -> Result<TrialRun, SimFault> {
    config.validate()?;
    let n = config.n;
    let inputs = config.inputs.materialize(n, config.trial_seed)?;
    let max_value = config.inputs.max_value();

    let mut ledger = SetupLedger::new();
    let corrupt = ledger.commit(corrupt)?;
    let (pki, pairs) = ledger.publish_keys(config.trial_seed, n)?;
    let coin = ledger.draw_coin(config.trial_seed)?;
    ledger.enter(SetupStage::Selection)?;
    let size = config.committee_size();
    let requested = crate::committee::requested_committee_size(n, config.constant());
    let committee: CandidateSet = match config.mode {
        Mode::PubkeySelect => select_candidates_by_pubkey(pki.public_keys(), requested),
        _ => select_candidates(coin, pki.public_keys(), requested, config.digest_bits),
    };
    debug_assert_eq!(committee.len(), size);
    ledger.enter(SetupStage::Referees)?;
    let assignment = RefereeAssignment::sample(config.trial_seed, n, &committee);

    let k = committee.len();
    let kt1 = config.mode == Mode::Kt1;
    let explicit = config.mode == Mode::Explicit;
    let sizes = BitSizes::new(n, k, config.word_factor);
    let schedule = Schedule::new(&sizes, k, max_value, kt1, explicit);
    let ctx = ProtocolContext {
        pki: &pki,
        committee: &committee,
        iterations: k,
        max_value,
    };
    let ports = PortMap::new(config.trial_seed, n);

    let mut candidates: Vec<Option<CandidateState>> = (0..n).map(|_| None).collect();
    let mut corrupt_pairs = Vec::new();
    for pair in pairs {
        let node = pair.owner();
        if corrupt.contains(node) {
            corrupt_pairs.push(pair);
        } else if committee.contains(node) {
            let relay: Vec<Port> = if kt1 {
                committee
                    .iter()
                    .filter(|&c| c != node)
                    .map(|c| ports.port_of(node, c))
                    .collect()
            } else {
                assignment.referees(node).iter().map(|&r| ports.port_of(node, r)).collect()
            };
            candidates[node.0] = Some(CandidateState::new(pair, inputs[node.0], relay));
        }
    }
    let keys = CorruptKeys::new(corrupt_pairs);
    let mut referees: Vec<RefereeState> = (0..n).map(|_| RefereeState::new()).collect();
    let mut tallies: Vec<FinalTally> = if explicit { vec![FinalTally::new(); n] } else { Vec::new() };

    let mut net = Network {
        ports,
        sizes,
        corrupt: &corrupt,
        busy: HashMap::new(),
        inbox: (0..n).map(|_| Vec::new()).collect(),
        counters: Counters::default(),
        trace: config.trace.then(Vec::new),
    };
    let mut inbox_rng = seed::rng(config.trial_seed, "inbox-order", 0);
    let activations: BTreeMap<u64, Phase> = schedule.activations().into_iter().collect();
    let mut observed: HashSet<Signature> = HashSet::new();
    let mut honest_signatures: HashSet<Signature> = HashSet::new();
    let mut honest_chains = Vec::new();
    let honest_nodes: Vec<NodeId> = (0..n).map(NodeId).filter(|v| !corrupt.contains(*v)).collect();

    for round in 0..schedule.rounds() {
        let phase = activations.get(&round).copied();
        let mut emitted: Vec<(NodeId, Vec<Outgoing>)> = Vec::new();
        if let Some(phase) = phase {
            for &node in &honest_nodes {
                let items = net.take(node, round, &mut inbox_rng);
                let cand = candidates[node.0].as_mut();
                let out = match (phase, cand) {
                    (Phase::Step0, Some(c)) => c.step0(),
                    (Phase::Relay, _) => {
                        let referee = &mut referees[node.0];
                        referee.register_votes(&ctx, votes(&items));
                        referee.relay_votes()
                    }
                    (Phase::Proposal, Some(c)) => {
                        c.receive_votes(&ctx, votes(&items).map(|(_, v)| v));
                        c.propose(&ctx)
                    }
                    (Phase::Referee(i), _) => referees[node.0].iterate(&ctx, chains(&items), i),
                    (Phase::Candidate(i), Some(c)) => {
                        let mut out = c.iterate(&ctx, chains(&items), i);
                        if i == k {
                            c.decide();
                            if explicit {
                                out.extend(c.announce(n));
                            }
                        }
                        out
                    }
                    (Phase::Tally, _) => {
                        for (_, p) in &items {
                            if let Payload::Final(v) = p.as_ref() {
                                tallies[node.0].receive(&ctx, v);
                            }
                        }
                        Vec::new()
                    }
                    _ => Vec::new(),
                };
                if !out.is_empty() {
                    emitted.push((node, out));
                }
            }
        }
        let deadline = activations
            .range(round + 1..)
            .next()
            .map_or(schedule.end_round(), |(r, _)| *r);
        let mut honest_envelopes = Vec::new();
        let mut seen_payloads: HashSet<*const Payload> = HashSet::new();
        for (from, out) in emitted {
            for Outgoing { port, payload } in out {
                if seen_payloads.insert(Rc::as_ptr(&payload)) {
                    for (_, sig) in payload.signed_parts() {
                        observed.insert(sig);
                        honest_signatures.insert(sig);
                    }
                    if let Payload::Chain(c) = payload.as_ref() {
                        if config.trace {
                            honest_chains.push(c.clone());
                        }
                    }
                }
                let to = net.ports.peer(from, port);
                net.send(from, to, Rc::clone(&payload), round, Some(deadline))?;
                honest_envelopes.push(Envelope { from, to, payload });
            }
        }

        let view = AdversaryView {
            round,
            phase,
            n,
            schedule: &schedule,
            pki: &pki,
            committee: &committee,
            referees: &assignment,
            corrupt: &corrupt,
            inputs: &inputs,
            max_value,
            honest: &honest_envelopes,
            candidates: &candidates,
        };
        let byzantine = adversary.act(&view, &keys)?;
        for env in byzantine {
            if !corrupt.contains(env.from) || env.from.0 >= n || env.to.0 >= n {
                return Err(SimFault::Impersonation(env.from));
            }
            for (msg, sig) in env.payload.signed_parts() {
                if sig.signer.0 < n && !corrupt.contains(sig.signer) && !observed.contains(&sig) {
                    let (buf, len) = msg.encode();
                    if pki.verify_node(sig.signer, &buf[..len], &sig) {
                        return Err(SimFault::Forgery(sig.signer));
                    }
                }
            }
            net.send(env.from, env.to, env.payload, round, None)?;
        }
    }

    let outcomes: Vec<Outcome> = (0..n)
        .map(|i| {
            let node = NodeId(i);
            if corrupt.contains(node) {
                Outcome::Byzantine
            } else if let Some(c) = &candidates[i] {
                Outcome::from_decision(c.decision())
            } else if explicit {
                Outcome::from_decision(tallies[i].decide())
            } else {
                Outcome::from_decision(Decision::Undecided)
            }
        })
        .collect();

    let is_corrupt = |v: NodeId| corrupt.contains(v);
    let leader = elect_leader(coin, pki.public_keys());
    let corrupt_in_committee = committee.iter().filter(|&c| is_corrupt(c)).count();
    let counters = &net.counters;
    let mut report = TrialReport {
        n,
        epsilon: config.epsilon,
        f: corrupt.len(),
        c: config.constant(),
        mode: config.mode,
        adversary: adversary.name().to_string(),
        trial_seed: config.trial_seed,
        adversary_seed: config.adversary_seed,
        word_factor: config.word_factor,
        congest_budget: sizes.congest_budget(),
        committee_size: k,
        committee_clamped_from: committee.clamped_from(),
        referee_sample_size: referee_sample_size(n),
        committee: committee.members().iter().map(|c| c.0).collect(),
        corrupt: corrupt.iter().map(|c| c.0).collect(),
        leader: leader.0,
        leader_honest: !is_corrupt(leader),
        inputs: inputs.clone(),
        outcomes,
        honest_messages: counters.messages,
        honest_bits: counters.bits,
        honest_payloads: counters.payloads,
        step0_messages: counters.step0,
        final_messages: counters.finals,
        adversary_messages: counters.adversary,
        rounds: schedule.rounds(),
        iterations: schedule.iterations,
        committee_corrupt_frac: corrupt_in_committee as f64 / k as f64,
        verdict: PropertyVerdict {
            implicit_states: true,
            consistency: true,
            validity: None,
            termination: true,
            honest_majority: honest_majority(&committee, is_corrupt),
            referee_coverage: pairwise_honest_referee_coverage(&assignment, &committee, n, is_corrupt),
        },
        trace: net.trace.take().unwrap_or_default(),
    };
    report.verdict = check_properties(&report, config, &inputs);

    Ok(TrialRun {
        report,
        schedule,
        candidates: candidates.into_iter().flatten().collect(),
        honest_signatures,
        honest_chains,
    })
}
