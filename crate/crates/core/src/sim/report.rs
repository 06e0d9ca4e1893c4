use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::protocol::Decision;

use super::config::{Mode, TrialConfig};
use super::trace::TraceRecord;

/// Final state of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "state", content = "value")]
pub enum Outcome {
    Byzantine,
    Undecided,
    Decided(u64),
}

impl Outcome {
    pub fn from_decision(d: Decision) -> Self {
        match d {
            Decision::Decided(v) => Outcome::Decided(v),
            Decision::Undecided => Outcome::Undecided,
        }
    }

    pub fn value(&self) -> Option<u64> {
        match *self {
            Outcome::Decided(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_honest(&self) -> bool {
        *self != Outcome::Byzantine
    }
}

/// Definition-level verdicts for one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    /// Every honest node ends decided or undecided, and in implicit modes no
    /// honest non-candidate is decided.
    pub implicit_states: bool,
    /// Honest decisions take at most one value.
    pub consistency: bool,
    /// `None` when honest inputs differ, so validity does not apply.
    pub validity: Option<bool>,
    /// Every honest candidate decided; in explicit mode every honest node
    /// decided.
    pub termination: bool,
    /// Fewer than half of the candidates are corrupt.
    pub honest_majority: bool,
    /// Every pair of honest candidates shares an honest referee.
    pub referee_coverage: bool,
}

impl PropertyVerdict {
    /// The agreement properties proper. The committee statistics are
    /// reported alongside but are probabilistic preconditions, not outcomes.
    pub fn passed(&self) -> bool {
        self.implicit_states && self.consistency && self.validity.unwrap_or(true) && self.termination
    }
}

/// Per-trial record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub n: usize,
    pub epsilon: f64,
    pub f: usize,
    pub c: f64,
    pub mode: Mode,
    pub adversary: String,
    pub trial_seed: u64,
    pub adversary_seed: u64,
    pub word_factor: u64,
    pub congest_budget: u64,
    pub committee_size: usize,
    /// Requested committee size when it had to be clamped to `n`.
    pub committee_clamped_from: Option<usize>,
    pub referee_sample_size: usize,
    pub committee: Vec<usize>,
    pub corrupt: Vec<usize>,
    pub leader: usize,
    pub leader_honest: bool,
    pub inputs: Vec<u64>,
    pub outcomes: Vec<Outcome>,
    /// Fragments sent by honest nodes.
    pub honest_messages: u64,
    pub honest_bits: u64,
    /// Whole payloads sent by honest nodes, before fragmentation.
    pub honest_payloads: u64,
    /// Honest fragments sent in round 0.
    pub step0_messages: u64,
    /// Honest fragments carrying final announcements.
    pub final_messages: u64,
    /// Fragments sent by corrupt nodes.
    pub adversary_messages: u64,
    pub rounds: u64,
    pub iterations: usize,
    pub committee_corrupt_frac: f64,
    pub verdict: PropertyVerdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRecord>,
}

impl TrialReport {
    /// The single value decided by honest nodes, if any.
    pub fn decided_value(&self) -> Option<u64> {
        let values: BTreeSet<u64> = self.outcomes.iter().filter_map(Outcome::value).collect();
        if values.len() == 1 {
            values.first().copied()
        } else {
            None
        }
    }

    pub fn honest_decided(&self) -> usize {
        self.outcomes.iter().filter(|o| o.value().is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Evaluates the agreement properties from the final node states and the
/// ground-truth inputs.
pub fn check_properties(report: &TrialReport, config: &TrialConfig, inputs: &[u64]) -> PropertyVerdict {
    let committee: BTreeSet<usize> = report.committee.iter().copied().collect();
    let honest = |i: &usize| report.outcomes[*i].is_honest();
    let explicit = config.mode == Mode::Explicit;

    let implicit_states = explicit
        || report
            .outcomes
            .iter()
            .enumerate()
            .all(|(i, o)| committee.contains(&i) || o.value().is_none());

    let decided: BTreeSet<u64> = report.outcomes.iter().filter_map(Outcome::value).collect();
    let consistency = decided.len() <= 1;

    let honest_inputs: BTreeSet<u64> = (0..report.n).filter(honest).map(|i| inputs[i]).collect();
    let validity = (honest_inputs.len() == 1).then(|| {
        let v = *honest_inputs.first().expect("one value");
        decided.iter().all(|&d| d == v)
    });

    let honest_candidates = committee.iter().filter(|i| honest(i)).count();
    let termination = if explicit {
        report.outcomes.iter().all(|o| !o.is_honest() || o.value().is_some())
    } else {
        honest_candidates == 0
            || committee
                .iter()
                .filter(|i| honest(i))
                .all(|&i| report.outcomes[i].value().is_some())
    };

    PropertyVerdict {
        implicit_states,
        consistency,
        validity,
        termination,
        honest_majority: report.verdict.honest_majority,
        referee_coverage: report.verdict.referee_coverage,
    }
}
