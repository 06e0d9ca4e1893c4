//! Statistical committee checks. These run only the setup phase of a trial,
//! so they exchange no messages at all.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{choose_corrupt_set, max_faults};
use crate::committee::{
    elect_leader, honest_majority, pairwise_honest_referee_coverage, requested_committee_size, select_candidates,
    CommitteeProfile, RefereeAssignment,
};
use crate::error::SimFault;
use crate::seed;
use crate::sim::{SetupLedger, SetupStage};

/// Committee-level facts of one setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitteeSample {
    pub committee_size: usize,
    pub corrupt_members: usize,
    pub honest_majority: bool,
    /// `None` when coverage was not requested.
    pub referee_coverage: Option<bool>,
    pub leader_honest: bool,
    /// Messages exchanged during setup and leader election.
    pub messages: u64,
}

/// Runs the setup of a trial: commit the corrupt set, publish keys, draw
/// the coin, select the committee and, if asked, sample referees.
pub fn committee_sample(
    n: usize,
    epsilon: f64,
    faults: usize,
    profile: CommitteeProfile,
    trial_seed: u64,
    adversary_seed: u64,
    with_coverage: bool,
) -> Result<CommitteeSample, SimFault> {
    let mut ledger = SetupLedger::new();
    let corrupt = ledger.commit(choose_corrupt_set(n, faults, epsilon, adversary_seed)?)?;
    let (pki, _) = ledger.publish_keys(trial_seed, n)?;
    let coin = ledger.draw_coin(trial_seed)?;
    ledger.enter(SetupStage::Selection)?;
    let requested = requested_committee_size(n, profile.constant(epsilon));
    let committee = select_candidates(coin, pki.public_keys(), requested, 64);
    let is_corrupt = |v| corrupt.contains(v);
    let referee_coverage = if with_coverage {
        ledger.enter(SetupStage::Referees)?;
        let assignment = RefereeAssignment::sample(trial_seed, n, &committee);
        Some(pairwise_honest_referee_coverage(&assignment, &committee, n, is_corrupt))
    } else {
        None
    };
    let leader = elect_leader(coin, pki.public_keys());
    Ok(CommitteeSample {
        committee_size: committee.len(),
        corrupt_members: committee.iter().filter(|&c| is_corrupt(c)).count(),
        honest_majority: honest_majority(&committee, is_corrupt),
        referee_coverage,
        leader_honest: !corrupt.contains(leader),
        messages: 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub epsilon: f64,
    pub seed: u64,
    /// Size for the honest-majority checks.
    pub majority_n: usize,
    pub majority_trials: u64,
    pub coverage_n: Vec<usize>,
    pub coverage_trials: u64,
    pub leader_n: usize,
    pub leader_trials: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            epsilon: 0.1,
            seed: 0,
            majority_n: 1024,
            majority_trials: 500,
            coverage_n: vec![256, 1024],
            coverage_trials: 500,
            leader_n: 1024,
            leader_trials: 10_000,
        }
    }
}

/// One row of the verdict table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyLine {
    pub check: String,
    pub n: usize,
    pub trials: u64,
    pub measured: f64,
    pub threshold: String,
    pub messages: u64,
    pub passed: bool,
}

impl fmt::Display for VerifyLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<28} n={:<5} trials={:<6} measured={:.4} need {} messages={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            self.n,
            self.trials,
            self.measured,
            self.threshold,
            self.messages
        )
    }
}

fn samples(
    cfg: &VerifyConfig,
    n: usize,
    trials: u64,
    profile: CommitteeProfile,
    coverage: bool,
) -> Result<Vec<CommitteeSample>, SimFault> {
    let f = max_faults(n, cfg.epsilon);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = cfg.seed.wrapping_add(t);
            let adversary_seed = seed::derive(cfg.seed, "adversary", trial_seed);
            committee_sample(n, cfg.epsilon, f, profile, trial_seed, adversary_seed, coverage)
        })
        .collect()
}

fn rate(xs: &[CommitteeSample], pick: impl Fn(&CommitteeSample) -> bool) -> f64 {
    xs.iter().filter(|s| pick(s)).count() as f64 / xs.len().max(1) as f64
}

/// Runs the honest-majority, referee-coverage and leader-honesty suites.
pub fn run_verify(cfg: &VerifyConfig) -> Result<Vec<VerifyLine>, SimFault> {
    let mut lines = Vec::new();
    let n = cfg.majority_n;
    for (profile, min, strict) in [(CommitteeProfile::Paper, 0.99, false), (CommitteeProfile::Desk, 0.95, true)] {
        let xs = samples(cfg, n, cfg.majority_trials, profile, false)?;
        let measured = rate(&xs, |s| s.honest_majority);
        lines.push(VerifyLine {
            check: format!("honest majority ({profile})"),
            n,
            trials: cfg.majority_trials,
            measured,
            threshold: format!("{} {min}", if strict { ">" } else { ">=" }),
            messages: xs.iter().map(|s| s.messages).sum(),
            passed: if strict { measured > min } else { measured >= min },
        });
    }
    for &n in &cfg.coverage_n {
        let xs = samples(cfg, n, cfg.coverage_trials, CommitteeProfile::Desk, true)?;
        let measured = rate(&xs, |s| s.referee_coverage == Some(true));
        lines.push(VerifyLine {
            check: "honest referee coverage".into(),
            n,
            trials: cfg.coverage_trials,
            measured,
            threshold: ">= 0.99".into(),
            messages: xs.iter().map(|s| s.messages).sum(),
            passed: measured >= 0.99,
        });
    }
    let n = cfg.leader_n;
    let xs = samples(cfg, n, cfg.leader_trials, CommitteeProfile::Desk, false)?;
    let measured = rate(&xs, |s| s.leader_honest);
    let expected = 1.0 - max_faults(n, cfg.epsilon) as f64 / n as f64;
    let messages = xs.iter().map(|s| s.messages).sum();
    lines.push(VerifyLine {
        check: "leader honest".into(),
        n,
        trials: cfg.leader_trials,
        measured,
        threshold: format!("{expected:.4} +/- 0.02, 0 messages"),
        messages,
        passed: (measured - expected).abs() <= 0.02 && messages == 0,
    });
    Ok(lines)
}
