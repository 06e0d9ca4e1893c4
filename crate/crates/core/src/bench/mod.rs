//! Experiment driver behind the `sba-bench` binary: sweeps, CSV output,
//! scaling fits and the statistical committee checks.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{max_faults, StrategyKind};
use crate::committee::CommitteeProfile;
use crate::error::{ConfigError, SimFault};
use crate::seed;
use crate::sim::{run_trial, InputSpec, Mode, TrialConfig, TrialReport};

pub mod csv;
pub mod summary;
pub mod verify;

pub use self::csv::{read_csv, write_csv, CsvRow, CSV_COLUMNS};
pub use summary::{summarize, SizeAggregate, SweepSummary};
pub use verify::{committee_sample, run_verify, CommitteeSample, VerifyConfig, VerifyLine};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SBA_OUTPUT_DIR";

/// A sweep over network sizes, serializable to TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub epsilon: f64,
    /// Corrupt nodes per trial; defaults to `floor((1/2 - eps) n)`.
    pub faults: Option<usize>,
    /// `"paper"`, `"desk"` or an explicit constant `c`.
    pub profile: CommitteeProfile,
    pub mode: Mode,
    pub adversary: StrategyKind,
    pub adversary_seed: u64,
    pub trials: u64,
    /// Trial `t` runs with trial seed `seed + t`.
    pub seed: u64,
    pub inputs: InputSpec,
    pub word_factor: u64,
    pub output: Option<PathBuf>,
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: vec![256],
            epsilon: 0.1,
            faults: None,
            profile: CommitteeProfile::Desk,
            mode: Mode::Implicit,
            adversary: StrategyKind::Silent,
            adversary_seed: 0,
            trials: 1,
            seed: 0,
            inputs: InputSpec::default(),
            word_factor: 8,
            output: None,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Overlays the keys present in a TOML document on top of `self`.
    pub fn overlay_toml(&self, text: &str) -> Result<Self, ConfigError> {
        let parse = |e: toml::de::Error| ConfigError::Parse(e.to_string());
        let mut base: toml::Table = toml::from_str(&self.to_toml()).map_err(parse)?;
        let file: toml::Table = toml::from_str(text).map_err(parse)?;
        base.extend(file);
        toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))
    }

    /// The configuration of trial `t` at size `n`.
    pub fn trial(&self, n: usize, t: u64) -> TrialConfig {
        let trial_seed = self.seed.wrapping_add(t);
        TrialConfig {
            n,
            epsilon: self.epsilon,
            faults: self.faults,
            profile: self.profile,
            mode: self.mode,
            strategy: self.adversary,
            trial_seed,
            adversary_seed: seed::derive(self.adversary_seed, "adversary", trial_seed),
            inputs: self.inputs.clone(),
            word_factor: self.word_factor,
            digest_bits: 64,
            trace: self.trace,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n.is_empty() {
            return Err(ConfigError::NoSizes);
        }
        for &n in &self.n {
            if let Some(f) = self.faults {
                let max = max_faults(n, self.epsilon);
                if f > max {
                    return Err(ConfigError::TooManyFaults {
                        f,
                        max,
                        n,
                        eps: self.epsilon,
                    });
                }
            }
            self.trial(n, 0).validate()?;
        }
        Ok(())
    }

    /// Output directory: the configured path, else `$SBA_OUTPUT_DIR`, else
    /// `sba-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("sba-out"))
    }
}

/// Runs every trial of the sweep in parallel. Reports come back sorted by
/// `(n, seed)` regardless of scheduling.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<TrialReport>, SimFault> {
    config.validate()?;
    let mut sizes = config.n.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let jobs: Vec<TrialConfig> = sizes
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .map(|(n, t)| config.trial(n, t))
        .collect();
    jobs.par_iter().map(run_trial).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig {
            n: vec![64, 256],
            faults: Some(3),
            profile: CommitteeProfile::Constant(2.5),
            mode: Mode::Kt1,
            adversary: StrategyKind::DelayChain,
            inputs: InputSpec::Fixed { values: vec![1, 2] },
            output: Some(PathBuf::from("out/dir")),
            ..ExperimentConfig::default()
        };
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap().to_toml(), text);
    }

    #[test]
    fn file_keys_override_flags() {
        let flags = ExperimentConfig {
            trials: 9,
            seed: 4,
            ..ExperimentConfig::default()
        };
        let merged = flags.overlay_toml("trials = 2\nprofile = \"paper\"\n").unwrap();
        assert_eq!(merged.trials, 2);
        assert_eq!(merged.profile, CommitteeProfile::Paper);
        assert_eq!(merged.seed, 4);
        assert!(flags.overlay_toml("bogus = 1").is_err());
    }

    #[test]
    fn rejects_excess_faults_for_any_size() {
        let cfg = ExperimentConfig {
            n: vec![1024, 64],
            faults: Some(100),
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::TooManyFaults { n: 64, .. })));
    }
}
