use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{max_faults, StrategyKind};
use crate::committee::{committee_size, CommitteeProfile};
use crate::error::ConfigError;
use crate::seed;

/// Which variant of the protocol runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Only the committee decides.
    Implicit,
    /// Implicit agreement followed by a signed announcement to every node.
    Explicit,
    /// Candidates know each other's ports and talk directly.
    Kt1,
    /// Coin-free committee: the smallest public keys.
    PubkeySelect,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Implicit, Mode::Explicit, Mode::Kt1, Mode::PubkeySelect];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Implicit => "implicit",
            Mode::Explicit => "explicit",
            Mode::Kt1 => "kt1",
            Mode::PubkeySelect => "pubkey-select",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| ConfigError::Parse(format!("unknown mode `{s}`")))
    }
}

/// How input values are assigned to nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InputSpec {
    Unanimous { value: u64 },
    /// Uniform over `0..domain`, drawn from the trial seed.
    Random { domain: u64 },
    /// One value per node.
    Fixed { values: Vec<u64> },
}

impl Default for InputSpec {
    fn default() -> Self {
        InputSpec::Random { domain: 4 }
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSpec::Unanimous { value } => write!(f, "unanimous:{value}"),
            InputSpec::Random { domain } => write!(f, "random:{domain}"),
            InputSpec::Fixed { values } => {
                let parts: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "fixed:{}", parts.join(","))
            }
        }
    }
}

/// Parses `unanimous:V`, `random:D` or `fixed:V1,V2,...`.
impl FromStr for InputSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Parse(format!("bad input spec `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        match kind.trim() {
            "unanimous" => Ok(InputSpec::Unanimous { value: num(rest)? }),
            "random" => Ok(InputSpec::Random { domain: num(rest)? }),
            "fixed" => Ok(InputSpec::Fixed {
                values: rest.split(',').map(num).collect::<Result<_, _>>()?,
            }),
            _ => Err(bad()),
        }
    }
}

impl InputSpec {
    pub fn materialize(&self, n: usize, trial_seed: u64) -> Result<Vec<u64>, ConfigError> {
        match self {
            InputSpec::Unanimous { value } => Ok(vec![*value; n]),
            InputSpec::Random { domain: 0 } => Err(ConfigError::EmptyDomain),
            InputSpec::Random { domain } => {
                let mut rng = seed::rng(trial_seed, "inputs", 0);
                Ok((0..n).map(|_| rng.gen_range(0..*domain)).collect())
            }
            InputSpec::Fixed { values } if values.len() != n => Err(ConfigError::InputCount {
                expected: n,
                got: values.len(),
            }),
            InputSpec::Fixed { values } => Ok(values.clone()),
        }
    }

    /// Largest value of the public input domain.
    pub fn max_value(&self) -> u64 {
        let top = match self {
            InputSpec::Unanimous { value } => *value,
            InputSpec::Random { domain } => domain.saturating_sub(1),
            InputSpec::Fixed { values } => values.iter().copied().max().unwrap_or(0),
        };
        // Round up to a full bit width so the domain says nothing beyond its size.
        match top {
            0 => 1,
            t => u64::MAX >> t.leading_zeros(),
        }
    }
}

/// Everything that determines one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub n: usize,
    pub epsilon: f64,
    /// Number of corrupt nodes. `None` means the largest tolerated count.
    pub faults: Option<usize>,
    pub profile: CommitteeProfile,
    pub mode: Mode,
    pub strategy: StrategyKind,
    pub trial_seed: u64,
    pub adversary_seed: u64,
    pub inputs: InputSpec,
    /// CONGEST capacity is `word_factor * ceil(log2 n)` bits per edge per round.
    pub word_factor: u64,
    pub digest_bits: u32,
    /// Record every fragment in the report's trace.
    pub trace: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            n: 256,
            epsilon: 0.1,
            faults: None,
            profile: CommitteeProfile::Desk,
            mode: Mode::Implicit,
            strategy: StrategyKind::Silent,
            trial_seed: 0,
            adversary_seed: 0,
            inputs: InputSpec::default(),
            word_factor: 8,
            digest_bits: 64,
            trace: false,
        }
    }
}

impl TrialConfig {
    pub fn new(n: usize) -> Self {
        TrialConfig {
            n,
            ..TrialConfig::default()
        }
    }

    pub fn faults(&self) -> usize {
        self.faults.unwrap_or_else(|| max_faults(self.n, self.epsilon))
    }

    pub fn constant(&self) -> f64 {
        self.profile.constant(self.epsilon)
    }

    pub fn committee_size(&self) -> usize {
        committee_size(self.n, self.constant())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::TooFewNodes(self.n));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        let max = max_faults(self.n, self.epsilon);
        if self.faults() > max {
            return Err(ConfigError::TooManyFaults {
                f: self.faults(),
                max,
                n: self.n,
                eps: self.epsilon,
            });
        }
        let c = self.constant();
        if !(c.is_finite() && c > 0.0) {
            return Err(ConfigError::CommitteeConstant(c));
        }
        if self.word_factor == 0 {
            return Err(ConfigError::WordFactor);
        }
        if !(8..=64).contains(&self.digest_bits) {
            return Err(ConfigError::DigestBits(self.digest_bits));
        }
        if let InputSpec::Random { domain: 0 } = self.inputs {
            return Err(ConfigError::EmptyDomain);
        }
        if let InputSpec::Fixed { values } = &self.inputs {
            if values.len() != self.n {
                return Err(ConfigError::InputCount {
                    expected: self.n,
                    got: values.len(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_many_faults() {
        let cfg = TrialConfig {
            faults: Some(200),
            ..TrialConfig::new(256)
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::TooManyFaults { max: 102, .. })));
        assert_eq!(TrialConfig::new(256).faults(), 102);
    }

    #[test]
    fn domain_width() {
        assert_eq!(InputSpec::Random { domain: 4 }.max_value(), 3);
        assert_eq!(InputSpec::Unanimous { value: 5 }.max_value(), 7);
        assert_eq!(InputSpec::Unanimous { value: 0 }.max_value(), 1);
    }

    #[test]
    fn input_spec_strings() {
        for spec in [
            InputSpec::Unanimous { value: 5 },
            InputSpec::Random { domain: 4 },
            InputSpec::Fixed { values: vec![1, 2, 3] },
        ] {
            assert_eq!(spec.to_string().parse::<InputSpec>().unwrap(), spec);
        }
        assert!("sometimes:3".parse::<InputSpec>().is_err());
    }

    #[test]
    fn mode_names() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
    }
}
