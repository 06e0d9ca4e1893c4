//! Sublinear-message authenticated Byzantine agreement.
//!
//! A small committee chosen by a keyed-hash lottery over the public keys runs
//! a Dolev-Strong style agreement, relaying through randomly sampled referees
//! because nobody knows which port leads where. Everything runs inside a
//! deterministic synchronous simulator that counts CONGEST messages and bits.
//!
//! ```
//! use sublinear_ba::{run_implicit, InputSpec, TrialConfig};
//!
//! let cfg = TrialConfig {
//!     faults: Some(0),
//!     inputs: InputSpec::Unanimous { value: 7 },
//!     ..TrialConfig::new(64)
//! };
//! let report = run_implicit(&cfg).unwrap();
//! assert_eq!(report.decided_value(), Some(7));
//! assert!(report.verdict.passed());
//! ```

pub mod adversary;
pub mod bench;
pub mod committee;
pub mod crypto;
pub mod error;
pub mod protocol;
pub mod seed;
pub mod sim;

pub use adversary::{Adversary, AdversaryView, CorruptKeys, CorruptSet, Envelope, StrategyKind};
pub use committee::{CandidateSet, CoinValue, CommitteeProfile, RefereeAssignment};
pub use crypto::{NodeId, Pki, PublicKey, Signature};
pub use error::{ConfigError, SimFault};
pub use protocol::Decision;
pub use sim::{
    run_explicit, run_implicit, run_kt1, run_trial, run_trial_with, InputSpec, Mode, Outcome, TrialConfig,
    TrialReport,
};
