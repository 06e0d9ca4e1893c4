//! Plugging in a hand-written adversary.
//!
//! Corrupt candidates push the largest domain value to every referee during
//! Step 0, and corrupt non-candidates flood candidates with noise.

use std::rc::Rc;

use sublinear_ba::protocol::Payload;
use sublinear_ba::sim::{run_trial_with, Phase};
use sublinear_ba::{Adversary, AdversaryView, CorruptKeys, Envelope, InputSpec, SimFault, TrialConfig};

struct Pushy;

impl Adversary for Pushy {
    fn name(&self) -> &str {
        "pushy"
    }

    fn act(&mut self, view: &AdversaryView<'_>, keys: &CorruptKeys) -> Result<Vec<Envelope>, SimFault> {
        let mut out = Vec::new();
        if view.phase == Some(Phase::Step0) {
            for c in view.corrupt_candidates() {
                let vote = Rc::new(Payload::Vote(keys.vote(c, view.max_value)?));
                for &to in view.referees.referees(c) {
                    out.push(Envelope { from: c, to, payload: Rc::clone(&vote) });
                }
            }
        }
        let noisy = view.corrupt.iter().find(|&v| !view.committee.contains(v));
        if let Some(from) = noisy {
            for to in view.honest_candidates() {
                out.push(Envelope { from, to, payload: Rc::new(Payload::Noise { bits: 64 }) });
            }
        }
        Ok(out)
    }
}

fn main() {
    for seed in 0..5 {
        let cfg = TrialConfig {
            trial_seed: seed,
            adversary_seed: seed + 100,
            inputs: InputSpec::Unanimous { value: 2 },
            ..TrialConfig::new(256)
        };
        let run = run_trial_with(&cfg, &mut Pushy).expect("the adversary follows the rules");
        let r = &run.report;
        println!(
            "seed {seed}: decided {:?}, corrupt share {:.2}, adversary fragments {}, passed {}",
            r.decided_value(),
            r.committee_corrupt_frac,
            r.adversary_messages,
            r.verdict.passed()
        );
    }
}
