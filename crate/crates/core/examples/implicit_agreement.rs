//! One implicit-agreement trial against equivocating corrupt nodes.
//!
//! Only the committee decides; everyone else stays undecided.

use sublinear_ba::{run_implicit, InputSpec, Outcome, StrategyKind, TrialConfig};

fn main() {
    let cfg = TrialConfig {
        strategy: StrategyKind::Equivocate,
        trial_seed: 11,
        adversary_seed: 3,
        inputs: InputSpec::Random { domain: 4 },
        ..TrialConfig::new(256)
    };
    let report = run_implicit(&cfg).expect("valid configuration");

    let decided: Vec<(usize, u64)> = report
        .outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.value().map(|v| (i, v)))
        .collect();
    let undecided = report.outcomes.iter().filter(|o| **o == Outcome::Undecided).count();

    println!("n={} f={} committee size={}", report.n, report.f, report.committee_size);
    println!("corrupt share of committee: {:.2}", report.committee_corrupt_frac);
    println!("honest candidates decided: {decided:?}");
    println!("honest nodes left undecided: {undecided}");
    println!(
        "honest messages={} bits={} rounds={}",
        report.honest_messages, report.honest_bits, report.rounds
    );
    println!("verdict: {:?}", report.verdict);
}
