//! Implicit agreement followed by a signed announcement, so every honest
//! node ends up decided.

use sublinear_ba::{run_explicit, run_implicit, InputSpec, StrategyKind, TrialConfig};

fn main() {
    let cfg = TrialConfig {
        strategy: StrategyKind::Equivocate,
        trial_seed: 6,
        adversary_seed: 9,
        inputs: InputSpec::Unanimous { value: 3 },
        ..TrialConfig::new(128)
    };
    let implicit = run_implicit(&cfg).expect("valid configuration");
    let explicit = run_explicit(&cfg).expect("valid configuration");

    let honest = explicit.outcomes.iter().filter(|o| o.is_honest()).count();
    println!("honest nodes: {honest}, decided after announcements: {}", explicit.honest_decided());
    println!("decided value: {:?}", explicit.decided_value());
    // A dishonest-majority committee can split the announcements.
    println!("honest committee majority: {}", explicit.verdict.honest_majority);
    println!(
        "messages: implicit {} / explicit {} (announcement fragments {})",
        implicit.honest_messages, explicit.honest_messages, explicit.final_messages
    );
}
