//! The same trials with candidates wired to each other directly (KT1) and
//! through sampled referees (KT0).

use sublinear_ba::{run_implicit, run_kt1, InputSpec, TrialConfig};

fn main() {
    println!("{:>6} {:>4} {:>12} {:>12} {:>10}", "n", "k", "kt0 msgs", "kt1 msgs", "same?");
    for n in [64, 256, 1024] {
        let cfg = TrialConfig {
            trial_seed: 2,
            inputs: InputSpec::Random { domain: 3 },
            ..TrialConfig::new(n)
        };
        let kt0 = run_implicit(&cfg).expect("valid configuration");
        let kt1 = run_kt1(&cfg).expect("valid configuration");
        println!(
            "{:>6} {:>4} {:>12} {:>12} {:>10}",
            n,
            kt1.committee_size,
            kt0.honest_messages,
            kt1.honest_messages,
            kt0.outcomes == kt1.outcomes
        );
    }
}
