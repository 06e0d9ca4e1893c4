//! Committee of the smallest public keys, with no shared coin.

use sublinear_ba::{run_trial, InputSpec, Mode, Pki, TrialConfig};

fn main() {
    let cfg = TrialConfig {
        mode: Mode::PubkeySelect,
        trial_seed: 21,
        faults: Some(0),
        inputs: InputSpec::Unanimous { value: 1 },
        ..TrialConfig::new(64)
    };
    let report = run_trial(&cfg).expect("valid configuration");

    // Anyone holding the directory can recompute the committee.
    let (pki, _) = Pki::generate(cfg.trial_seed, cfg.n, 64);
    for &c in &report.committee {
        println!("node {c:>3} key {:#018x}", pki.public_keys()[c].0);
    }
    let threshold = report.committee.iter().map(|&c| pki.public_keys()[c]).max().unwrap();
    let smaller = pki.public_keys().iter().filter(|k| **k <= threshold).count();
    println!("{} members, {} keys at or below the largest member key", report.committee_size, smaller);
    println!("decided: {:?}", report.decided_value());
}
