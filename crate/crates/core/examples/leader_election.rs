//! Zero-message leader election: the node whose key is closest to the coin.

use sublinear_ba::adversary::{choose_corrupt_set, max_faults};
use sublinear_ba::committee::{draw_coin, elect_leader};
use sublinear_ba::{CoinValue, Pki, PublicKey};

fn main() {
    let keys = [PublicKey(10), PublicKey(20)];
    println!("coin 14 over keys {{10, 20}} -> node {}", elect_leader(CoinValue(14), &keys).0);
    let keys = [PublicKey(10), PublicKey(18)];
    println!("coin 14 over keys {{10, 18}} -> node {}", elect_leader(CoinValue(14), &keys).0);

    let n = 512;
    let f = max_faults(n, 0.1);
    let trials = 2000;
    let mut honest = 0;
    for seed in 0..trials {
        let corrupt = choose_corrupt_set(n, f, 0.1, seed ^ 0xabc).expect("f within bound");
        let (pki, _) = Pki::generate(seed, n, 64);
        let leader = elect_leader(draw_coin(seed), pki.public_keys());
        honest += u64::from(!corrupt.contains(leader));
    }
    println!(
        "n={n} f={f}: honest leader in {:.3} of {trials} trials (expected {:.3})",
        honest as f64 / trials as f64,
        1.0 - f as f64 / n as f64
    );
}
