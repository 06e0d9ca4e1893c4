//! How often the hash lottery yields an honest-majority committee, for the
//! two built-in committee constants.

use sublinear_ba::adversary::max_faults;
use sublinear_ba::bench::committee_sample;
use sublinear_ba::committee::committee_size;
use sublinear_ba::CommitteeProfile;

fn main() {
    let eps = 0.1;
    let trials = 300;
    for n in [256, 1024] {
        let f = max_faults(n, eps);
        for profile in [CommitteeProfile::Desk, CommitteeProfile::Paper] {
            let mut majority = 0;
            let mut covered = 0;
            for t in 0..trials {
                let s = committee_sample(n, eps, f, profile, t, t.wrapping_mul(31) + 7, true).expect("setup");
                majority += u64::from(s.honest_majority);
                covered += u64::from(s.referee_coverage == Some(true));
            }
            println!(
                "n={n:<5} {profile:<6} |C|={:<5} honest majority {:.3}  referee coverage {:.3}",
                committee_size(n, profile.constant(eps)),
                majority as f64 / trials as f64,
                covered as f64 / trials as f64
            );
        }
    }
}
