//! Seed derivation. Every random stream in a trial is a ChaCha8 stream seeded
//! from `(base seed, domain tag, index)` so that trials replay bit-identically
//! and distinct roles never share a stream.

use std::hash::Hasher;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siphasher::sip::SipHasher24;

pub fn derive(base: u64, domain: &str, index: u64) -> u64 {
    let mut h = SipHasher24::new_with_keys(base, 0x7362_612d_7365_6564);
    h.write(domain.as_bytes());
    h.write_u8(0xff);
    h.write_u64(index);
    h.finish()
}

pub fn rng(base: u64, domain: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, domain, index))
}
