//! Simulated PKI, signatures and keyed hashing.
//!
//! Cryptography is an ideal functionality here. A signature is a SipHash MAC
//! over the payload digest, keyed by a 128-bit secret that only the owning
//! node's [`KeyPair`] (and the simulator's [`Pki`] verifier) ever holds.
//! Adversary code receives key pairs for corrupt nodes only, so it can replay
//! honest signatures it observed but cannot mint new ones.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hasher;

use rand::Rng;
use serde::{Deserialize, Serialize};
use siphasher::sip::SipHasher24;

use crate::committee::CoinValue;
use crate::seed;

/// Index of a node in the simulator's global numbering. Protocol logic only
/// learns peer identities from authenticated payload content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PublicKey(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Digest(pub u64);

#[derive(Clone)]
struct SecretKey([u64; 2]);

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl SecretKey {
    fn tag(&self, payload_digest: u64) -> u64 {
        let mut h = SipHasher24::new_with_keys(self.0[0], self.0[1]);
        h.write_u64(payload_digest);
        h.finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub signer: NodeId,
    pub payload_digest: u64,
    pub tag: u64,
}

/// Anything that can produce signatures for one node.
pub trait Signer {
    fn node(&self) -> NodeId;
    fn sign(&self, payload: &[u8]) -> Signature;
}

pub struct KeyPair {
    owner: NodeId,
    public: PublicKey,
    secret: SecretKey,
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyPair")
            .field("owner", &self.owner)
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn public(&self) -> PublicKey {
        self.public
    }

    /// True iff both key pairs hold the same key material.
    pub fn same_material(&self, other: &KeyPair) -> bool {
        self.owner == other.owner && self.public == other.public && self.secret.0 == other.secret.0
    }
}

impl Signer for KeyPair {
    fn node(&self) -> NodeId {
        self.owner
    }

    fn sign(&self, payload: &[u8]) -> Signature {
        let payload_digest = payload_digest(payload);
        Signature {
            signer: self.owner,
            payload_digest,
            tag: self.secret.tag(payload_digest),
        }
    }
}

/// Fixed-key digest of a signed payload.
pub fn payload_digest(payload: &[u8]) -> u64 {
    let mut h = SipHasher24::new_with_keys(0x5061_796c_6f61_6421, 0x4469_6765_7374_2121);
    h.write(payload);
    h.finish()
}

/// Fixed-key digest of a word sequence, used to bind structured content.
pub fn digest_words(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = SipHasher24::new_with_keys(0x576f_7264_7321_2121, 0x4269_6e64_696e_6721);
    for w in words {
        h.write_u64(w);
    }
    h.finish()
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn draw_keypair(trial_seed: u64, node: NodeId, attempt: u64, key_bits: u32) -> KeyPair {
    let mut rng = seed::rng(trial_seed, "pki", ((node.0 as u64) << 16) | attempt);
    let public = PublicKey(rng.gen::<u64>() & mask(key_bits));
    let secret = SecretKey([rng.gen(), rng.gen()]);
    KeyPair {
        owner: node,
        public,
        secret,
    }
}

/// Key pair for `node_index` under `trial_seed`, 64-bit public key space.
///
/// This is the first draw; [`Pki::generate`] re-rolls it if the public key
/// collides with a lower-indexed node.
pub fn gen_keypair(trial_seed: u64, node_index: usize) -> KeyPair {
    draw_keypair(trial_seed, NodeId(node_index), 0, 64)
}

/// Keyed hash `H_key(message)` truncated to `bits` bits. `salt` is the
/// collision-resolution counter and is zero for the primary digest.
pub fn keyed_hash_salted(key: CoinValue, message: PublicKey, salt: u64, bits: u32) -> Digest {
    let mut h = SipHasher24::new_with_keys(key.0, salt ^ 0x6b65_7965_642d_6821);
    h.write_u64(message.0);
    Digest(h.finish() & mask(bits))
}

pub fn keyed_hash(key: CoinValue, message: PublicKey) -> Digest {
    keyed_hash_salted(key, message, 0, 64)
}

/// Hash-lottery digests for every public key, pairwise distinct.
///
/// A digest that collides with an earlier node's digest is re-derived with an
/// incrementing salt. Ties that survive 64 salts (only conceivable at tiny
/// widths) are left in place and broken by public key during selection.
pub fn lottery_digests(key: CoinValue, public_keys: &[PublicKey], bits: u32) -> Vec<Digest> {
    let mut seen = HashMap::with_capacity(public_keys.len());
    let mut out = Vec::with_capacity(public_keys.len());
    for (i, pk) in public_keys.iter().enumerate() {
        let mut salt = 0;
        let mut d = keyed_hash_salted(key, *pk, salt, bits);
        while seen.contains_key(&d) && salt < 64 {
            salt += 1;
            d = keyed_hash_salted(key, *pk, salt, bits);
        }
        seen.entry(d).or_insert(i);
        out.push(d);
    }
    out
}

/// The public-key directory plus the simulator-side verification oracle.
#[derive(Debug, Clone)]
pub struct Pki {
    keys: Vec<PublicKey>,
    secrets: Vec<SecretKey>,
    by_key: HashMap<PublicKey, NodeId>,
}

impl Pki {
    /// Draws distinct key pairs for `n` nodes. Returns the directory and the
    /// per-node key pairs, which the engine hands to their owners.
    pub fn generate(trial_seed: u64, n: usize, key_bits: u32) -> (Pki, Vec<KeyPair>) {
        let mut by_key = HashMap::with_capacity(n);
        let mut pairs = Vec::with_capacity(n);
        for i in 0..n {
            let node = NodeId(i);
            let mut attempt = 0;
            let mut kp = draw_keypair(trial_seed, node, attempt, key_bits);
            while by_key.contains_key(&kp.public) {
                attempt += 1;
                kp = draw_keypair(trial_seed, node, attempt, key_bits);
            }
            by_key.insert(kp.public, node);
            pairs.push(kp);
        }
        let pki = Pki {
            keys: pairs.iter().map(|k| k.public).collect(),
            secrets: pairs.iter().map(|k| k.secret.clone()).collect(),
            by_key,
        };
        (pki, pairs)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn public_keys(&self) -> &[PublicKey] {
        &self.keys
    }

    pub fn public_key(&self, node: NodeId) -> Option<PublicKey> {
        self.keys.get(node.0).copied()
    }

    pub fn owner_of(&self, key: PublicKey) -> Option<NodeId> {
        self.by_key.get(&key).copied()
    }

    /// True iff `sig` was produced by the secret key matching `public_key`
    /// over exactly `payload`.
    pub fn verify(&self, public_key: PublicKey, payload: &[u8], sig: &Signature) -> bool {
        match self.owner_of(public_key) {
            Some(owner) if owner == sig.signer => self.verify_node(owner, payload, sig),
            _ => false,
        }
    }

    /// Verification against the claimed signer's registered key.
    pub fn verify_node(&self, signer: NodeId, payload: &[u8], sig: &Signature) -> bool {
        if sig.signer != signer {
            return false;
        }
        let Some(secret) = self.secrets.get(signer.0) else {
            return false;
        };
        let d = payload_digest(payload);
        d == sig.payload_digest && secret.tag(d) == sig.tag
    }
}
