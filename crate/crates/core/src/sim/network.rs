use rand::Rng;

use crate::crypto::NodeId;
use crate::protocol::Port;
use crate::seed;

/// Hidden port wiring of the complete graph.
///
/// Node `u` reaches peer `(u + d) mod n` for an offset `d` in `1..n`. Port
/// `p >= 1` carries offset `1 + (a_u (p - 1) + b_u) mod (n - 1)` with `a_u`
/// a unit modulo `n - 1`, which gives every node its own random-looking
/// permutation in O(1) space. Port 0 is the node itself.
#[derive(Clone, Debug)]
pub struct PortMap {
    n: usize,
    maps: Vec<(u64, u64, u64)>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn inverse(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(m as i128) as u64
}

impl PortMap {
    pub fn new(trial_seed: u64, n: usize) -> Self {
        let m = (n.max(2) - 1) as u64;
        let mut rng = seed::rng(trial_seed, "ports", 0);
        let maps = (0..n)
            .map(|_| {
                let a = if m == 1 {
                    1
                } else {
                    loop {
                        let a = rng.gen_range(1..m);
                        if gcd(a, m) == 1 {
                            break a;
                        }
                    }
                };
                let b = rng.gen_range(0..m);
                (a, b, inverse(a, m))
            })
            .collect();
        PortMap { n, maps }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The node behind `port` of `node`.
    pub fn peer(&self, node: NodeId, port: Port) -> NodeId {
        if port == Port::SELF {
            return node;
        }
        let m = (self.n - 1) as u64;
        let (a, b, _) = self.maps[node.0];
        let offset = 1 + (a * (u64::from(port.0) - 1) + b) % m;
        NodeId((node.0 + offset as usize) % self.n)
    }

    /// The port of `node` that leads to `peer`.
    pub fn port_of(&self, node: NodeId, peer: NodeId) -> Port {
        if node == peer {
            return Port::SELF;
        }
        let m = (self.n - 1) as u64;
        let (_, b, a_inv) = self.maps[node.0];
        let offset = ((peer.0 + self.n - node.0) % self.n) as u64;
        let p = (a_inv * ((offset - 1 + m - b) % m)) % m;
        Port(p as u32 + 1)
    }
}
