//! Deterministic seed derivation.
//!
//! Every stochastic operation in the crate draws from a ChaCha stream whose
//! seed is derived from a single master seed plus a fixed list of stream
//! labels (dimension, instance index, sweep index, ...). Reports are
//! therefore bitwise reproducible regardless of thread count or evaluation
//! order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a master seed and a stream of labels into one 64-bit seed.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    let mut s = splitmix(master);
    for &l in labels {
        s = splitmix(s ^ splitmix(l));
    }
    s
}

/// ChaCha stream for `(master, labels)`.
pub fn rng_from(master: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(42, &[1, 2]), derive_seed(42, &[1, 2]));
        assert_ne!(derive_seed(42, &[1, 2]), derive_seed(42, &[2, 1]));
        assert_ne!(derive_seed(42, &[0]), derive_seed(42, &[]));
    }

    #[test]
    fn streams_reproduce() {
        let mut a = rng_from(7, &[3]);
        let mut b = rng_from(7, &[3]);
        for _ in 0..16 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }
}
