//! Counter-based deterministic pseudo-random streams.
//!
//! All randomness in the workbench derives from these functions so that
//! runs are reproducible bit-for-bit across platforms and thread counts.
//! The generator is the SplitMix64 finalizer applied to a keyed counter;
//! there is no hidden state, so any cell/trial can be evaluated
//! independently and in any order.

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed hash of a 2D cell: `h(seed, x, y)`.
///
/// Defined as `splitmix64(splitmix64(seed ^ GOLDEN*x') ^ GOLDEN2*y')` where
/// `x'`, `y'` are the two's-complement bit patterns of the coordinates.
pub fn cell_hash(seed: u64, x: i64, y: i64) -> u64 {
    let a = splitmix64(seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(a ^ (y as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

/// Keyed hash of an index (for per-trial or per-instance sub-seeds).
pub fn index_hash(seed: u64, idx: u64) -> u64 {
    splitmix64(seed.wrapping_add(0x2545_F491_4F6C_DD1D).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ splitmix64(idx))
}

/// Map a 64-bit word to a float in `[0, 1)` using the top 53 bits.
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Small stateful convenience wrapper: a counter walking a keyed stream.
#[derive(Clone, Debug)]
pub struct Counter {
    seed: u64,
    n: u64,
}

impl Counter {
    pub fn new(seed: u64) -> Self {
        Counter { seed, n: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = index_hash(self.seed, self.n);
        self.n += 1;
        v
    }

    /// Uniform value in `[0, bound)` by multiply-shift; `bound > 0`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_stable() {
        // Frozen values: the on-disk formats and seeded regressions depend
        // on this exact stream; do not change without re-pinning.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(cell_hash(42, 0, 0), cell_hash(42, 0, 0));
        assert_ne!(cell_hash(42, 0, 0), cell_hash(42, 1, 0));
        assert_ne!(cell_hash(42, 0, 0), cell_hash(43, 0, 0));
    }

    #[test]
    fn unit_is_half_open() {
        assert!(unit_f64(u64::MAX) < 1.0);
        assert_eq!(unit_f64(0), 0.0);
    }

    #[test]
    fn counter_below_bound() {
        let mut c = Counter::new(7);
        for _ in 0..1000 {
            assert!(c.next_below(13) < 13);
        }
    }
}
