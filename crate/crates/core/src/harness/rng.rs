//! Counter-based SplitMix64 stream.
//!
//! Value `i` of a stream with seed `s` is `mix(s + (i + 1)·φ)` where
//! `φ = 0x9E3779B97F4A7C15` and `mix` is the SplitMix64 finalizer. Values can
//! therefore be produced in any order, and any language with 64-bit wrapping
//! arithmetic reproduces them exactly.

pub const GENERATOR_ID: &str = "splitmix64-counter";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `i`-th raw 64-bit value.
pub fn value(seed: u64, i: u64) -> u64 {
    mix(seed.wrapping_add((i + 1).wrapping_mul(GOLDEN)))
}

/// The `i`-th value mapped to `[0, 1)` from its top 53 bits.
pub fn unit(seed: u64, i: u64) -> f64 {
    (value(seed, i) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `count` values uniform on `[lo, hi)`.
pub fn uniform(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count as u64).map(|i| lo + (hi - lo) * unit(seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_splitmix() {
        // the classic stateful generator: state += φ; output mix(state)
        let mut state = 1234u64;
        for i in 0..10 {
            state = state.wrapping_add(GOLDEN);
            assert_eq!(value(1234, i), mix(state));
        }
    }

    #[test]
    fn reference_value() {
        // first output of SplitMix64 seeded with 0
        assert_eq!(value(0, 0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn uniform_range() {
        let v = uniform(7, 10_000, -0.8, 0.8);
        assert!(v.iter().all(|&x| (-0.8..0.8).contains(&x)));
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 0.02);
    }
}
