//! The auxiliary walk on `{0, 1, ...}` whose absorption time at `n - 1` has
//! the law of the number of pops on the `n`-cycle.
//!
//! The walk starts at `-1 + G`, steps by `-2 + G` from a positive state and
//! by `-1 + G` from `0`, where `G` is geometric with mean 2. Two readings of
//! the geometric law are available.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WalkVariant {
    /// `G` on `{1, 2, ...}` with success probability 1/2.
    GeometricFromOne,
    /// `G` on `{0, 1, ...}` with success probability 1/3; any step landing
    /// below 0 is redrawn.
    GeometricFromZero,
}

impl WalkVariant {
    pub const ALL: [WalkVariant; 2] = [WalkVariant::GeometricFromOne, WalkVariant::GeometricFromZero];

    pub fn name(self) -> &'static str {
        match self {
            WalkVariant::GeometricFromOne => "geometric-from-one",
            WalkVariant::GeometricFromZero => "geometric-from-zero",
        }
    }

    /// One geometric draw with mean 2.
    pub fn geometric<R: Rng>(self, rng: &mut R) -> i64 {
        match self {
            WalkVariant::GeometricFromOne => {
                let mut g = 1;
                while rng.random::<bool>() {
                    g += 1;
                }
                g
            }
            WalkVariant::GeometricFromZero => {
                let mut g = 0;
                while !rng.random_bool(1.0 / 3.0) {
                    g += 1;
                }
                g
            }
        }
    }

    fn step<R: Rng>(self, from: i64, rng: &mut R) -> i64 {
        let shift = if from > 0 { from - 2 } else { -1 };
        loop {
            let next = shift + self.geometric(rng);
            if next >= 0 {
                return next;
            }
        }
    }
}

/// Number of steps taken before the walk reaches `n - 1` or beyond.
pub fn abstract_walk_tau(n: usize, seed: u64, variant: WalkVariant) -> u64 {
    assert!(n >= 2, "walk needs n >= 2");
    let target = n as i64 - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = variant.step(0, &mut rng);
    let mut tau = 0;
    while y < target {
        tau += 1;
        y = variant.step(y, &mut rng);
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::mean_se;

    #[test]
    fn geometric_means_are_two() {
        for variant in WalkVariant::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let m = mean_se((0..200_000).map(|_| variant.geometric(&mut rng) as f64));
            assert!((m.mean - 2.0).abs() < 3.0 * m.std_error, "{variant:?}: {m:?}");
        }
    }

    #[test]
    fn walk_is_deterministic_and_terminates() {
        for variant in WalkVariant::ALL {
            for seed in 0..100 {
                assert_eq!(abstract_walk_tau(5, seed, variant), abstract_walk_tau(5, seed, variant));
            }
        }
    }

    #[test]
    fn two_vertex_walk_law() {
        // from-one variant: start at G-1, absorbed at >= 1, so P(tau = 0) = 1/2
        let zeros = (0..20_000)
            .filter(|&s| abstract_walk_tau(2, s, WalkVariant::GeometricFromOne) == 0)
            .count();
        assert!((zeros as f64 / 20_000.0 - 0.5).abs() < 0.015);
    }
}
