//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use staeckel_core::so4::{integral_values, sample_leaf};
use staeckel_core::{Bivector, CotangentPoint, IntegralValues, SystemSpec};

pub fn ellipsoidal() -> SystemSpec {
    SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).expect("ordered poles")
}

pub fn prolate() -> SystemSpec {
    SystemSpec::prolate(2.4).expect("b > 1")
}

/// `n` seeded points of the leaf at 2h = 1.
pub fn leaf_points(n: usize, seed: u64) -> Vec<(CotangentPoint, Bivector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_leaf(&mut rng, 1.0)).collect()
}

/// Integral values of seeded leaf points, so every one lies in the image.
pub fn image_values(spec: &SystemSpec, n: usize, seed: u64) -> Vec<IntegralValues> {
    leaf_points(n, seed).iter().map(|(_, l)| integral_values(spec, l)).collect()
}
