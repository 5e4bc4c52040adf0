//! Shared instance builders for the criterion benches.

use ftsdist_core::metric::DistanceMatrix;
use ftsdist_core::model::{Fts, FuzzySubset};
use ftsdist_core::rational::UnitRational;
use ftsdist_core::testgen::{
    distance_pool_quarters, membership_pool_quarters, random_fts, random_fuzzy_subset,
    random_pseudo_ultrametric, rng, GenConfig,
};

/// A connected random model: every `(state, label)` cell carries at least
/// one distribution, so no pair short-circuits on enabled actions.
pub fn dense_model(states: usize, labels: usize, seed: u64) -> Fts {
    let config = GenConfig {
        states,
        labels,
        min_dists: 1,
        max_dists: 3,
        max_support: 4,
        pool: membership_pool_quarters(),
    };
    random_fts(&mut rng(seed), &config)
}

/// A sparser model where some cells are empty.
pub fn sparse_model(states: usize, labels: usize, seed: u64) -> Fts {
    let config = GenConfig {
        states,
        labels,
        min_dists: 0,
        max_dists: 2,
        max_support: 3,
        pool: membership_pool_quarters(),
    };
    random_fts(&mut rng(seed), &config)
}

/// A lifting instance: a pseudo-ultrametric over `states` states and two
/// distributions with supports of size up to `support`.
pub fn lift_instance(
    states: usize,
    support: usize,
    seed: u64,
) -> (DistanceMatrix, FuzzySubset, FuzzySubset) {
    let mut rng = rng(seed);
    let d = random_pseudo_ultrametric(&mut rng, states, &distance_pool_quarters());
    let mu = random_fuzzy_subset(&mut rng, states, support, &membership_pool_quarters());
    let eta = random_fuzzy_subset(&mut rng, states, support, &membership_pool_quarters());
    (d, mu, eta)
}

/// Discount factor 1/2.
pub fn half() -> UnitRational {
    UnitRational::from_u64(1, 2).unwrap()
}
