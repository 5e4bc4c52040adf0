//! Deterministic random-instance generators for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::DistanceMatrix;
use crate::model::{Fts, FtsBuilder, FuzzySubset, LabelId, StateId};
use crate::rational::UnitRational;

/// The four-state, one-label model used throughout the documentation and
/// test suites: s1, s2 and s3 each perform `a` into distributions over
/// {s3, s4}; s4 is a sink.
pub const DEMO_MODEL_JSON: &str = r#"{
  "states": ["s1", "s2", "s3", "s4"],
  "labels": ["a"],
  "transitions": [
    {"from": "s1", "label": "a", "distribution": {"s3": "0.9", "s4": "0.8"}},
    {"from": "s2", "label": "a", "distribution": {"s3": "0.6", "s4": "0.9"}},
    {"from": "s3", "label": "a", "distribution": {"s4": "0.9"}}
  ]
}"#;

/// Parses [`DEMO_MODEL_JSON`].
pub fn demo_model() -> Fts {
    Fts::parse(DEMO_MODEL_JSON).expect("demo model is valid")
}

/// A seeded RNG with a stable stream across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ur(num: u64, den: u64) -> UnitRational {
    UnitRational::from_u64(num, den).expect("pool value in range")
}

/// `{1/4, 1/2, 3/4, 1}`: membership values at quarter resolution.
pub fn membership_pool_quarters() -> Vec<UnitRational> {
    vec![ur(1, 4), ur(1, 2), ur(3, 4), UnitRational::one()]
}

/// `{1/2, 1}`: the coarse membership pool.
pub fn membership_pool_halves() -> Vec<UnitRational> {
    vec![ur(1, 2), UnitRational::one()]
}

/// `{0, 1/4, 1/2, 3/4, 1}`: distance values at quarter resolution.
pub fn distance_pool_quarters() -> Vec<UnitRational> {
    vec![
        UnitRational::zero(),
        ur(1, 4),
        ur(1, 2),
        ur(3, 4),
        UnitRational::one(),
    ]
}

/// Shape parameters for [`random_fts`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub states: usize,
    pub labels: usize,
    /// Distributions per `(state, label)` cell, drawn uniformly from
    /// `min_dists..=max_dists`.
    pub min_dists: usize,
    pub max_dists: usize,
    /// Support size per distribution, drawn uniformly from
    /// `1..=max_support`.
    pub max_support: usize,
    /// Membership values (must be nonzero).
    pub pool: Vec<UnitRational>,
}

/// A random distribution with support size in `1..=max_support` and
/// memberships from `pool`.
pub fn random_fuzzy_subset(
    rng: &mut impl Rng,
    states: usize,
    max_support: usize,
    pool: &[UnitRational],
) -> FuzzySubset {
    let support = rng.gen_range(1..=max_support.min(states));
    let mut indices: Vec<usize> = (0..states).collect();
    indices.shuffle(rng);
    FuzzySubset::from_entries(indices.into_iter().take(support).map(|s| {
        let value = pool.choose(rng).expect("nonempty pool").clone();
        (StateId(s), value)
    }))
    .expect("pool values are nonzero")
}

/// A random model with the given shape. Duplicate distributions drawn for
/// the same cell are dropped (transition sets have set semantics).
pub fn random_fts(rng: &mut impl Rng, config: &GenConfig) -> Fts {
    let states: Vec<String> = (0..config.states).map(|i| format!("s{i}")).collect();
    let labels: Vec<String> = (0..config.labels).map(|i| format!("a{i}")).collect();
    let mut builder = FtsBuilder::new(states, labels).expect("generated names are unique");
    for s in 0..config.states {
        for a in 0..config.labels {
            let count = rng.gen_range(config.min_dists..=config.max_dists);
            for _ in 0..count {
                let dist =
                    random_fuzzy_subset(rng, config.states, config.max_support, &config.pool);
                // ignore duplicates within the cell
                let _ = builder.add_transition(
                    StateId(s),
                    LabelId(a),
                    dist.iter().map(|(state, v)| (state, v.clone())),
                );
            }
        }
    }
    builder.build()
}

/// A random pseudo-ultrametric over `n` states with values from `pool`:
/// symmetric values with zero diagonal, closed under minimax paths
/// (Floyd-Warshall over the `(min, max)` semiring), which enforces the
/// strong triangle inequality while keeping every entry inside the pool.
pub fn random_pseudo_ultrametric(
    rng: &mut impl Rng,
    n: usize,
    pool: &[UnitRational],
) -> DistanceMatrix {
    let mut matrix = DistanceMatrix::bottom(n);
    for s in 0..n {
        for t in (s + 1)..n {
            let value = pool.choose(rng).expect("nonempty pool").clone();
            matrix.set_symmetric(StateId(s), StateId(t), value);
        }
    }
    for k in 0..n {
        for s in 0..n {
            for t in 0..n {
                let via = matrix.get(StateId(s), StateId(k)).max(matrix.get(StateId(k), StateId(t)));
                if via < matrix.get(StateId(s), StateId(t)) {
                    let via = via.clone();
                    matrix.set_symmetric(StateId(s), StateId(t), via);
                }
            }
        }
    }
    debug_assert_eq!(matrix.validate(), Ok(()));
    matrix
}
