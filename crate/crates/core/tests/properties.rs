//! Randomised property checks over the public API.

use std::collections::BTreeSet;

use ftsdist_core::bisim::{quotient, signature};
use ftsdist_core::lifting::{build_system, lift};
use ftsdist_core::metric::DistanceMatrix;
use ftsdist_core::model::{Fts, FuzzySubset};
use ftsdist_core::rational::UnitRational;
use ftsdist_core::testgen::{
    distance_pool_quarters, membership_pool_quarters, random_fts, random_fuzzy_subset,
    random_pseudo_ultrametric, rng, GenConfig,
};

fn ur(num: u64, den: u64) -> UnitRational {
    UnitRational::from_u64(num, den).unwrap()
}

/// Scans the candidate set through the explicit equation-system path.
/// Mirrors what `lift` does on its direct support representation; the two
/// must agree everywhere.
fn lift_via_system(d: &DistanceMatrix, mu: &FuzzySubset, eta: &FuzzySubset) -> UnitRational {
    if mu.sup() != eta.sup() {
        return UnitRational::one();
    }
    let mut candidates: BTreeSet<UnitRational> = BTreeSet::new();
    candidates.insert(UnitRational::zero());
    for (_, v) in mu.iter().chain(eta.iter()) {
        candidates.insert(v.clone());
    }
    for (s, _) in mu.iter() {
        for (t, _) in eta.iter() {
            candidates.insert(d.get(s, t).clone());
        }
    }
    candidates
        .into_iter()
        .find(|c| build_system(d, mu, eta, c).is_feasible())
        .expect("the largest candidate is feasible")
}

#[test]
fn lift_agrees_with_the_equation_system_path() {
    for seed in 0..500u64 {
        let mut rng = rng(0xA000 + seed);
        let d = random_pseudo_ultrametric(&mut rng, 5, &distance_pool_quarters());
        let mu = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        let eta = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        assert_eq!(lift(&d, &mu, &eta), lift_via_system(&d, &mu, &eta));
    }
}

#[test]
fn lift_is_symmetric() {
    for seed in 0..500u64 {
        let mut rng = rng(0xA100 + seed);
        let d = random_pseudo_ultrametric(&mut rng, 5, &distance_pool_quarters());
        let mu = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        let eta = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        assert_eq!(lift(&d, &mu, &eta), lift(&d, &eta, &mu));
    }
}

#[test]
fn lift_is_monotone_in_the_state_distance() {
    // scaling a pseudo-ultrametric keeps the axioms and shrinks it pointwise
    for seed in 0..300u64 {
        let mut rng = rng(0xA200 + seed);
        let larger = random_pseudo_ultrametric(&mut rng, 5, &distance_pool_quarters());
        let smaller = larger.scale(&ur(1, 2));
        assert!(smaller.le_pointwise(&larger));
        let mu = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        let eta = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        assert!(lift(&smaller, &mu, &eta) <= lift(&larger, &mu, &eta));
    }
}

#[test]
fn lift_satisfies_the_ultrametric_axioms_on_distributions() {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 300 {
        seed += 1;
        let mut rng = rng(0xA300 + seed);
        let d = random_pseudo_ultrametric(&mut rng, 5, &distance_pool_quarters());
        let mu = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        let eta = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        let lambda = random_fuzzy_subset(&mut rng, 5, 3, &membership_pool_quarters());
        if mu.sup() != eta.sup() || eta.sup() != lambda.sup() {
            continue;
        }
        checked += 1;
        assert_eq!(lift(&d, &mu, &mu), UnitRational::zero());
        let direct = lift(&d, &mu, &lambda);
        let through = lift(&d, &mu, &eta).max(lift(&d, &eta, &lambda));
        assert!(direct <= through, "strong triangle failed at seed {seed}");
    }
}

#[test]
fn largest_candidate_terminates_the_scan() {
    for seed in 0..300u64 {
        let mut rng = rng(0xA400 + seed);
        let d = random_pseudo_ultrametric(&mut rng, 4, &distance_pool_quarters());
        let mu = random_fuzzy_subset(&mut rng, 4, 3, &membership_pool_quarters());
        let mut eta = random_fuzzy_subset(&mut rng, 4, 3, &membership_pool_quarters());
        if mu.sup() != eta.sup() {
            eta = mu.clone();
        }
        let mut top = UnitRational::zero();
        for (_, v) in mu.iter().chain(eta.iter()) {
            top = top.max(v.clone());
        }
        for (s, _) in mu.iter() {
            for (t, _) in eta.iter() {
                top = top.max(d.get(s, t).clone());
            }
        }
        assert!(build_system(&d, &mu, &eta, &top).is_feasible());
    }
}

#[test]
fn delta_core_matches_its_brute_force_composition() {
    use ftsdist_core::metric::delta_core;
    use ftsdist_core::oracle::delta_bruteforce;
    for seed in 0..200u64 {
        let mut rng = rng(0xA800 + seed);
        let config = GenConfig {
            states: 2 + (seed as usize % 4),
            labels: 1 + (seed as usize % 2),
            min_dists: 0,
            max_dists: 2,
            max_support: 3,
            pool: membership_pool_quarters(),
        };
        let m = random_fts(&mut rng, &config);
        let d = random_pseudo_ultrametric(&mut rng, m.state_count(), &distance_pool_quarters());
        assert_eq!(
            delta_core(&m, &d),
            delta_bruteforce(&m, &d).unwrap(),
            "delta mismatch at seed {seed}"
        );
    }
}

#[test]
fn models_round_trip_through_json() {
    for seed in 0..200u64 {
        let config = GenConfig {
            states: 1 + (seed as usize % 6),
            labels: 1 + (seed as usize % 3),
            min_dists: 0,
            max_dists: 2,
            max_support: 3,
            pool: membership_pool_quarters(),
        };
        let m = random_fts(&mut rng(0xA500 + seed), &config);
        let again = Fts::parse(&m.to_json()).expect("serialised model parses");
        assert_eq!(m, again);

        let theta = m.theta();
        assert_eq!(theta.first(), Some(&UnitRational::zero()));
        assert_eq!(theta.last(), Some(&UnitRational::one()));
        assert!(theta.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn arithmetic_size_is_bounded_by_bit_size() {
    // The literal `1/1` encodes in zero bits under the size convention, so
    // the bound is stated for models whose literals all cost at least one
    // bit (here, proper fractions).
    let pool = vec![ur(1, 4), ur(1, 2), ur(3, 4)];
    for seed in 0..200u64 {
        let config = GenConfig {
            states: 1 + (seed as usize % 6),
            labels: 1 + (seed as usize % 3),
            min_dists: 0,
            max_dists: 2,
            max_support: 3,
            pool: pool.clone(),
        };
        let m = random_fts(&mut rng(0xA700 + seed), &config);
        assert!(m.size_arith() <= m.size_bits());
    }
}

#[test]
fn final_blocks_have_uniform_signatures() {
    for seed in 0..200u64 {
        let config = GenConfig {
            states: 2 + (seed as usize % 5),
            labels: 1 + (seed as usize % 2),
            min_dists: 0,
            max_dists: 2,
            max_support: 3,
            pool: membership_pool_quarters(),
        };
        let m = random_fts(&mut rng(0xA600 + seed), &config);
        let q = quotient(&m);
        for block in q.blocks() {
            let first = signature(&m, block[0], &q);
            for &s in &block[1..] {
                assert_eq!(signature(&m, s, &q), first);
            }
        }
    }
}
