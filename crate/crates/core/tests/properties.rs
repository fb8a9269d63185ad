//! Property suites over random instances: model arithmetic invariants,
//! selection pipeline guarantees, and strategy run contracts.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rebalance_core::agents::{run_strategy, StrategyConfig, StrategyStatus, Variant};
use rebalance_core::gen::{random_scenario, GenParams};
use rebalance_core::model::Assignment;
use rebalance_core::selection::{exp_transform, normalize_to_100, roulette_select};
use rebalance_core::Scenario;

fn scenario_from_seed(seed: u64) -> Scenario {
    random_scenario(&mut ChaCha8Rng::seed_from_u64(seed), &GenParams::default())
}

fn random_assignment(scenario: &Scenario, seed: u64) -> Assignment {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = scenario.space.nodes().len();
    let placements = (0..scenario.space.tasks().len())
        .map(|_| rng.random_range(0..nodes))
        .collect();
    Assignment::from_node_indices(&scenario.space, placements).unwrap()
}

proptest! {
    /// Stability is exactly "no (node, resource) remainder is negative".
    #[test]
    fn stability_equals_min_remaining_nonnegative(seed in 0u64..500) {
        let scenario = scenario_from_seed(seed);
        let assignment = random_assignment(&scenario, seed ^ 0x5eed);
        let space = &scenario.space;
        let min = (0..space.nodes().len())
            .flat_map(|n| space.remaining_by_index(&assignment, n))
            .min();
        prop_assert_eq!(space.is_stable(&assignment), min.is_none_or(|m| m >= 0));
    }

    /// Self-transformation is free.
    #[test]
    fn self_cost_is_zero(seed in 0u64..500) {
        let scenario = scenario_from_seed(seed);
        let cost = scenario
            .space
            .transformation_cost(&scenario.initial, &scenario.initial)
            .unwrap();
        prop_assert_eq!(cost, 0);
    }

    /// Cost is symmetric in its assignments and bounded by migrating all.
    #[test]
    fn cost_symmetric_and_bounded(seed in 0u64..500) {
        let scenario = scenario_from_seed(seed);
        let other = random_assignment(&scenario, seed.wrapping_mul(31));
        let space = &scenario.space;
        let forward = space.transformation_cost(&scenario.initial, &other).unwrap();
        let backward = space.transformation_cost(&other, &scenario.initial).unwrap();
        prop_assert_eq!(forward, backward);
        prop_assert!(forward <= space.max_transformation_cost());
    }

    /// Summed remainders per resource are independent of the assignment:
    /// tasks are neither duplicated nor lost by reassignment.
    #[test]
    fn resource_conservation(seed in 0u64..500) {
        let scenario = scenario_from_seed(seed);
        let space = &scenario.space;
        let dim = space.resources().len();
        let totals = |assignment: &Assignment| -> Vec<i64> {
            (0..dim)
                .map(|i| {
                    (0..space.nodes().len())
                        .map(|n| space.remaining_by_index(assignment, n)[i])
                        .sum()
                })
                .collect()
        };
        let expected: Vec<i64> = (0..dim)
            .map(|i| {
                let capacity: i64 = space.nodes().iter().map(|n| i64::from(n.capacities[i])).sum();
                let demand: i64 = space.tasks().iter().map(|t| i64::from(t.requirements[i])).sum();
                capacity - demand
            })
            .collect();
        prop_assert_eq!(totals(&scenario.initial), expected.clone());
        let shuffled = random_assignment(&scenario, seed ^ 0xabcd);
        prop_assert_eq!(totals(&shuffled), expected);
    }

    /// A task that leaves home and comes back costs nothing.
    #[test]
    fn return_home_is_free(seed in 0u64..200) {
        let scenario = scenario_from_seed(seed);
        let space = &scenario.space;
        if space.nodes().len() < 2 || space.tasks().is_empty() {
            return Ok(());
        }
        let task = (seed as usize) % space.tasks().len();
        let home = scenario.initial.node_of(task);
        let mut away = scenario.initial.clone();
        away.reassign(task, (home + 1) % space.nodes().len());
        let away_cost = space.transformation_cost(&scenario.initial, &away).unwrap();
        prop_assert_eq!(away_cost, u64::from(space.task(task).migration_cost));
        let mut returned = away;
        returned.reassign(task, home);
        prop_assert_eq!(
            space.transformation_cost(&scenario.initial, &returned).unwrap(),
            0
        );
    }

    /// The exponential transform stays positive and strictly increasing.
    #[test]
    fn exp_transform_positive_increasing(x in -500.0f64..500.0, dx in 0.001f64..50.0) {
        let lo = exp_transform(x, 1.02).unwrap();
        let hi = exp_transform(x + dx, 1.02).unwrap();
        prop_assert!(lo > 0.0);
        prop_assert!(hi > lo);
    }

    /// Normalized percentages sum to 100 within 1e-9.
    #[test]
    fn normalize_sums_to_100(values in prop::collection::vec(1e-3f64..1e3, 1..200)) {
        let normalized = normalize_to_100(&values).unwrap();
        let sum: f64 = normalized.iter().sum();
        prop_assert!((sum - 100.0).abs() < 1e-9, "sum = {sum}");
    }
}

/// Roulette frequencies track percentages within one percentage point over
/// 10^5 draws for weight vectors with a healthy minimum entry.
#[test]
fn roulette_frequencies_match_percentages() {
    let vectors: Vec<Vec<f64>> = vec![
        vec![50.0, 50.0],
        vec![5.0, 95.0],
        vec![10.0, 20.0, 30.0, 40.0],
        vec![25.0, 25.0, 25.0, 25.0],
        vec![5.0, 5.0, 90.0],
    ];
    for (i, percentages) in vectors.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
        let mut hits = vec![0u64; percentages.len()];
        let draws = 100_000;
        for _ in 0..draws {
            hits[roulette_select(percentages, &mut rng)] += 1;
        }
        for (k, (&h, &p)) in hits.iter().zip(percentages).enumerate() {
            let observed = 100.0 * h as f64 / draws as f64;
            assert!(
                (observed - p).abs() <= 1.0,
                "vector {i} slot {k}: observed {observed}% vs {p}%"
            );
        }
    }
}

/// Strategy contracts over random feasible-and-not instances: stable
/// results really are stable, the stored cost matches a recomputation, and
/// the migration log replays from the initial assignment to the final one.
#[test]
fn strategy_results_uphold_their_contracts() {
    let params = GenParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7777);
    for variant in [Variant::Ijiids08, Variant::Kesamsta07] {
        for run in 0..60u64 {
            let scenario = random_scenario(&mut rng, &params);
            let mut config = StrategyConfig::default().with_seed(run);
            config.max_cycles = Some(3_000);
            let result = run_strategy(&scenario, &config, variant).unwrap();

            if result.status == StrategyStatus::Stable {
                assert!(scenario.space.is_stable(&result.final_assignment));
            }
            let recomputed = scenario
                .space
                .transformation_cost(&scenario.initial, &result.final_assignment)
                .unwrap();
            assert_eq!(result.cost, recomputed);

            let mut replay = scenario.initial.clone();
            for event in &result.migrations {
                assert_ne!(event.from_node, event.to_node);
                assert_eq!(replay.node_of(event.task), event.from_node);
                replay.reassign(event.task, event.to_node);
            }
            assert_eq!(replay, result.final_assignment);
        }
    }
}
