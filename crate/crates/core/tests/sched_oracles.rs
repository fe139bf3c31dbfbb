mod common;

use common::{brute_force_ip, brute_force_label, random_instance, simulate_consecutive};
use linksched::sched::{
    consecutive_cost, enumerate_combinations, execute_policy, genie_solve, greedy_multi_x, label_sample,
    min_multi_x, ChannelRealization, CostVector, LinkCombination, QosRequirement,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn genie_matches_exhaustive_ip_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..300 {
        let (g, q, c) = random_instance(&mut rng, 2, 4, 4);
        let r = genie_solve(&g, &q, &c);
        let oracle = brute_force_ip(&g, &q, &c);
        assert_eq!(r.feasible, oracle.is_some(), "case {case}");
        if let Some(cost) = oracle {
            assert_eq!(r.cost, cost, "case {case}");
        }
    }
}

#[test]
fn label_matches_exhaustive_consecutive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..300 {
        let (g, q, c) = random_instance(&mut rng, 2, 4, 4);
        assert_eq!(label_sample(&g, &q, &c).0, brute_force_label(&g, &q, &c), "case {case}");
    }
}

#[test]
fn label_matches_on_full_size_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let (g, q, c) = random_instance(&mut rng, 3, 50, 120);
        assert_eq!(label_sample(&g, &q, &c).0, brute_force_label(&g, &q, &c));
    }
}

#[test]
fn all_ones_default_geometry_labels_two_mm_links() {
    let g = ChannelRealization::all(4, 50, true);
    let q = QosRequirement::new(100, 50).unwrap();
    let c = CostVector::new(vec![100, 1, 1, 1]).unwrap();
    assert_eq!(label_sample(&g, &q, &c).combination(), LinkCombination::from_links([1, 2]));
    assert_eq!(brute_force_label(&g, &q, &c), 0b0110);
}

fn instance() -> impl Strategy<Value = (ChannelRealization, QosRequirement, CostVector)> {
    any::<u64>().prop_map(|seed| random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 3, 8, 12))
}

proptest! {
    #[test]
    fn genie_never_costs_more_than_a_feasible_policy((g, q, c) in instance()) {
        let genie = genie_solve(&g, &q, &c);
        for comb in enumerate_combinations(g.links()).unwrap().iter() {
            let r = execute_policy(comb, &g, &q, &c);
            if r.feasible {
                prop_assert!(genie.feasible);
                prop_assert!(genie.cost <= r.cost);
            }
        }
    }

    #[test]
    fn all_links_feasible_whenever_anything_is((g, q, c) in instance()) {
        let any = enumerate_combinations(g.links()).unwrap().iter().any(|j| consecutive_cost(j, &g, &q, &c).feasible);
        prop_assert_eq!(greedy_multi_x(&g, &q, &c).feasible, any);
    }

    #[test]
    fn label_is_cheapest_feasible((g, q, c) in instance()) {
        let label = label_sample(&g, &q, &c).combination();
        let lr = consecutive_cost(label, &g, &q, &c);
        for comb in enumerate_combinations(g.links()).unwrap().iter() {
            let r = consecutive_cost(comb, &g, &q, &c);
            if r.feasible {
                prop_assert!(lr.feasible);
                prop_assert!(lr.cost <= r.cost);
            }
        }
    }

    #[test]
    fn execution_accounting((g, q, c) in instance(), mask in 0usize..16) {
        let comb = LinkCombination::from_index(mask % (1 << g.links()));
        let r = execute_policy(comb, &g, &q, &c);
        prop_assert!(r.successes <= q.packets);
        prop_assert!(r.successes + r.failures <= r.transmissions);
        prop_assert_eq!(r.transmissions as usize, comb.len() * r.stop_slot);
        prop_assert!(r.slot_sets.iter().all(|&s| s == comb));
        let cost: u64 = comb.links().map(|i| c.get(i)).sum::<u64>() * r.stop_slot as u64;
        prop_assert_eq!(r.cost, cost);
        prop_assert_eq!((r.feasible, r.cost), simulate_consecutive(comb.index(), &g, &q, &c));
    }

    #[test]
    fn genie_schedule_is_consistent((g, q, c) in instance()) {
        let r = genie_solve(&g, &q, &c);
        prop_assert_eq!(r.failures, 0);
        if r.feasible {
            let comb = r.combination.unwrap();
            let mut cost = 0;
            let mut got = 0;
            for (k, set) in r.slot_sets.iter().enumerate() {
                for i in set.links() {
                    prop_assert!(comb.contains(i));
                    prop_assert!(g.get(i, k));
                    cost += c.get(i);
                    got += 1;
                }
            }
            prop_assert_eq!(cost, r.cost);
            prop_assert_eq!(got, q.packets);
        }
    }

    #[test]
    fn cost_scaling_keeps_the_genie_argmin((g, q, c) in instance(), factor in 2u64..50) {
        let a = genie_solve(&g, &q, &c);
        let b = genie_solve(&g, &q, &c.scaled(factor).unwrap());
        prop_assert_eq!(a.combination, b.combination);
        prop_assert_eq!(a.slot_sets, b.slot_sets);
        prop_assert_eq!(a.cost * factor, b.cost);
        prop_assert_eq!(label_sample(&g, &q, &c), label_sample(&g, &q, &c.scaled(factor).unwrap()));
    }
}

#[test]
fn min_multi_x_size_saturates() {
    use linksched::geom::MeasurementVector;
    let m = MeasurementVector {
        mmaps: 3,
        beams: 2,
        mm_snr_db: vec![1.0, 2.0, 30.0, -5.0, 7.0, 7.0],
        lb_snr_db: 20.0,
        position: [0.0, 0.0],
        slot: 0,
        best_beams: vec![1, 0, 0],
    };
    for (d, k, size) in [(100, 50, 2), (1, 50, 1), (151, 50, 4), (1000, 10, 4), (0, 10, 0)] {
        let q = QosRequirement::new(d, k).unwrap();
        assert_eq!(min_multi_x(&m, &q).len(), size, "D={d} K={k}");
    }
    let q = QosRequirement::new(100, 50).unwrap();
    assert_eq!(min_multi_x(&m, &q), LinkCombination::from_links([0, 2]));
}
