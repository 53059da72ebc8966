use proptest::prelude::*;
use rand::seq::SliceRandom;

use ndperc_core::census::{
    count_acyclic_connected_ksets, count_trees_bruteforce, take_census, tree_count_lower_bound, validate_cycle,
};
use ndperc_core::generators::{clique_union, complete_graph, hypercube, petersen_graph, random_regular};
use ndperc_core::percolation::{components_oracle, run_dfs, CoinStream, Priority};
use ndperc_core::rng::chacha;
use ndperc_core::{RegularGraph, VertexSet};

/// Small random regular graph parameters with `n·d` even.
fn small_regular() -> impl Strategy<Value = (usize, usize, u64)> {
    (3usize..7, 8usize..60, any::<u64>()).prop_map(|(d, n, seed)| {
        let n = if (n * d) % 2 == 1 { n + 1 } else { n };
        (n, d, seed)
    })
}

fn shuffled(n: usize, seed: u64) -> Priority {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut chacha(seed));
    Priority::Order(order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_simple_and_regular((n, d, seed) in small_regular()) {
        let g = random_regular(n, d, seed).unwrap();
        prop_assert_eq!(g.n(), n);
        for v in 0..n as u32 {
            let nb = g.neighbors(v);
            prop_assert_eq!(nb.len(), d);
            prop_assert!(!nb.contains(&v));
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(nb.iter().all(|&u| g.has_edge(u, v)));
        }
    }

    #[test]
    fn graph_text_roundtrip((n, d, seed) in small_regular()) {
        let g = random_regular(n, d, seed).unwrap();
        let text = g.to_text();
        let back = RegularGraph::parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_text(), text.clone());
        let lines: Vec<&str> = text.lines().skip(2).collect();
        prop_assert_eq!(lines.len(), n * d / 2);
        let mut sorted = lines.clone();
        sorted.sort_by_key(|l| {
            let mut it = l.split(' ').map(|x| x.parse::<u32>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        });
        prop_assert_eq!(lines, sorted);
    }

    #[test]
    fn exploration_matches_union_find(
        (n, d, seed) in small_regular(),
        p in 0.0f64..=1.0,
        coin_seed in any::<u64>(),
        permute in any::<bool>(),
    ) {
        let g = random_regular(n, d, seed).unwrap();
        let priority = if permute { shuffled(n, coin_seed ^ 1) } else { Priority::Identity };
        let mut coins = CoinStream::new(coin_seed, p).unwrap();
        let trace = run_dfs(&g, &mut coins, &priority).unwrap();
        prop_assert_eq!(trace.coins_consumed, n);
        prop_assert_eq!(trace.s_count + trace.w_count, n);
        let sample = trace.to_sample(p, coin_seed).unwrap();
        prop_assert_eq!(trace.partition(), components_oracle(&g, &sample));
        prop_assert_eq!(trace.epoch_sizes.iter().sum::<usize>(), trace.s_count);
    }

    #[test]
    fn census_invariants((n, d, seed) in small_regular(), p in 0.0f64..=1.0, coin_seed in any::<u64>()) {
        let g = random_regular(n, d, seed).unwrap();
        let mut coins = CoinStream::new(coin_seed, p).unwrap();
        let trace = run_dfs(&g, &mut coins, &Priority::Identity).unwrap();
        let sample = trace.to_sample(p, coin_seed).unwrap();
        let c = take_census(&g, &sample, 5).unwrap();
        prop_assert!(c.is_conserved());
        prop_assert_eq!(c.sizes.iter().sum::<usize>(), c.retained);
        prop_assert!(c.sizes.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(c.edges_per_component.iter().sum::<usize>(), c.edges_total);
        for (s, e) in c.sizes.iter().zip(&c.edges_per_component) {
            prop_assert!(*e + 1 >= *s);
        }
        prop_assert!(c.tree_counts.iter().sum::<usize>() <= c.sizes.len());
        match &c.cycle {
            Some(w) => {
                prop_assert!(validate_cycle(&g, &sample, w));
                prop_assert_eq!(w.len(), c.longest_cycle_lb);
            }
            None => prop_assert_eq!(c.longest_cycle_lb, 0),
        }
    }

    #[test]
    fn acyclic_sets_never_exceed_trees(seed in any::<u64>(), k in 1usize..5) {
        let g = random_regular(10, 3, seed).unwrap();
        let trees = count_trees_bruteforce(&g, k).unwrap();
        let acyclic = count_acyclic_connected_ksets(&g, k).unwrap();
        prop_assert!(acyclic <= trees);
        prop_assert!(trees as f64 >= tree_count_lower_bound(10, 3, k));
    }
}

#[test]
fn exploration_matches_union_find_on_fixed_families() {
    let graphs = [
        complete_graph(4).unwrap(),
        petersen_graph(),
        hypercube(4).unwrap(),
        clique_union(30, 4).unwrap(),
    ];
    for g in &graphs {
        for seed in 0..50u64 {
            let mut coins = CoinStream::new(seed, 0.5).unwrap();
            let trace = run_dfs(g, &mut coins, &shuffled(g.n(), seed)).unwrap();
            let sample = trace.to_sample(0.5, seed).unwrap();
            assert_eq!(trace.partition(), components_oracle(g, &sample));
        }
    }
}

#[test]
fn full_retention_sees_the_whole_graph() {
    let g = hypercube(5).unwrap();
    let all = VertexSet::full(g.n());
    let sample = ndperc_core::PercolationSample::from_set(1.0, 0, all).unwrap();
    let c = take_census(&g, &sample, 3).unwrap();
    assert_eq!(c.sizes, vec![32]);
    assert_eq!(c.edges_total, 80);
    assert!(c.longest_cycle_lb >= 4);
}
