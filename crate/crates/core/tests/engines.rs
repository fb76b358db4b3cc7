use std::f64::consts::PI;

use orthohom::closed_form::{closed_form, t_complete, t_complete_bipartite};
use orthohom::graph::{complete, complete_bipartite, cycle, path, Graph};
use orthohom::mc::{
    classify_finiteness, estimate_bipartite, estimate_sequential, DensityEstimate, Execution, FinitenessStatus, McConfig,
    Method,
};
use orthohom::spectral::cycle_density;
use orthohom::NodeOrdering;
use proptest::prelude::*;

fn mc(samples: u64) -> McConfig {
    McConfig::with_samples(samples)
}

#[test]
fn closed_form_spectral_and_sampling_agree_on_cycles() {
    for d in [5, 6] {
        let exact = t_complete(3, d).unwrap().value.to_f64();
        let s = cycle_density(d, 3, 1e-8).unwrap();
        assert!((s.value - exact).abs() <= s.tail_bound + 1e-12, "d={d}");
    }
    let g = cycle(5).unwrap();
    let s = cycle_density(4, 5, 1e-8).unwrap();
    let seq = estimate_sequential(&g, 4, &NodeOrdering::default_for(&g), &mc(200_000)).unwrap();
    assert!(seq.z_exact(s.value) < 4.0, "{} vs {}", seq.value, s.value);
}

#[test]
fn both_samplers_match_complete_bipartite_formula() {
    for (a, b, d) in [(1, 3, 4), (2, 2, 5), (2, 3, 6)] {
        let g = complete_bipartite(a, b).unwrap();
        let exact = t_complete_bipartite(a, b, d).unwrap().value.to_f64();
        let seq = estimate_sequential(&g, d, &NodeOrdering::default_for(&g), &mc(100_000)).unwrap();
        let bip = estimate_bipartite(&g, d, &mc(100_000).derived(1)).unwrap();
        assert!(seq.z_exact(exact) < 4.0, "seq K_{a},{b} d={d}: {} vs {exact}", seq.value);
        assert!(bip.z_exact(exact) < 4.0, "bip K_{a},{b} d={d}: {} vs {exact}", bip.value);
        assert!(seq.z_against(&bip) < 4.0);
    }
}

#[test]
fn dispatcher_picks_exact_families() {
    assert!(closed_form(&path(3).unwrap(), 3).unwrap().value.is_positive());
    assert_eq!(closed_form(&complete(3).unwrap(), 4).unwrap().value.to_f64(), PI / 4.0);
    assert!(closed_form(&cycle(5).unwrap(), 3).is_err());
}

#[test]
fn estimates_are_reproducible_across_workers_and_execution() {
    let g = cycle(6).unwrap();
    let p = NodeOrdering::default_for(&g);
    let base = McConfig { samples: 30_000, chunk_size: 1000, ..McConfig::default() };
    let reference = estimate_sequential(&g, 3, &p, &McConfig { workers: 1, ..base }).unwrap();
    for cfg in [McConfig { workers: 4, ..base }, McConfig { execution: Execution::Sequential, ..base }] {
        assert_eq!(estimate_sequential(&g, 3, &p, &cfg).unwrap(), reference);
    }
    let b1 = estimate_bipartite(&g, 3, &McConfig { workers: 1, ..base }).unwrap();
    let b2 = estimate_bipartite(&g, 3, &McConfig { workers: 3, ..base }).unwrap();
    assert_eq!(b1, b2);
}

#[test]
fn estimate_carries_verdict_and_serializes() {
    let g = cycle(6).unwrap();
    let e = estimate_bipartite(&g, 3, &mc(5000)).unwrap();
    assert_eq!(e.method, Method::BipartiteDirect);
    assert_eq!(e.finiteness.status, FinitenessStatus::FiniteProved);
    assert_eq!(e.finiteness.rule, "subdivision");
    let json = serde_json::to_string(&e).unwrap();
    assert!(json.contains("\"method\":\"bipartite_direct\""));
    let back: DensityEstimate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, e);
}

#[test]
fn verdicts_on_unsupported_inputs() {
    let cube = orthohom::graph::crown(4).unwrap();
    assert_eq!(classify_finiteness(&cube, 4).status, FinitenessStatus::InfiniteProved);
    let fano_incidence = {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        let edges = lines.iter().enumerate().flat_map(|(l, pts)| pts.iter().map(move |&p| (p, 7 + l)));
        Graph::new(14, edges).unwrap()
    };
    assert_eq!(classify_finiteness(&fano_incidence, 4).status, FinitenessStatus::Unknown);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimate_invariants(seed in any::<u64>(), samples in 1u64..3000, k in 5usize..9) {
        let g = cycle(k).unwrap();
        let e = estimate_sequential(&g, 3, &NodeOrdering::default_for(&g), &McConfig::with_samples(samples).seeded(seed)).unwrap();
        prop_assert!(e.std_error >= 0.0);
        prop_assert!(e.diagnostics.effective_sample_size <= e.samples as f64 + 1e-9);
        prop_assert!(e.diagnostics.max_weight > 0.0);
        prop_assert!((e.diagnostics.retry_count as f64) < 1e-4 * samples as f64 + 1.0);
    }
}
