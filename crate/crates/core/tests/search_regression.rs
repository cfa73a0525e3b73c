use mub6::equivalence::reduce_p2;
use mub6::search::{find_mu_vectors, orthogonality_graph, SearchConfig};
use mub6::Tolerance;

/// Smallest `|<u|v>|` between distinct vectors unbiased to `{I, S6}`,
/// measured on the first converged 20000-restart run (seed 0).
const S6_MIN_OVERLAP: f64 = 0.15450849718747;

#[test]
fn s6_set_is_stable_across_seeds_and_budgets() {
    let tol = Tolerance::default();
    let (pair, _) = reduce_p2(&tol).unwrap();
    let full = find_mu_vectors(&pair, &SearchConfig::default().with_seed(0)).unwrap();
    assert_eq!(full.len(), 90);
    let g = orthogonality_graph(&full, &tol);
    assert!(g.edges.is_empty());
    assert!((g.min_abs_overlap.unwrap() - S6_MIN_OVERLAP).abs() < 1e-12);

    // a different seed finds the same 90 rays
    let other = find_mu_vectors(&pair, &SearchConfig::default().with_seed(12345)).unwrap();
    assert_eq!(other.len(), 90);
    for c in &other.clusters {
        let near = full.clusters.iter().any(|d| {
            let ip: mub6::Complex64 = c.vector.components().iter().zip(d.vector.components()).map(|(a, b)| a.conj() * b).sum();
            (1.0 - ip.norm()).abs() < 1e-10
        });
        assert!(near);
    }

    // fewer restarts give a subset
    let mut last = 0;
    for restarts in [50, 500, 5000] {
        let n = find_mu_vectors(&pair, &SearchConfig::default().with_restarts(restarts)).unwrap().len();
        assert!(n >= last && n <= 90);
        last = n;
    }
}
