//! Randomized invariants over small graphs: things that must hold for every
//! input, checked against independent oracles (Floyd-Warshall distances, the
//! naive conflict counter, the partition validators) rather than against the
//! code paths that produced them.

use proptest::prelude::*;

use seplab::congestion::{congestion_of, vcong_mwu, VertexWeighting};
use seplab::cutfinder::{bourgain_line, sweep_round};
use seplab::drawing::{count_conflicts, count_conflicts_naive, sample_paths};
use seplab::geometry::{
    gen_grid_strings, gen_random_segments, polylines_intersect, segments_intersect, Point,
    Polyline, StringRepresentation,
};
use seplab::graph::{validate_partition, validate_separator, Graph};
use seplab::separator::build_separator;
use seplab::Error;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let slots = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), slots).prop_map(move |mask| {
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if mask[idx] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

fn arb_connected(max_n: usize) -> impl Strategy<Value = Graph> {
    arb_graph(max_n).prop_filter("connected", Graph::is_connected)
}

fn arb_weighted(max_n: usize) -> impl Strategy<Value = (Graph, Vec<f64>)> {
    arb_connected(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(0.01f64..2.0, n))
    })
}

/// All-pairs shortest paths under edge weights (s(u) + s(v)) / 2, computed
/// the slow safe way.
fn floyd(g: &Graph, s: &[f64]) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for &(u, v) in g.edges() {
        let w = (s[u as usize] + s[v as usize]) / 2.0;
        d[u as usize][v as usize] = w;
        d[v as usize][u as usize] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Separators come back valid on every graph, connected or not.
    #[test]
    fn separator_always_valid(g in arb_graph(10)) {
        let run = build_separator(&g, 0.2, 1);
        let report = validate_separator(&g, &run.separator).unwrap();
        prop_assert!(report.ok(), "violations: {:?}", report.violations);
        let added: usize = run.rounds.iter().map(|r| r.added.len()).sum();
        prop_assert_eq!(added, run.separator.s.len());
    }

    /// The embedding coordinate is exactly distance-to-subset under the dual
    /// weighting, and never stretches any pair beyond its distance.
    #[test]
    fn embedding_matches_metric((g, s) in arb_weighted(9)) {
        let w = VertexWeighting::new(s.clone()).unwrap();
        let emb = bourgain_line(&g, &w, 11);
        let d = floyd(&g, &s);
        for (v, &fv) in emb.f.iter().enumerate() {
            let want = emb
                .subset
                .iter()
                .map(|&t| d[t as usize][v])
                .fold(f64::INFINITY, f64::min);
            prop_assert!((fv - want).abs() <= 1e-9, "f[{v}] = {fv}, oracle {want}");
        }
        prop_assert!(emb.lipschitz_certificate <= 1.0 + 1e-9);
        for (u, row) in d.iter().enumerate() {
            for (v, &duv) in row.iter().enumerate().skip(u + 1) {
                prop_assert!((emb.f[u] - emb.f[v]).abs() <= duv + 1e-9);
            }
        }
    }

    /// Distances under a nonnegative weighting form a pseudometric.
    #[test]
    fn weighted_distances_pseudometric((g, s) in arb_weighted(9)) {
        let d = floyd(&g, &s);
        let n = g.n();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((d[i][j] - d[j][i]).abs() <= 1e-12);
                for k in 0..n {
                    prop_assert!(d[i][j] <= d[i][k] + d[k][j] + 1e-9);
                }
            }
        }
    }

    /// The solver's bracket is internally consistent: the flow it returns
    /// really has the reported max congestion, the flow is valid for the
    /// graph, and the certified lower bound does not cross it.
    #[test]
    fn mwu_bracket_consistent(g in arb_connected(9)) {
        let mwu = vcong_mwu(&g, 0.2, 5).unwrap();
        prop_assert!(mwu.flow.validate_for(&g).is_ok());
        let recomputed = congestion_of(&g, &mwu.flow).unwrap().max_congestion();
        prop_assert!((recomputed - mwu.primal).abs() <= 1e-12);
        prop_assert!(mwu.dual <= mwu.primal + 1e-9);
        prop_assert!(mwu.dual > 0.0);
    }

    /// Whatever the sweep returns is a valid partition with both sides
    /// nonempty and the sparsity it claims; the only permitted failure is
    /// NoValidCut (cliques and near-cliques).
    #[test]
    fn sweep_output_valid(g in arb_connected(9)) {
        let mwu = vcong_mwu(&g, 0.2, 7).unwrap();
        let emb = bourgain_line(&g, &mwu.weighting, 7);
        match sweep_round(&g, &emb) {
            Ok(cut) => {
                let report = validate_partition(&g, &cut.partition).unwrap();
                prop_assert!(report.ok(), "violations: {:?}", report.violations);
                prop_assert!(!cut.partition.a.is_empty() && !cut.partition.b.is_empty());
                let (na, nb, ns) = (
                    cut.partition.a.len() as f64,
                    cut.partition.b.len() as f64,
                    cut.partition.s.len() as f64,
                );
                prop_assert!((cut.sparsity - ns / ((na + ns) * (nb + ns))).abs() <= 1e-12);
            }
            Err(Error::NoValidCut) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    /// The bitset conflict counter agrees with the double-loop oracle on
    /// flows the solver actually produces.
    #[test]
    fn conflict_counters_agree(g in arb_connected(8), seed in 0u64..1000) {
        let mwu = vcong_mwu(&g, 0.25, 2).unwrap();
        let ps = sample_paths(&g, &mwu.flow, seed).unwrap();
        prop_assert_eq!(count_conflicts(&g, &ps).count, count_conflicts_naive(&g, &ps).count);
        let again = sample_paths(&g, &mwu.flow, seed).unwrap();
        prop_assert_eq!(ps.paths, again.paths);
    }
}

proptest! {
    /// Intersection predicates are symmetric in their arguments.
    #[test]
    fn intersection_symmetric(coords in proptest::collection::vec(0i64..50, 8)) {
        let (p1, p2) = (Point::new(coords[0], coords[1]), Point::new(coords[2], coords[3]));
        let (q1, q2) = (Point::new(coords[4], coords[5]), Point::new(coords[6], coords[7]));
        prop_assert_eq!(
            segments_intersect(p1, p2, q1, q2),
            segments_intersect(q1, q2, p1, p2)
        );
        if p1 != p2 && q1 != q2 {
            let a = Polyline::segment(p1, p2).unwrap();
            let b = Polyline::segment(q1, q2).unwrap();
            prop_assert_eq!(polylines_intersect(&a, &b), polylines_intersect(&b, &a));
        }
    }

    /// Translating every curve by a common vector leaves the graph alone.
    #[test]
    fn intersection_graph_translation_invariant(
        n in 2usize..12,
        seed in 0u64..500,
        dx in -100i64..100,
        dy in -100i64..100,
    ) {
        let (rep, g) = gen_random_segments(n, 40, seed).unwrap();
        let moved: Vec<Polyline> = rep
            .curves()
            .iter()
            .map(|c| c.translated(dx, dy).unwrap())
            .collect();
        prop_assert_eq!(StringRepresentation::new(moved).intersection_graph(), g);
    }

    /// Grid strings always realize exactly k^2 crossings, and the JSON round
    /// trip re-derives the same graph bit for bit.
    #[test]
    fn grid_and_roundtrip(k in 1usize..12) {
        let (rep, g) = gen_grid_strings(k).unwrap();
        prop_assert_eq!(g.m(), k * k);
        let text = serde_json::to_string(&rep).unwrap();
        let back: StringRepresentation = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.intersection_graph(), g);
    }
}
