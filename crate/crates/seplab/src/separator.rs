//! Balanced separators by repeated sparse cutting.
//!
//! A component larger than the balance limit (two thirds of the original
//! vertex count) is attacked with the sparse-cut pipeline; its cut vertices
//! move into the accumulating separator and the leftovers rejoin the pool.
//! When the pipeline cannot produce a valid cut (cliques are the canonical
//! case: no vertex partition of a clique avoids crossing edges) a single
//! max-degree vertex is peeled instead, so the construction never fails.

use std::time::Instant;

use serde::Serialize;

use crate::congestion;
use crate::cutfinder;
use crate::error::{Error, Result};
use crate::geometry;
use crate::graph::{balance_limit, Graph, Separator};

/// One peeling round: which component was attacked and what the cut stage
/// said about it. `sparsity` is absent when the fallback peel fired.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    /// The attacked component, original vertex ids.
    pub component: Vec<u32>,
    /// Sparsity of the cut used, when the pipeline produced one.
    pub sparsity: Option<f64>,
    /// Vertices moved into the separator this round.
    pub added: Vec<u32>,
    /// Certified congestion bracket of the component, when available.
    pub vcong_lb: Option<f64>,
    pub vcong_ub: Option<f64>,
    /// Multiplicative-weights rounds spent on this component.
    pub mwu_rounds: usize,
}

/// A full separator construction with its per-round evidence.
#[derive(Debug, Clone, Serialize)]
pub struct SeparatorRun {
    pub separator: Separator,
    pub rounds: Vec<RoundRecord>,
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Peels sparse cuts off `g` until every remaining component has at most
/// `balance_limit(g.n())` vertices. Handles disconnected input (small
/// components are simply kept) and never fails: component sizes strictly
/// decrease, so at worst the fallback peel reaches a balanced state after
/// finitely many rounds. Per-round seeds are `seed + round index`.
pub fn build_separator(g: &Graph, eps: f64, seed: u64) -> SeparatorRun {
    let start = Instant::now();
    let n = g.n();
    let limit = balance_limit(n);
    let mut sep: Vec<u32> = Vec::new();
    let mut rounds: Vec<RoundRecord> = Vec::new();
    let mut active: Vec<Vec<u32>> = g.components();

    let mut round_idx: u64 = 0;
    loop {
        active.sort_by(|a, b| b.len().cmp(&a.len()).then(a.first().cmp(&b.first())));
        if active.first().is_none_or(|c| c.len() <= limit) {
            break;
        }
        let comp = active.remove(0);
        let (sub, map) = g
            .induced_subgraph(&comp)
            .expect("component lists are valid vertex sets");
        let round_seed = seed.wrapping_add(round_idx);
        round_idx += 1;

        let record;
        let added: Vec<u32>;
        match cutfinder::best_sparse_cut_run(&sub, eps, round_seed) {
            Ok(run) => {
                added = map.lift(&run.report.partition.s);
                record = RoundRecord {
                    component: comp.clone(),
                    sparsity: Some(run.report.sparsity),
                    added: added.clone(),
                    vcong_lb: Some(run.vcong_lb),
                    vcong_ub: Some(run.vcong_ub),
                    mwu_rounds: run.mwu_rounds,
                };
            }
            Err(e) => {
                // Peel the busiest vertex; smallest id on ties. Keeps a
                // certified bracket when the congestion stage got that far.
                let mut best = 0u32;
                for v in 1..sub.n() as u32 {
                    if sub.degree(v) > sub.degree(best) {
                        best = v;
                    }
                }
                added = map.lift(&[best]);
                let (lb, ub, mwu_rounds) = match e {
                    Error::NonConvergence { rounds, lb, ub } => (Some(lb), Some(ub), rounds),
                    _ => (None, None, 0),
                };
                record = RoundRecord {
                    component: comp.clone(),
                    sparsity: None,
                    added: added.clone(),
                    vcong_lb: lb,
                    vcong_ub: ub,
                    mwu_rounds,
                };
            }
        }

        sep.extend(&added);
        rounds.push(record);
        let remaining: Vec<u32> = comp
            .iter()
            .copied()
            .filter(|v| !added.contains(v))
            .collect();
        if !remaining.is_empty() {
            let (rest, rest_map) = g
                .induced_subgraph(&remaining)
                .expect("remainder is a valid vertex set");
            for c in rest.components() {
                active.push(rest_map.lift(&c));
            }
        }
    }

    sep.sort_unstable();
    let keep: Vec<u32> = (0..n as u32).filter(|v| !sep.contains(v)).collect();
    let (rest, rest_map) = g
        .induced_subgraph(&keep)
        .expect("complement of the separator is a valid vertex set");
    let parts: Vec<Vec<u32>> = rest
        .components()
        .iter()
        .map(|c| rest_map.lift(c))
        .collect();

    SeparatorRun {
        separator: Separator { s: sep, parts },
        rounds,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Instance families for the scaling experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFamily {
    /// Random straight segments; `size` is the segment count.
    Segments,
    /// Grid strings producing K_{k,k}; `size` is `k`.
    Grid,
}

/// Coordinate range used for the segment suite.
pub const SUITE_COORD_RANGE: i64 = 1000;

/// Generates a suite instance: the largest connected component of the
/// family's intersection graph. The congestion stages need connectivity,
/// and on these densities the largest component is essentially everything.
pub fn suite_instance(family: InstanceFamily, size: usize, seed: u64) -> Result<Graph> {
    let (_, g) = match family {
        InstanceFamily::Segments => geometry::gen_random_segments(size, SUITE_COORD_RANGE, seed)?,
        InstanceFamily::Grid => geometry::gen_grid_strings(size)?,
    };
    let comps = g.components();
    let largest = comps.first().ok_or_else(|| Error::input("empty instance"))?;
    Ok(g.induced_subgraph(largest)?.0)
}

/// One experiment row. `ratio` is `sep_size / (sqrt(m) * log2(m + 2))`,
/// the quantity the separator size bound normalizes against.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub m: usize,
    pub sep_size: usize,
    pub ratio: f64,
    pub vcong_lb: f64,
    pub vcong_ub: f64,
    pub rounds: usize,
    pub runtime_ms: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "n,m,sep_size,ratio,vcong_lb,vcong_ub,rounds,runtime_ms,seed";

impl ExperimentRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.sep_size,
            self.ratio,
            self.vcong_lb,
            self.vcong_ub,
            self.rounds,
            self.runtime_ms,
            self.seed
        )
    }
}

pub fn size_ratio(sep_size: usize, m: usize) -> f64 {
    sep_size as f64 / ((m as f64).sqrt() * ((m + 2) as f64).log2())
}

/// Runs the separator over a size/seed lattice of one family and collects
/// the rows in (size, seed) order. The congestion bracket column reuses the
/// first round's certificate when there is one and is recomputed otherwise.
pub fn run_experiment(
    family: InstanceFamily,
    sizes: &[usize],
    seeds: &[u64],
    eps: f64,
) -> Result<Vec<ExperimentRow>> {
    if sizes.is_empty() {
        return Err(Error::input("sizes must be nonempty"));
    }
    if seeds.is_empty() {
        return Err(Error::input("seeds must be nonempty"));
    }
    let mut rows = Vec::with_capacity(sizes.len() * seeds.len());
    for &size in sizes {
        for &seed in seeds {
            let g = suite_instance(family, size, seed)?;
            let run = build_separator(&g, eps, seed);
            let bracket = run
                .rounds
                .iter()
                .find_map(|r| r.vcong_lb.map(|lb| (lb, r.vcong_ub.unwrap_or(f64::NAN))));
            let (vcong_lb, vcong_ub) = match bracket {
                Some(b) => b,
                None if g.n() >= 2 => {
                    let mwu = congestion::vcong_mwu(&g, eps, seed)?;
                    (mwu.dual, mwu.primal)
                }
                None => (0.0, 0.0),
            };
            rows.push(ExperimentRow {
                n: g.n(),
                m: g.m(),
                sep_size: run.separator.s.len(),
                ratio: size_ratio(run.separator.s.len(), g.m()),
                vcong_lb,
                vcong_ub,
                rounds: run.rounds.len(),
                runtime_ms: run.wall_ms,
                seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_separator;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                e.push((u, v));
            }
        }
        Graph::new(n, e).unwrap()
    }

    fn check(g: &Graph, run: &SeparatorRun) {
        assert!(
            validate_separator(g, &run.separator).unwrap().ok(),
            "invalid separator: {:?}",
            run.separator
        );
        let mut from_rounds: Vec<u32> = run.rounds.iter().flat_map(|r| r.added.clone()).collect();
        from_rounds.sort_unstable();
        assert_eq!(from_rounds, run.separator.s, "rounds do not add up to S");
        let limit = balance_limit(g.n());
        for r in &run.rounds {
            assert!(r.component.len() > limit, "attacked a small component");
            assert!(!r.added.is_empty(), "a round must take at least one vertex");
        }
    }

    #[test]
    fn p9_small_separator() {
        let g = path_graph(9);
        let run = build_separator(&g, 0.1, 0);
        check(&g, &run);
        assert!(run.separator.s.len() <= 2, "separator {:?}", run.separator.s);
    }

    #[test]
    fn k3_peels_one_vertex() {
        let g = complete(3);
        let run = build_separator(&g, 0.1, 0);
        check(&g, &run);
        assert_eq!(run.separator.s.len(), 1);
        assert_eq!(run.rounds.len(), 1);
        assert!(run.rounds[0].sparsity.is_none(), "clique cut cannot be valid");
    }

    #[test]
    fn edgeless_needs_nothing() {
        let g = Graph::new(5, Vec::new()).unwrap();
        let run = build_separator(&g, 0.1, 0);
        assert!(run.separator.s.is_empty());
        assert_eq!(run.separator.parts.len(), 5);
        assert!(run.rounds.is_empty());
        check(&g, &run);
    }

    #[test]
    fn two_vertex_graphs() {
        // K2: limit is 1, some vertex must go.
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let run = build_separator(&g, 0.1, 0);
        check(&g, &run);
        assert_eq!(run.separator.s.len(), 1);
    }

    #[test]
    fn disconnected_small_components_kept() {
        // Two K3s: each has 3 <= floor(2*6/3) = 4 vertices, nothing to do.
        let mut e = vec![(0, 1), (0, 2), (1, 2)];
        e.extend([(3, 4), (3, 5), (4, 5)]);
        let g = Graph::new(6, e).unwrap();
        let run = build_separator(&g, 0.1, 0);
        assert!(run.separator.s.is_empty());
        check(&g, &run);
    }

    #[test]
    fn grid_c4_instance() {
        let g = suite_instance(InstanceFamily::Grid, 2, 0).unwrap();
        assert_eq!((g.n(), g.m()), (4, 4));
        let run = build_separator(&g, 0.1, 0);
        check(&g, &run);
        assert!(run.separator.s.len() <= 2);
    }

    #[test]
    fn deterministic_runs() {
        let g = suite_instance(InstanceFamily::Segments, 14, 3).unwrap();
        let a = build_separator(&g, 0.1, 5);
        let b = build_separator(&g, 0.1, 5);
        assert_eq!(a.separator, b.separator);
        assert_eq!(a.rounds, b.rounds);
    }

    #[test]
    fn experiment_shape_and_validity() {
        let rows = run_experiment(InstanceFamily::Grid, &[2, 3], &[1, 2], 0.1).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(
            CSV_HEADER.split(',').count(),
            rows[0].csv_line().split(',').count()
        );
        for row in &rows {
            assert!(row.sep_size <= row.n);
            assert!(row.ratio >= 0.0);
        }
        // (size, seed) lattice order.
        assert_eq!(rows[0].n, 4);
        assert_eq!(rows[2].n, 6);
        assert_eq!(rows[0].seed, 1);
        assert_eq!(rows[1].seed, 2);
    }

    #[test]
    fn experiment_rejects_empty_lattice() {
        assert!(run_experiment(InstanceFamily::Grid, &[], &[1], 0.1).is_err());
        assert!(run_experiment(InstanceFamily::Grid, &[2], &[], 0.1).is_err());
    }
}
