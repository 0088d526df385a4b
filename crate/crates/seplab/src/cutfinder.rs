//! From a dual vertex weighting to a low-sparsity vertex partition.
//!
//! Two steps. First the weighting's shortest-path pseudometric is pushed
//! onto a line: distance-to-subset coordinates over random subsets of
//! geometrically growing sizes, keeping the candidate with the largest
//! total pairwise spread. Each candidate is 1-Lipschitz by construction.
//! Second, a threshold sweep over the line: for every split point the edges
//! crossing it form a bipartite graph, a minimum vertex cover of that graph
//! is a smallest vertex cut between the sides, and the best valid
//! (A, B, S) over all thresholds and cover orientations wins.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::congestion::{self, VertexWeighting};
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::matching;
use crate::par;
use crate::shortest;

/// One line coordinate per vertex, with the evidence that it is usable:
/// the total pairwise spread it attains and its measured Lipschitz ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEmbedding {
    pub f: Vec<f64>,
    /// `sum over pairs |f(u) - f(v)|` for this coordinate.
    pub spread: f64,
    /// `max over edges |f(u) - f(v)| / d_s(u, v)`, 0/0 counted as 0.
    /// Distance-to-subset coordinates keep this at most 1.
    pub lipschitz_certificate: f64,
    /// The subset whose distance function won.
    pub subset: Vec<u32>,
}

/// Total pairwise spread of a coordinate vector. Sorting turns the sum of
/// `|f(u) - f(v)|` over pairs into a weighted linear scan.
pub fn spread_of(f: &[f64]) -> f64 {
    let mut v = f.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    v.iter()
        .enumerate()
        .map(|(i, x)| x * (2.0 * i as f64 - (n as f64 - 1.0)))
        .sum()
}

/// Worst edge ratio `|f(u) - f(v)| / d_s(u, v)`. The direct edge is always
/// a shortest path under vertex-induced lengths, so checking edges covers
/// the whole metric.
pub fn lipschitz_certificate(g: &Graph, s: &VertexWeighting, f: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &(u, v) in g.edges() {
        let num = (f[u as usize] - f[v as usize]).abs();
        if num == 0.0 {
            continue;
        }
        let ratio = num / s.edge_weight(u, v);
        if ratio > worst {
            worst = ratio;
        }
    }
    worst
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Lines the graph up along the weighting's metric: draws random subsets of
/// sizes 1, 2, 4, ... (several per size), takes distance-to-subset as the
/// coordinate, and keeps the candidate with maximum spread. Deterministic
/// for a fixed seed. The graph must be connected; `s` is expected to be the
/// pair-sum-normalized dual weighting but any nonnegative weighting works.
pub fn bourgain_line(g: &Graph, s: &VertexWeighting, seed: u64) -> LineEmbedding {
    let n = g.n();
    assert_eq!(s.s.len(), n, "weighting length does not match the graph");
    assert!(g.is_connected(), "line embedding needs a connected graph");
    if n == 1 {
        return LineEmbedding {
            f: vec![0.0],
            spread: 0.0,
            lipschitz_certificate: 0.0,
            subset: vec![0],
        };
    }

    let draws = ((2.0 * (n as f64).log2()).ceil() as usize).max(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subsets: Vec<Vec<u32>> = Vec::new();
    for scale in 0..=ceil_log2(n) {
        let size = (1usize << scale).min(n);
        for _ in 0..draws {
            let mut t: Vec<u32> = rand::seq::index::sample(&mut rng, n, size)
                .iter()
                .map(|x| x as u32)
                .collect();
            t.sort_unstable();
            subsets.push(t);
        }
    }

    let cands: Vec<(Vec<f64>, f64)> = par::map_indexed(subsets.len(), |i| {
        let f = shortest::dist_to_set(g, &s.s, &subsets[i]);
        let spread = spread_of(&f);
        (f, spread)
    });
    let mut best = 0usize;
    for (i, c) in cands.iter().enumerate() {
        if c.1 > cands[best].1 {
            best = i;
        }
    }
    let (f, spread) = cands.into_iter().nth(best).unwrap();
    let cert = lipschitz_certificate(g, s, &f);
    LineEmbedding {
        f,
        spread,
        lipschitz_certificate: cert,
        subset: subsets.swap_remove(best),
    }
}

/// A threshold cut: the partition, its sparsity
/// `|S| / ((|A| + |S|) * (|B| + |S|))`, and the sweep position that
/// produced it (number of vertices left of the threshold).
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub partition: Partition,
    pub sparsity: f64,
    pub threshold: usize,
}

/// Cut candidates at one threshold. `lsize` vertices lie left of the gap.
/// Returns the best valid (A nonempty, B nonempty) candidate, if any.
fn best_cut_at(g: &Graph, order: &[u32], pos: &[u32], lsize: usize) -> Option<(f64, Partition)> {
    let n = g.n();
    let mut crossing: Vec<(u32, u32)> = Vec::new();
    for &(u, v) in g.edges() {
        let (pu, pv) = (pos[u as usize] as usize, pos[v as usize] as usize);
        if pu < lsize && pv >= lsize {
            crossing.push((u, v));
        } else if pv < lsize && pu >= lsize {
            crossing.push((v, u));
        }
    }
    if crossing.is_empty() {
        // Only possible when the sweep splits a disconnected graph cleanly;
        // the empty cut is then valid and free.
        let partition = build_partition(order, lsize, &[], n);
        return Some((0.0, partition));
    }

    let mut lefts: Vec<u32> = crossing.iter().map(|e| e.0).collect();
    lefts.sort_unstable();
    lefts.dedup();
    let mut rights: Vec<u32> = crossing.iter().map(|e| e.1).collect();
    rights.sort_unstable();
    rights.dedup();
    let pairs: Vec<(usize, usize)> = crossing
        .iter()
        .map(|&(l, r)| {
            (
                lefts.binary_search(&l).unwrap(),
                rights.binary_search(&r).unwrap(),
            )
        })
        .collect();

    // Four cover candidates: the exact minimum cut oriented from each side,
    // plus both naive all-endpoint covers. The naive ones keep the sweep
    // from failing where the minimum cut swallows a whole side, and make
    // "never worse than naive rounding" true by construction.
    let koenig_l = {
        let c = matching::min_vertex_cover(lefts.len(), rights.len(), &pairs);
        let mut s: Vec<u32> = c.left.iter().map(|&i| lefts[i]).collect();
        s.extend(c.right.iter().map(|&i| rights[i]));
        s
    };
    let koenig_r = {
        let flipped: Vec<(usize, usize)> = pairs.iter().map(|&(l, r)| (r, l)).collect();
        let c = matching::min_vertex_cover(rights.len(), lefts.len(), &flipped);
        let mut s: Vec<u32> = c.left.iter().map(|&i| rights[i]).collect();
        s.extend(c.right.iter().map(|&i| lefts[i]));
        s
    };

    let mut best: Option<(f64, Partition)> = None;
    for cand in [koenig_l, koenig_r, lefts.clone(), rights.clone()] {
        let partition = build_partition(order, lsize, &cand, n);
        if partition.a.is_empty() || partition.b.is_empty() {
            continue;
        }
        let (na, nb, ns) = (
            partition.a.len() as f64,
            partition.b.len() as f64,
            partition.s.len() as f64,
        );
        let sparsity = ns / ((na + ns) * (nb + ns));
        if best.as_ref().is_none_or(|(bs, _)| sparsity < *bs) {
            best = Some((sparsity, partition));
        }
    }
    best
}

fn build_partition(order: &[u32], lsize: usize, cut: &[u32], n: usize) -> Partition {
    let mut in_cut = vec![false; n];
    for &v in cut {
        in_cut[v as usize] = true;
    }
    let mut a: Vec<u32> = order[..lsize]
        .iter()
        .copied()
        .filter(|&v| !in_cut[v as usize])
        .collect();
    let mut b: Vec<u32> = order[lsize..]
        .iter()
        .copied()
        .filter(|&v| !in_cut[v as usize])
        .collect();
    a.sort_unstable();
    b.sort_unstable();
    let mut s = cut.to_vec();
    s.sort_unstable();
    Partition { a, b, s }
}

/// Sweeps every threshold of the embedding, cutting crossing edges with a
/// minimum vertex cover from either orientation, and returns the
/// minimum-sparsity valid partition. Ties go to the leftmost threshold.
pub fn sweep_round(g: &Graph, emb: &LineEmbedding) -> Result<SparsityReport> {
    let n = g.n();
    assert_eq!(emb.f.len(), n, "embedding length does not match the graph");
    let f = &emb.f;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| f[a as usize].total_cmp(&f[b as usize]).then(a.cmp(&b)));
    if n < 2 || f[order[0] as usize] == f[order[n - 1] as usize] {
        return Err(Error::NoSpread);
    }
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }

    let evals: Vec<Option<(f64, Partition)>> = {
        let (order, pos) = (&order, &pos);
        par::map_indexed(n - 1, move |gap| best_cut_at(g, order, pos, gap + 1))
    };
    let mut best: Option<(f64, usize, Partition)> = None;
    for (gap, eval) in evals.into_iter().enumerate() {
        if let Some((sparsity, partition)) = eval {
            if best.as_ref().is_none_or(|(bs, _, _)| sparsity < *bs) {
                best = Some((sparsity, gap + 1, partition));
            }
        }
    }
    let (sparsity, threshold, partition) = best.ok_or(Error::NoValidCut)?;
    Ok(SparsityReport {
        partition,
        sparsity,
        threshold,
    })
}

/// Full pipeline result: the cut plus the congestion and embedding evidence
/// that produced it.
#[derive(Debug, Clone)]
pub struct SparseCutRun {
    pub report: SparsityReport,
    pub vcong_lb: f64,
    pub vcong_ub: f64,
    pub mwu_rounds: usize,
    pub spread: f64,
    pub lipschitz_certificate: f64,
}

/// Congestion duality, line embedding, threshold sweep, in that order, with
/// the intermediate evidence kept.
pub fn best_sparse_cut_run(g: &Graph, eps: f64, seed: u64) -> Result<SparseCutRun> {
    let mwu = congestion::vcong_mwu(g, eps, seed)?;
    let emb = bourgain_line(g, &mwu.weighting, seed);
    let report = sweep_round(g, &emb)?;
    Ok(SparseCutRun {
        report,
        vcong_lb: mwu.dual,
        vcong_ub: mwu.primal,
        mwu_rounds: mwu.rounds,
        spread: emb.spread,
        lipschitz_certificate: emb.lipschitz_certificate,
    })
}

/// [`best_sparse_cut_run`] without the evidence.
pub fn best_sparse_cut(g: &Graph, eps: f64, seed: u64) -> Result<SparsityReport> {
    Ok(best_sparse_cut_run(g, eps, seed)?.report)
}
