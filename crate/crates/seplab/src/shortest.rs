//! Shortest paths under nonnegative vertex weights.
//!
//! The length of a path is the sum of `(s(a) + s(b)) / 2` over its edges,
//! which equals: interior vertices count fully, the two endpoints half each.
//! Ties between equal-length paths are broken toward the lexicographically
//! smallest vertex sequence, which keeps every caller deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::Graph;

pub fn edge_len(s: &[f64], u: u32, v: u32) -> f64 {
    0.5 * (s[u as usize] + s[v as usize])
}

/// Single-source result: distances plus the full tie-broken path to every
/// reachable vertex (unreachable: infinite distance, empty path).
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub paths: Vec<Vec<u32>>,
}

struct HeapItem {
    dist: f64,
    vertex: u32,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    // Reversed: BinaryHeap is a max-heap, we want smallest (dist, vertex).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// True when `prefix ++ [last]` is lexicographically smaller than `incumbent`.
fn cand_less(prefix: &[u32], last: u32, incumbent: &[u32]) -> bool {
    let cand = prefix.iter().copied().chain(std::iter::once(last));
    cand.cmp(incumbent.iter().copied()) == Ordering::Less
}

/// Dijkstra from `source` with vertex weights `s` (all nonnegative).
pub fn dijkstra_paths(g: &Graph, s: &[f64], source: u32) -> ShortestPaths {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut paths: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    paths[source as usize] = vec![source];
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        debug_assert_eq!(d, dist[v as usize]);
        for &w in g.neighbors(v) {
            if settled[w as usize] {
                continue;
            }
            let nd = d + edge_len(s, v, w);
            match nd.partial_cmp(&dist[w as usize]) {
                Some(Ordering::Less) => {
                    dist[w as usize] = nd;
                    let mut p = paths[v as usize].clone();
                    p.push(w);
                    paths[w as usize] = p;
                    heap.push(HeapItem { dist: nd, vertex: w });
                }
                // Same length: keep the lexicographically smaller route.
                Some(Ordering::Equal) if cand_less(&paths[v as usize], w, &paths[w as usize]) => {
                    let mut p = paths[v as usize].clone();
                    p.push(w);
                    paths[w as usize] = p;
                }
                _ => {}
            }
        }
    }
    ShortestPaths { dist, paths }
}

/// Distance from every vertex to the nearest member of `targets`
/// (multi-source Dijkstra, distances only).
pub fn dist_to_set(g: &Graph, s: &[f64], targets: &[u32]) -> Vec<f64> {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &t in targets {
        dist[t as usize] = 0.0;
        heap.push(HeapItem {
            dist: 0.0,
            vertex: t,
        });
    }
    while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        for &w in g.neighbors(v) {
            let nd = d + edge_len(s, v, w);
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                heap.push(HeapItem { dist: nd, vertex: w });
            }
        }
    }
    dist
}

/// Pairwise distance sum `sum_{u<v} d_s(u, v)`, accumulated in a fixed
/// order. Infinite when the graph is disconnected.
pub fn pair_sum(all: &[ShortestPaths]) -> f64 {
    let mut total = 0.0;
    for (u, sp) in all.iter().enumerate() {
        for &d in &sp.dist[u + 1..] {
            total += d;
        }
    }
    total
}
