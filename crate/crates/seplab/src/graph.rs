//! Simple undirected graphs on vertices `0..n`, plus the partition and
//! separator records the cut pipeline produces.
//!
//! Graphs are immutable after construction: every constructor validates, so
//! downstream code never re-checks edge sanity.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Balance rule for separators: after removing the separator, no component
/// may exceed two thirds of the original vertex count (floor), except that a
/// single vertex always counts as balanced.
pub const BALANCE_NUM: usize = 2;
pub const BALANCE_DEN: usize = 3;

/// Largest component size a separator may leave behind in an `n`-vertex
/// graph.
pub fn balance_limit(n: usize) -> usize {
    ((BALANCE_NUM * n) / BALANCE_DEN).max(1)
}

/// Undirected simple graph. Edges are stored as `(u, v)` with `u < v`,
/// sorted; adjacency lists are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, duplicate edges
    /// (in either orientation) and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut norm: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::input(format!("self-loop at vertex {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::input(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: norm, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` pairs with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Number of unordered vertex pairs, i.e. demands in the all-pairs flow.
    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// Connected components, sorted by decreasing size; ties broken by the
    /// smallest contained vertex. Each component is sorted ascending.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n];
        let mut comps: Vec<Vec<u32>> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start as u32);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced by `keep`, with vertices relabeled `0..keep.len()`
    /// in ascending original order. Returns the relabeled graph and the map
    /// back to original ids.
    pub fn induced_subgraph(&self, keep: &[u32]) -> Result<(Graph, IdMap)> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::input("induced vertex set has duplicates"));
        }
        if let Some(&v) = sorted.last() {
            if v as usize >= self.n {
                return Err(Error::input(format!(
                    "vertex {v} out of range for n = {}",
                    self.n
                )));
            }
        }
        let mut to_sub = vec![None; self.n];
        for (i, &v) in sorted.iter().enumerate() {
            to_sub[v as usize] = Some(i as u32);
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if let (Some(a), Some(b)) = (to_sub[u as usize], to_sub[v as usize]) {
                edges.push((a, b));
            }
        }
        let sub = Graph::new(sorted.len(), edges)?;
        Ok((
            sub,
            IdMap {
                to_orig: sorted,
                to_sub,
            },
        ))
    }
}

/// Bidirectional vertex relabeling produced by [`Graph::induced_subgraph`].
#[derive(Debug, Clone)]
pub struct IdMap {
    to_orig: Vec<u32>,
    to_sub: Vec<Option<u32>>,
}

impl IdMap {
    pub fn to_orig(&self, sub: u32) -> u32 {
        self.to_orig[sub as usize]
    }

    pub fn to_sub(&self, orig: u32) -> Option<u32> {
        self.to_sub[orig as usize]
    }

    /// Maps a set of subgraph ids back to original ids, sorted.
    pub fn lift(&self, sub_ids: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = sub_ids.iter().map(|&s| self.to_orig(s)).collect();
        v.sort_unstable();
        v
    }
}

/// Vertex partition `(A, B, S)`: disjoint, covering, with no edge joining A
/// to B. B may be empty; sparsity bookkeeping elsewhere insists both sides
/// are nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub s: Vec<u32>,
}

/// Separator `S` together with the components of `G \ S`, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub s: Vec<u32>,
    pub parts: Vec<Vec<u32>>,
}

/// One reason a partition or separator fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Vertex appears in more than one block (or twice in one block).
    Overlap(u32),
    /// Vertex appears in no block.
    Missing(u32),
    /// Edge joins A to B.
    CrossEdge(u32, u32),
    /// A component of `G \ S` exceeds the balance limit.
    Oversized { size: usize, limit: usize },
    /// Listed part does not match any component of `G \ S`.
    PartMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap(v) => write!(f, "vertex {v} assigned more than once"),
            Violation::Missing(v) => write!(f, "vertex {v} not assigned to any block"),
            Violation::CrossEdge(u, v) => write!(f, "edge ({u}, {v}) joins A to B"),
            Violation::Oversized { size, limit } => {
                write!(f, "component of size {size} exceeds balance limit {limit}")
            }
            Violation::PartMismatch => write!(f, "parts do not match components of G \\ S"),
        }
    }
}

/// Validation outcome: `ok()` iff no violations were found.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_cover(g: &Graph, blocks: &[&[u32]]) -> Result<Vec<Violation>> {
    let mut violations = Vec::new();
    let mut count = vec![0usize; g.n()];
    for block in blocks {
        for &v in *block {
            if v as usize >= g.n() {
                return Err(Error::input(format!(
                    "vertex {v} out of range for n = {}",
                    g.n()
                )));
            }
            count[v as usize] += 1;
        }
    }
    for (v, &c) in count.iter().enumerate() {
        if c == 0 {
            violations.push(Violation::Missing(v as u32));
        } else if c > 1 {
            violations.push(Violation::Overlap(v as u32));
        }
    }
    Ok(violations)
}

/// Checks that `p` is a valid partition of `g`: blocks disjoint and covering,
/// no A-B edge. Out-of-range ids are an input error rather than a violation.
pub fn validate_partition(g: &Graph, p: &Partition) -> Result<ValidationReport> {
    let mut violations = check_cover(g, &[&p.a, &p.b, &p.s])?;
    let in_a: Vec<bool> = membership(g.n(), &p.a);
    let in_b: Vec<bool> = membership(g.n(), &p.b);
    for &(u, v) in g.edges() {
        let (ui, vi) = (u as usize, v as usize);
        if (in_a[ui] && in_b[vi]) || (in_b[ui] && in_a[vi]) {
            violations.push(Violation::CrossEdge(u, v));
        }
    }
    Ok(ValidationReport { violations })
}

/// Checks that `sep` is a valid balanced separator of `g`: `S` and the parts
/// cover every vertex exactly once, the parts are exactly the components of
/// `G \ S`, and every part is within the balance limit.
pub fn validate_separator(g: &Graph, sep: &Separator) -> Result<ValidationReport> {
    let parts: Vec<&[u32]> = sep.parts.iter().map(|p| p.as_slice()).collect();
    let mut blocks: Vec<&[u32]> = vec![&sep.s];
    blocks.extend(parts);
    let mut violations = check_cover(g, &blocks)?;

    let limit = balance_limit(g.n());
    for part in &sep.parts {
        if part.len() > limit {
            violations.push(Violation::Oversized {
                size: part.len(),
                limit,
            });
        }
    }

    // The parts must be unions of components of G \ S and, more strictly,
    // exactly those components.
    if violations.is_empty() {
        let in_s = membership(g.n(), &sep.s);
        let rest: Vec<u32> = (0..g.n() as u32).filter(|&v| !in_s[v as usize]).collect();
        if let Ok((sub, map)) = g.induced_subgraph(&rest) {
            let mut expected: Vec<Vec<u32>> =
                sub.components().iter().map(|c| map.lift(c)).collect();
            let mut got = sep.parts.clone();
            for p in &mut got {
                p.sort_unstable();
            }
            expected.sort();
            got.sort();
            if expected != got {
                violations.push(Violation::PartMismatch);
            }
        }
    }
    Ok(ValidationReport { violations })
}

fn membership(n: usize, ids: &[u32]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in ids {
        if (v as usize) < n {
            m[v as usize] = true;
        }
    }
    m
}

// ---------------------------------------------------------------------------
// JSON schema: {"n": usize, "edges": [[u, v], ...]}, edges written u < v in
// lexicographic order. The reader accepts any order but rejects anything
// Graph::new rejects.

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(de)?;
        Graph::new(repr.n, repr.edges).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::new(3, vec![(0, 1), (2, 2)]).unwrap_err();
        assert!(err.to_string().contains("self-loop at vertex 2"));
    }

    #[test]
    fn rejects_duplicate_even_reversed() {
        let err = Graph::new(3, vec![(0, 1), (1, 0)]).unwrap_err();
        assert!(err.to_string().contains("duplicate edge (0, 1)"));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Graph::new(2, vec![(0, 5)]).is_err());
    }

    #[test]
    fn components_sorted_by_size() {
        // P3 plus an isolated vertex and a disjoint edge.
        let g = Graph::new(6, vec![(0, 1), (1, 2), (4, 5)]).unwrap();
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![4, 5], vec![3]]);
    }

    #[test]
    fn components_edgeless() {
        let g = Graph::new(3, Vec::new()).unwrap();
        assert_eq!(g.components().len(), 3);
    }

    #[test]
    fn induced_k3_drop_one() {
        let g = Graph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let (sub, map) = g.induced_subgraph(&[0, 1]).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.edges(), &[(0, 1)]);
        assert_eq!(map.to_orig(1), 1);
    }

    #[test]
    fn induced_identity() {
        let g = path(4);
        let (sub, _) = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(sub, g);
    }

    #[test]
    fn induced_relabels_densely() {
        // P4 keeping {0, 2, 3}: only the (2,3) edge survives, relabeled (1,2).
        let g = path(4);
        let (sub, map) = g.induced_subgraph(&[0, 2, 3]).unwrap();
        assert_eq!(sub.edges(), &[(1, 2)]);
        assert_eq!(map.lift(&[1, 2]), vec![2, 3]);
        assert_eq!(map.to_sub(1), None);
    }

    #[test]
    fn partition_p4_valid() {
        let g = path(4);
        let p = Partition {
            a: vec![0],
            b: vec![2, 3],
            s: vec![1],
        };
        assert!(validate_partition(&g, &p).unwrap().ok());
    }

    #[test]
    fn partition_cross_edge_reported() {
        let g = path(4);
        let p = Partition {
            a: vec![0, 1],
            b: vec![2, 3],
            s: vec![],
        };
        let rep = validate_partition(&g, &p).unwrap();
        assert_eq!(rep.violations, vec![Violation::CrossEdge(1, 2)]);
    }

    #[test]
    fn partition_overlap_reported() {
        let g = path(3);
        let p = Partition {
            a: vec![0, 1],
            b: vec![2],
            s: vec![1],
        };
        let rep = validate_partition(&g, &p).unwrap();
        assert!(rep.violations.contains(&Violation::Overlap(1)));
    }

    #[test]
    fn partition_out_of_range_is_error() {
        let g = path(3);
        let p = Partition {
            a: vec![0, 7],
            b: vec![2],
            s: vec![1],
        };
        assert!(validate_partition(&g, &p).is_err());
    }

    #[test]
    fn separator_p9_center() {
        let g = path(9);
        let sep = Separator {
            s: vec![4],
            parts: vec![vec![0, 1, 2, 3], vec![5, 6, 7, 8]],
        };
        assert!(validate_separator(&g, &sep).unwrap().ok());
    }

    #[test]
    fn separator_p9_off_center_fails() {
        let g = path(9);
        let sep = Separator {
            s: vec![1],
            parts: vec![vec![0], vec![2, 3, 4, 5, 6, 7, 8]],
        };
        let rep = validate_separator(&g, &sep).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation::Oversized { size: 7, limit: 6 }]
        );
    }

    #[test]
    fn separator_k4_three_vertices() {
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let sep = Separator {
            s: vec![0, 1, 2],
            parts: vec![vec![3]],
        };
        assert!(validate_separator(&g, &sep).unwrap().ok());
    }

    #[test]
    fn separator_part_mismatch() {
        // Claiming two components where G \ S has one connected piece.
        let g = path(5);
        let sep = Separator {
            s: vec![4],
            parts: vec![vec![0, 1], vec![2, 3]],
        };
        let rep = validate_separator(&g, &sep).unwrap();
        assert!(rep.violations.contains(&Violation::PartMismatch));
    }

    #[test]
    fn balance_limit_edge_cases() {
        assert_eq!(balance_limit(1), 1); // a lone vertex is always balanced
        assert_eq!(balance_limit(2), 1);
        assert_eq!(balance_limit(3), 2);
        assert_eq!(balance_limit(9), 6);
    }

    #[test]
    fn json_round_trip_sorted() {
        let g = Graph::new(4, vec![(3, 2), (1, 0), (0, 2)]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"n":4,"edges":[[0,1],[0,2],[2,3]]}"#);
        let back: Graph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_rejects_bad_edges() {
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[0,1],[1,0]]}"#).is_err());
    }
}
