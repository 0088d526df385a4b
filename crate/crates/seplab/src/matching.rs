//! Bipartite matching and minimum vertex cover.
//!
//! The sweep stage needs minimum vertex covers of the edges crossing a
//! threshold cut. Kuhn's augmenting-path matching plus the alternating-path
//! construction from König's theorem give one cover per orientation; both
//! have matching size, but they delete different vertices, and the caller
//! cares which side survives.

/// Minimum vertex cover of a bipartite graph with `nl` left and `nr` right
/// vertices, given by index pairs. Both lists come back sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn try_augment(
    u: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_r: &mut [Option<usize>],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match match_r[v] {
            None => true,
            Some(u2) => try_augment(u2, adj, seen, match_r),
        };
        if free {
            match_r[v] = Some(u);
            return true;
        }
    }
    false
}

pub fn min_vertex_cover(nl: usize, nr: usize, edges: &[(usize, usize)]) -> Cover {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nl];
    for &(l, r) in edges {
        assert!(l < nl && r < nr, "edge ({l}, {r}) out of range");
        adj[l].push(r);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }

    let mut match_r: Vec<Option<usize>> = vec![None; nr];
    for u in 0..nl {
        let mut seen = vec![false; nr];
        try_augment(u, &adj, &mut seen, &mut match_r);
    }
    let mut match_l: Vec<Option<usize>> = vec![None; nl];
    for (v, m) in match_r.iter().enumerate() {
        if let Some(u) = m {
            match_l[*u] = Some(v);
        }
    }

    // Alternating BFS from unmatched left vertices; the cover is the
    // unreached left side plus the reached right side.
    let mut vis_l = vec![false; nl];
    let mut vis_r = vec![false; nr];
    let mut queue: Vec<usize> = (0..nl).filter(|&u| match_l[u].is_none()).collect();
    for &u in &queue {
        vis_l[u] = true;
    }
    while let Some(u) = queue.pop() {
        for &v in &adj[u] {
            if vis_r[v] {
                continue;
            }
            vis_r[v] = true;
            if let Some(u2) = match_r[v] {
                if !vis_l[u2] {
                    vis_l[u2] = true;
                    queue.push(u2);
                }
            }
        }
    }

    Cover {
        left: (0..nl).filter(|&u| !vis_l[u]).collect(),
        right: (0..nr).filter(|&v| vis_r[v]).collect(),
    }
}
