//! All-pairs unit-demand multicommodity flow and its vertex congestion.
//!
//! Every unordered vertex pair ships one unit of flow, split fractionally
//! over paths. A vertex it passes through is charged fully when interior and
//! half when it is one of the two endpoints, so the congestion of any vertex
//! is at least `(n - 1) / 2`. `vcong` is the congestion value of the best
//! possible routing. Two solvers: an exact path-enumeration LP for small
//! graphs, and a multiplicative-weights scheme producing a certified
//! `(1 + eps)` bracket for everything else.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lp;
use crate::par;
use crate::shortest::{self, dijkstra_paths, edge_len};

/// Per-pair path weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Largest `n` the exact solver accepts unless overridden.
pub const DEFAULT_EXACT_CAP: usize = 8;

/// Weighted path bundle routing one demand: `(path, weight)` entries.
pub type WeightedPaths = Vec<(Vec<u32>, f64)>;

/// One bundle per unordered pair, keyed `(u, v)` with `u < v`.
pub type PairPaths = BTreeMap<(u32, u32), WeightedPaths>;

/// Fractional routing of all `n(n-1)/2` unit demands.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    n: usize,
    per_pair: PairPaths,
}

impl Flow {
    /// Builds and structurally validates a flow: one entry per unordered
    /// pair of `0..n`, each path running from the smaller endpoint to the
    /// larger, simple, with nonnegative weights summing to one.
    pub fn new(n: usize, per_pair: PairPaths) -> Result<Self> {
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if !per_pair.contains_key(&(u, v)) {
                    return Err(Error::input(format!("missing paths for pair ({u}, {v})")));
                }
            }
        }
        if per_pair.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::input("flow keys do not match the vertex pairs"));
        }
        for (&(u, v), paths) in &per_pair {
            if paths.is_empty() {
                return Err(Error::input(format!("no paths for pair ({u}, {v})")));
            }
            let mut total = 0.0;
            for (path, w) in paths {
                if !w.is_finite() || *w < 0.0 {
                    return Err(Error::input(format!(
                        "negative or non-finite weight on pair ({u}, {v})"
            )));
                }
                total += w;
                if path.first() != Some(&u) || path.last() != Some(&v) {
                    return Err(Error::input(format!(
                        "path for pair ({u}, {v}) does not join its endpoints"
                    )));
                }
                let mut seen = path.clone();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::input(format!(
                        "path for pair ({u}, {v}) repeats a vertex"
                    )));
                }
                if seen.last().is_some_and(|&x| x as usize >= n) {
                    return Err(Error::input(format!(
                        "path for pair ({u}, {v}) leaves the vertex range"
                    )));
                }
            }
            if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(Error::input(format!(
                    "weights for pair ({u}, {v}) sum to {total}, not 1"
                )));
            }
        }
        Ok(Flow { n, per_pair })
    }

    /// Flow that routes every pair along exactly one path, weight one.
    pub fn from_single_paths(n: usize, paths: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut per_pair = BTreeMap::new();
        for p in paths {
            let (Some(&a), Some(&b)) = (p.first(), p.last()) else {
                return Err(Error::input("empty path"));
            };
            let path = if a < b {
                p
            } else {
                let mut r = p;
                r.reverse();
                r
            };
            let key = (path[0], *path.last().unwrap());
            if per_pair.insert(key, vec![(path, 1.0)]).is_some() {
                return Err(Error::input(format!(
                    "two paths for pair ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Flow::new(n, per_pair)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(u32, u32), &WeightedPaths)> {
        self.per_pair.iter()
    }

    pub fn paths_for(&self, u: u32, v: u32) -> Option<&[(Vec<u32>, f64)]> {
        self.per_pair
            .get(&(u.min(v), u.max(v)))
            .map(|v| v.as_slice())
    }

    /// Checks the paths against an actual graph: every hop must be an edge.
    pub fn validate_for(&self, g: &Graph) -> Result<()> {
        if self.n != g.n() {
            return Err(Error::input(format!(
                "flow is on {} vertices, graph has {}",
                self.n,
                g.n()
            )));
        }
        for (&(u, v), paths) in &self.per_pair {
            for (path, _) in paths {
                for hop in path.windows(2) {
                    if !g.has_edge(hop[0], hop[1]) {
                        return Err(Error::input(format!(
                            "path for pair ({u}, {v}) uses non-edge ({}, {})",
                            hop[0], hop[1]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-vertex congestion of one routing.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionProfile {
    pub per_vertex: Vec<f64>,
}

impl CongestionProfile {
    pub fn max_congestion(&self) -> f64 {
        self.per_vertex.iter().copied().fold(0.0, f64::max)
    }

    /// Vertex attaining the maximum, smallest id on ties.
    pub fn argmax_vertex(&self) -> u32 {
        let mut best = 0usize;
        for (i, &c) in self.per_vertex.iter().enumerate() {
            if c > self.per_vertex[best] {
                best = i;
            }
        }
        best as u32
    }
}

/// Congestion of `f` on `g`: interior vertices charged fully, endpoints half.
pub fn congestion_of(g: &Graph, f: &Flow) -> Result<CongestionProfile> {
    f.validate_for(g)?;
    let mut per_vertex = vec![0.0; g.n()];
    for (_, paths) in f.pairs() {
        for (path, w) in paths {
            per_vertex[path[0] as usize] += 0.5 * w;
            per_vertex[*path.last().unwrap() as usize] += 0.5 * w;
            for &mid in &path[1..path.len() - 1] {
                per_vertex[mid as usize] += w;
            }
        }
    }
    Ok(CongestionProfile { per_vertex })
}

/// Nonnegative vertex weighting, the dual object of the congestion LP.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeighting {
    pub s: Vec<f64>,
}

impl VertexWeighting {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::input("vertex weights must be nonnegative"));
        }
        Ok(VertexWeighting { s })
    }

    /// Weight of an edge: the mean of its endpoint weights.
    pub fn edge_weight(&self, u: u32, v: u32) -> f64 {
        edge_len(&self.s, u, v)
    }

    pub fn sum(&self) -> f64 {
        self.s.iter().sum()
    }
}

/// The two sides of the duality identity: the raw weight sum and the sum of
/// induced shortest-path distances over all pairs. For any weighting,
/// `pair_sum / weight_sum` is a certified lower bound on `vcong`.
#[derive(Debug, Clone, Copy)]
pub struct DualObjective {
    pub weight_sum: f64,
    pub pair_sum: f64,
}

impl DualObjective {
    pub fn is_degenerate(&self) -> bool {
        self.pair_sum <= 0.0
    }

    /// `sum s(v)` after rescaling s to pair-sum one; `None` when degenerate.
    pub fn normalized_weight_sum(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| self.weight_sum / self.pair_sum)
    }

    /// Certified lower bound on `vcong`; `None` when degenerate.
    pub fn vcong_lower_bound(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| self.pair_sum / self.weight_sum)
    }
}

/// Evaluates the dual objective of a weighting on a connected graph.
pub fn dual_objective(g: &Graph, w: &VertexWeighting) -> Result<DualObjective> {
    if w.s.len() != g.n() {
        return Err(Error::input("weighting length does not match the graph"));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let all: Vec<shortest::ShortestPaths> =
        par::map_indexed(g.n(), |u| dijkstra_paths(g, &w.s, u as u32));
    Ok(DualObjective {
        weight_sum: w.sum(),
        pair_sum: shortest::pair_sum(&all),
    })
}

// ---------------------------------------------------------------------------
// Exact solver: enumerate all simple paths per pair, solve the min-max LP.

fn enumerate_paths(g: &Graph, u: u32, v: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut stack = vec![u];
    let mut used = vec![false; g.n()];
    used[u as usize] = true;
    // Iterative DFS over neighbor indices, ascending, so the column order is
    // deterministic.
    let mut iters: Vec<usize> = vec![0];
    while let Some(&cur) = stack.last() {
        let idx = *iters.last().unwrap();
        let neigh = g.neighbors(cur);
        if idx >= neigh.len() {
            stack.pop();
            iters.pop();
            used[cur as usize] = false;
            if let Some(top) = iters.last_mut() {
                *top += 1;
            }
            continue;
        }
        let next = neigh[idx];
        if next == v {
            let mut p = stack.clone();
            p.push(v);
            out.push(p);
            *iters.last_mut().unwrap() += 1;
            continue;
        }
        if used[next as usize] {
            *iters.last_mut().unwrap() += 1;
            continue;
        }
        used[next as usize] = true;
        stack.push(next);
        iters.push(0);
    }
    out
}

/// Exact `vcong` with the default size cap.
pub fn vcong_exact(g: &Graph) -> Result<(f64, Flow)> {
    vcong_exact_with_cap(g, DEFAULT_EXACT_CAP)
}

/// Exact `vcong` via the path-enumeration LP, with an explicit size cap.
/// Returns the optimum and a witness routing attaining it.
pub fn vcong_exact_with_cap(g: &Graph, max_n: usize) -> Result<(f64, Flow)> {
    let n = g.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max_n });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if n <= 1 {
        return Ok((0.0, Flow::new(n, BTreeMap::new())?));
    }

    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            pairs.push((u, v));
        }
    }
    let path_lists: Vec<Vec<Vec<u32>>> =
        par::map_indexed(pairs.len(), |i| enumerate_paths(g, pairs[i].0, pairs[i].1));

    let total_paths: usize = path_lists.iter().map(|l| l.len()).sum();
    let k = pairs.len();
    let rows = k + n;
    let cols = total_paths + 1 + n; // paths, t, slacks
    let t_col = total_paths;
    let mut a = vec![0.0; rows * cols];
    let mut col = 0usize;
    for (pi, list) in path_lists.iter().enumerate() {
        for path in list {
            a[pi * cols + col] = 1.0;
            let vrow = |w: u32| (k + w as usize) * cols + col;
            a[vrow(path[0])] += 0.5;
            a[vrow(*path.last().unwrap())] += 0.5;
            for &mid in &path[1..path.len() - 1] {
                a[vrow(mid)] += 1.0;
            }
            col += 1;
        }
    }
    for w in 0..n {
        a[(k + w) * cols + t_col] = -1.0;
        a[(k + w) * cols + t_col + 1 + w] = 1.0;
    }
    let mut b = vec![0.0; rows];
    b[..k].fill(1.0);
    let mut c = vec![0.0; cols];
    c[t_col] = 1.0;

    let sol = lp::solve(&lp::StandardForm {
        rows,
        cols,
        a,
        b,
        c,
    })?;

    let mut per_pair = BTreeMap::new();
    let mut col = 0usize;
    for (pi, list) in path_lists.iter().enumerate() {
        let mut entries: Vec<(Vec<u32>, f64)> = Vec::new();
        let mut total = 0.0;
        for path in list {
            let w = sol.x[col];
            if w > 1e-12 {
                entries.push((path.clone(), w));
                total += w;
            }
            col += 1;
        }
        // The LP satisfies the unit row only to solver precision.
        for e in &mut entries {
            e.1 /= total;
        }
        per_pair.insert(pairs[pi], entries);
    }
    Ok((sol.value, Flow::new(n, per_pair)?))
}

// ---------------------------------------------------------------------------
// Multiplicative-weights solver.

/// Certified bracket produced by [`vcong_mwu`]: the flow's max congestion is
/// the upper end, the dual weighting's bound the lower end, and
/// `primal <= (1 + eps) * dual` at convergence.
#[derive(Debug, Clone)]
pub struct MwuOutcome {
    /// Max congestion of `flow` (upper bound on vcong).
    pub primal: f64,
    pub flow: Flow,
    /// Dual weighting, normalized so its distance pair-sum is one.
    pub weighting: VertexWeighting,
    /// Certified lower bound on vcong, equal to `1 / weighting.sum()`.
    pub dual: f64,
    pub rounds: usize,
}

impl MwuOutcome {
    pub fn bracket(&self) -> (f64, f64) {
        (self.dual, self.primal)
    }
}

/// Relative jitter applied to the initial vertex lengths; breaks symmetric
/// shortest-path ties differently for different seeds.
const MWU_JITTER: f64 = 1e-3;

/// Length-update step size as a fraction of eps.
const MWU_ETA_FACTOR: f64 = 0.5;

/// How often the time-averaged length function is tried as a dual witness.
const MWU_AVG_CHECK: usize = 8;

fn mwu_round_cap(n: usize, eps: f64) -> usize {
    let by_theory = (4.0 * ((n as f64) + 2.0).ln() / (eps * eps)).ceil() as usize;
    by_theory.clamp(1_000, 20_000)
}

/// Approximates `vcong` on a connected graph: routes every demand along
/// shortest paths under evolving vertex lengths, averages the routings, and
/// stops once the averaged congestion is within `(1 + eps)` of the best
/// dual lower bound seen. Deterministic for fixed `(g, eps, seed)`.
pub fn vcong_mwu(g: &Graph, eps: f64, seed: u64) -> Result<MwuOutcome> {
    let n = g.n();
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::input("eps must lie in (0, 0.5]"));
    }
    if n < 2 {
        return Err(Error::input("congestion needs at least two vertices"));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambda: Vec<f64> = (0..n)
        .map(|_| 1.0 + MWU_JITTER * rng.gen::<f64>())
        .collect();
    let eta = MWU_ETA_FACTOR * eps;
    let cap = mwu_round_cap(n, eps);

    let mut cum_cong = vec![0.0; n];
    let mut avg_lambda = vec![0.0; n];
    // Per pair: accumulated shortest paths with hit counts.
    type PathCounts = Vec<(Vec<u32>, u64)>;
    let mut acc: BTreeMap<(u32, u32), PathCounts> = BTreeMap::new();
    let mut best_lb = 0.0f64;
    let mut best_s: Vec<f64> = lambda.clone();
    let mut best_ps = f64::INFINITY;
    let mut primal = f64::INFINITY;
    let mut converged = false;
    let mut rounds = 0usize;

    for t in 1..=cap {
        rounds = t;
        // One Dijkstra per source; demands (u, v) are routed from u < v.
        struct SourceResult {
            cong: Vec<f64>,
            dist_part: f64,
            paths: Vec<Vec<u32>>,
        }
        let per_source: Vec<SourceResult> = {
            let lambda = &lambda;
            par::map_indexed(n, move |u| {
                let sp = dijkstra_paths(g, lambda, u as u32);
                let mut cong = vec![0.0; n];
                let mut dist_part = 0.0;
                let mut paths = Vec::with_capacity(n - u - 1);
                for v in (u + 1)..n {
                    dist_part += sp.dist[v];
                    let p = &sp.paths[v];
                    cong[p[0] as usize] += 0.5;
                    cong[*p.last().unwrap() as usize] += 0.5;
                    for &mid in &p[1..p.len() - 1] {
                        cong[mid as usize] += 1.0;
                    }
                    paths.push(p.clone());
                }
                SourceResult {
                    cong,
                    dist_part,
                    paths,
                }
            })
        };

        // Fixed-order reductions keep the run bit-identical across thread
        // counts.
        let mut round_cong = vec![0.0; n];
        let mut pairsum = 0.0;
        for sr in &per_source {
            for (a, b) in round_cong.iter_mut().zip(sr.cong.iter()) {
                *a += b;
            }
            pairsum += sr.dist_part;
        }
        let lambda_sum: f64 = lambda.iter().sum();
        let lb = pairsum / lambda_sum;
        if lb > best_lb {
            best_lb = lb;
            best_s = lambda.clone();
            best_ps = pairsum;
        }
        for (a, l) in avg_lambda.iter_mut().zip(lambda.iter()) {
            *a += l / lambda_sum;
        }

        for (u, sr) in per_source.iter().enumerate() {
            for (off, path) in sr.paths.iter().enumerate() {
                let v = (u + 1 + off) as u32;
                let slot = acc.entry((u as u32, v)).or_default();
                match slot.iter_mut().find(|(p, _)| p == path) {
                    Some((_, cnt)) => *cnt += 1,
                    None => slot.push((path.clone(), 1)),
                }
            }
        }
        for (c, r) in cum_cong.iter_mut().zip(round_cong.iter()) {
            *c += r;
        }
        primal = cum_cong.iter().copied().fold(0.0, f64::max) / t as f64;

        // Every few rounds the time-averaged lengths get a shot at being the
        // better dual witness.
        if t % MWU_AVG_CHECK == 0 {
            let all: Vec<shortest::ShortestPaths> =
                par::map_indexed(n, |u| dijkstra_paths(g, &avg_lambda, u as u32));
            let ps = shortest::pair_sum(&all);
            let sum: f64 = avg_lambda.iter().sum();
            if ps / sum > best_lb {
                best_lb = ps / sum;
                best_s = avg_lambda.clone();
                best_ps = ps;
            }
        }

        if primal <= (1.0 + eps) * best_lb {
            converged = true;
            break;
        }

        let cmax = round_cong.iter().copied().fold(0.0, f64::max);
        let scale = 1.0 / lambda.iter().copied().fold(0.0, f64::max);
        for (l, c) in lambda.iter_mut().zip(round_cong.iter()) {
            *l = *l * scale * (1.0 + eta * c / cmax);
        }
    }

    if !converged {
        return Err(Error::NonConvergence {
            rounds,
            lb: best_lb,
            ub: primal,
        });
    }

    let total = rounds as f64;
    let mut per_pair = BTreeMap::new();
    for ((u, v), entries) in acc {
        let list: Vec<(Vec<u32>, f64)> = entries
            .into_iter()
            .map(|(p, cnt)| (p, cnt as f64 / total))
            .collect();
        per_pair.insert((u, v), list);
    }
    let flow = Flow::new(n, per_pair)?;
    let profile = congestion_of(g, &flow)?;

    if best_ps.is_infinite() {
        return Err(Error::NonConvergence {
            rounds,
            lb: best_lb,
            ub: primal,
        });
    }
    let s: Vec<f64> = best_s.iter().map(|x| x / best_ps).collect();
    let weighting = VertexWeighting::new(s)?;

    Ok(MwuOutcome {
        primal: profile.max_congestion(),
        flow,
        weighting,
        dual: best_lb,
        rounds,
    })
}
