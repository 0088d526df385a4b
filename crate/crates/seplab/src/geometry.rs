//! Exact planar geometry for string-graph instances.
//!
//! Curves are integer polylines; all predicates are sign-of-determinant
//! computations in extended precision, so there is no epsilon anywhere.
//! Intersection is closed: touching endpoints and collinear overlap count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par;

/// Coordinates must satisfy `|x|, |y| <= COORD_LIMIT` (2^30). Orientation
/// determinants then stay below 2^63 and are evaluated exactly in i128.
pub const COORD_LIMIT: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

/// Sign of the cross product `(b - a) x (c - a)`: +1 left turn, -1 right
/// turn, 0 collinear.
pub fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let lhs = (b.x - a.x) as i128 * (c.y - a.y) as i128;
    let rhs = (b.y - a.y) as i128 * (c.x - a.x) as i128;
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

/// True when collinear point `p` lies inside the bounding box of `ab`.
fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, exact. Segments must be non-degenerate.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && on_segment(p1, p2, q1))
        || (o2 == 0 && on_segment(p1, p2, q2))
        || (o3 == 0 && on_segment(q1, q2, p1))
        || (o4 == 0 && on_segment(q1, q2, p2))
}

/// Polyline with at least two integer points, consecutive points distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::input("polyline needs at least 2 points"));
        }
        for p in &points {
            if p.x.abs() > COORD_LIMIT || p.y.abs() > COORD_LIMIT {
                return Err(Error::input(format!(
                    "coordinate ({}, {}) exceeds the exact-arithmetic limit {COORD_LIMIT}",
                    p.x, p.y
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "repeated consecutive point ({}, {})",
                w[0].x, w[0].y
            )));
        }
        Ok(Polyline { points })
    }

    /// Straight segment, the common special case.
    pub fn segment(a: Point, b: Point) -> Result<Self> {
        Polyline::new(vec![a, b])
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn bbox(&self) -> (i64, i64, i64, i64) {
        let mut b = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for p in &self.points {
            b.0 = b.0.min(p.x);
            b.1 = b.1.min(p.y);
            b.2 = b.2.max(p.x);
            b.3 = b.3.max(p.y);
        }
        b
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Result<Self> {
        Polyline::new(
            self.points
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        )
    }
}

/// True when any segment of `a` meets any segment of `b` (closed).
pub fn polylines_intersect(a: &Polyline, b: &Polyline) -> bool {
    let (ax0, ay0, ax1, ay1) = a.bbox();
    let (bx0, by0, bx1, by1) = b.bbox();
    if ax1 < bx0 || bx1 < ax0 || ay1 < by0 || by1 < ay0 {
        return false;
    }
    for s in a.points.windows(2) {
        for t in b.points.windows(2) {
            if segments_intersect(s[0], s[1], t[0], t[1]) {
                return true;
            }
        }
    }
    false
}

/// A drawing of a graph: one curve per vertex. The graph it represents is
/// always re-derived from the curves, never trusted from elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringRepresentation {
    curves: Vec<Polyline>,
}

impl StringRepresentation {
    pub fn new(curves: Vec<Polyline>) -> Self {
        StringRepresentation { curves }
    }

    pub fn curves(&self) -> &[Polyline] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// The intersection graph: vertex per curve, edge per intersecting pair.
    pub fn intersection_graph(&self) -> Graph {
        intersection_graph(&self.curves)
    }

    /// Representation restricted to a vertex subset, in ascending id order.
    pub fn restricted(&self, keep: &[u32]) -> StringRepresentation {
        let mut ids = keep.to_vec();
        ids.sort_unstable();
        StringRepresentation {
            curves: ids
                .iter()
                .map(|&i| self.curves[i as usize].clone())
                .collect(),
        }
    }
}

/// Intersection graph of a family of curves. Pairs are tested in parallel;
/// the edge list is assembled in lexicographic order regardless.
pub fn intersection_graph(curves: &[Polyline]) -> Graph {
    let n = curves.len();
    let rows: Vec<Vec<(u32, u32)>> = par::map_indexed(n, |i| {
        let mut row = Vec::new();
        for j in (i + 1)..n {
            if polylines_intersect(&curves[i], &curves[j]) {
                row.push((i as u32, j as u32));
            }
        }
        row
    });
    let edges: Vec<(u32, u32)> = rows.into_iter().flatten().collect();
    Graph::new(n, edges).expect("pairwise intersection edges are always valid")
}

/// `n` random straight segments with endpoints i.i.d. uniform on the integer
/// grid `[0, coord_range]^2`; zero-length draws are resampled. Deterministic
/// in `seed`. Returns the representation and its derived graph.
pub fn gen_random_segments(
    n: usize,
    coord_range: i64,
    seed: u64,
) -> Result<(StringRepresentation, Graph)> {
    if n == 0 {
        return Err(Error::input("need at least one segment"));
    }
    if !(4..=COORD_LIMIT).contains(&coord_range) {
        return Err(Error::input(format!(
            "coord_range must be in 4..={COORD_LIMIT}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Point::new(rng.gen_range(0..=coord_range), rng.gen_range(0..=coord_range))
    };
    let mut curves = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            if a != b {
                curves.push(Polyline::segment(a, b).expect("validated above"));
                break;
            }
        }
    }
    let rep = StringRepresentation::new(curves);
    let g = rep.intersection_graph();
    Ok((rep, g))
}

/// `k` horizontal and `k` vertical unit-spaced segments whose pairwise
/// crossings realize the complete bipartite graph `K_{k,k}` (ids: horizontals
/// `0..k`, verticals `k..2k`).
pub fn gen_grid_strings(k: usize) -> Result<(StringRepresentation, Graph)> {
    if k == 0 {
        return Err(Error::input("grid needs k >= 1"));
    }
    if k as i64 > COORD_LIMIT {
        return Err(Error::input("grid too large for the coordinate limit"));
    }
    let k_i = k as i64;
    let mut curves = Vec::with_capacity(2 * k);
    for i in 0..k_i {
        curves.push(Polyline::segment(Point::new(-1, i), Point::new(k_i, i))?);
    }
    for j in 0..k_i {
        curves.push(Polyline::segment(Point::new(j, -1), Point::new(j, k_i))?);
    }
    let rep = StringRepresentation::new(curves);
    let g = rep.intersection_graph();
    Ok((rep, g))
}

// ---------------------------------------------------------------------------
// JSON schema: {"curves": [[[x, y], ...], ...]}

#[derive(Serialize, Deserialize)]
struct RepRepr {
    curves: Vec<Vec<(i64, i64)>>,
}

impl Serialize for StringRepresentation {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RepRepr {
            curves: self
                .curves
                .iter()
                .map(|c| c.points().iter().map(|p| (p.x, p.y)).collect())
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StringRepresentation {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = RepRepr::deserialize(de)?;
        let mut curves = Vec::with_capacity(repr.curves.len());
        for (i, pts) in repr.curves.into_iter().enumerate() {
            let pl = Polyline::new(pts.into_iter().map(|(x, y)| Point::new(x, y)).collect())
                .map_err(|e| D::Error::custom(format!("curve {i}: {e}")))?;
            curves.push(pl);
        }
        Ok(StringRepresentation::new(curves))
    }
}
