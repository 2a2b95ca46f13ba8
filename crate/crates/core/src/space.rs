//! Finite metric spaces with validated distances and slope neighborhoods.
//!
//! A limsup-style local slope is vacuous on a finite point set (every point is
//! isolated), so each point carries a slope neighborhood of radius
//! `slope_radius(x)` over which discrete difference quotients are taken. Grid
//! constructors tag the space with its mesh so that continuum-limit checks can
//! use mesh-dependent tolerances.

use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use thiserror::Error;

/// Absolute tolerance for triangle-inequality validation. Distances are user
/// data and shortest-path sums carry rounding, so exact checks are too brittle.
pub const TRIANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("distance matrix is not square: {rows} rows, row {bad_row} has {bad_len} entries")]
    NotSquare {
        rows: usize,
        bad_row: usize,
        bad_len: usize,
    },
    #[error("empty distance matrix")]
    Empty,
    #[error("non-finite distance at ({i},{j})")]
    NonFinite { i: usize, j: usize },
    #[error("negative distance at ({i},{j}): {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal at ({i},{i}): {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("zero distance between distinct points ({i},{j})")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("asymmetric distance at ({i},{j}): {dij} vs {dji}")]
    AsymmetricDistance { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("triangle inequality violated: d({x},{z}) > d({x},{y}) + d({y},{z})")]
    TriangleViolation { x: usize, y: usize, z: usize },
    #[error("graph is disconnected; components: {components:?}")]
    DisconnectedGraph { components: Vec<Vec<usize>> },
    #[error("invalid edge ({i},{j}) for n={n}")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },
    #[error("edge weight must be positive: ({i},{j}) has weight {w}")]
    NonPositiveEdgeWeight { i: usize, j: usize, w: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("field has {got} values but the space has {expected} points")]
    FieldLengthMismatch { got: usize, expected: usize },
    #[error("non-finite field value at index {index}")]
    FieldNotFinite { index: usize },
}

/// How to choose the per-point slope neighborhood radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeRadiusPolicy {
    /// Radius equals the distance to the nearest other point.
    Nearest,
    /// A fixed radius shared by all points.
    Fixed(f64),
}

/// A finite metric space: point count, exact distance matrix, per-point slope
/// neighborhood radii, and an optional mesh tag for grid discretizations of a
/// geodesic continuum.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
    slope_radius: Vec<f64>,
    geodesic_mesh: Option<f64>,
}

impl MetricSpace {
    /// Builds a space from an explicit distance matrix.
    ///
    /// Validates symmetry, zero diagonal, positivity off the diagonal, and the
    /// triangle inequality (within [`TRIANGLE_TOL`]).
    pub fn from_matrix(
        dist: &[Vec<f64>],
        policy: SlopeRadiusPolicy,
    ) -> Result<Self, SpaceError> {
        let n = dist.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::NotSquare {
                    rows: n,
                    bad_row: i,
                    bad_len: row.len(),
                });
            }
        }
        let flat: Vec<f64> = dist.iter().flatten().copied().collect();
        Self::from_flat(n, flat, policy, None)
    }

    fn from_flat(
        n: usize,
        dist: Vec<f64>,
        policy: SlopeRadiusPolicy,
        geodesic_mesh: Option<f64>,
    ) -> Result<Self, SpaceError> {
        debug_assert_eq!(dist.len(), n * n);
        let at = |i: usize, j: usize| dist[i * n + j];
        for i in 0..n {
            for j in 0..n {
                let d = at(i, j);
                if !d.is_finite() {
                    return Err(SpaceError::NonFinite { i, j });
                }
                if d < 0.0 {
                    return Err(SpaceError::NegativeDistance { i, j, value: d });
                }
            }
            if at(i, i) != 0.0 {
                return Err(SpaceError::NonzeroDiagonal {
                    i,
                    value: at(i, i),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if at(i, j) != at(j, i) {
                    return Err(SpaceError::AsymmetricDistance {
                        i,
                        j,
                        dij: at(i, j),
                        dji: at(j, i),
                    });
                }
                if at(i, j) == 0.0 {
                    return Err(SpaceError::ZeroOffDiagonal { i, j });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if at(x, z) > at(x, y) + at(y, z) + TRIANGLE_TOL {
                        return Err(SpaceError::TriangleViolation { x, y, z });
                    }
                }
            }
        }
        let slope_radius = match policy {
            SlopeRadiusPolicy::Fixed(r) => {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(SpaceError::BadParameter(format!(
                        "fixed slope radius must be positive and finite, got {r}"
                    )));
                }
                vec![r; n]
            }
            SlopeRadiusPolicy::Nearest => (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| j != i)
                        .map(|j| at(i, j))
                        .fold(f64::INFINITY, f64::min)
                })
                .map(|r| if r.is_finite() { r } else { 1.0 })
                .collect(),
        };
        Ok(MetricSpace {
            n,
            dist,
            slope_radius,
            geodesic_mesh,
        })
    }

    /// Lattice discretization of `[0, side_length]^dimension` with Euclidean
    /// distances. The slope radius `1.5 × mesh` captures axis neighbors in
    /// 1-D and axis plus diagonal neighbors in 2-D.
    pub fn grid(
        dimension: usize,
        points_per_axis: usize,
        side_length: f64,
    ) -> Result<Self, SpaceError> {
        if dimension != 1 && dimension != 2 {
            return Err(SpaceError::BadParameter(format!(
                "grid dimension must be 1 or 2, got {dimension}"
            )));
        }
        if points_per_axis < 2 {
            return Err(SpaceError::BadParameter(format!(
                "points_per_axis must be at least 2, got {points_per_axis}"
            )));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(SpaceError::BadParameter(format!(
                "side_length must be positive, got {side_length}"
            )));
        }
        let k = points_per_axis;
        let mesh = side_length / (k - 1) as f64;
        let coords: Vec<(f64, f64)> = if dimension == 1 {
            (0..k).map(|i| (i as f64 * mesh, 0.0)).collect()
        } else {
            (0..k * k)
                .map(|idx| ((idx / k) as f64 * mesh, (idx % k) as f64 * mesh))
                .collect()
        };
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dx = coords[i].0 - coords[j].0;
                let dy = coords[i].1 - coords[j].1;
                dist[i * n + j] = dx.hypot(dy);
            }
        }
        Self::from_flat(n, dist, SlopeRadiusPolicy::Fixed(1.5 * mesh), Some(mesh))
    }

    /// Shortest-path metric of a connected weighted graph.
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j, w) in edges {
            if i >= n || j >= n || i == j {
                return Err(SpaceError::EdgeOutOfRange { i, j, n });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(SpaceError::NonPositiveEdgeWeight { i, j, w });
            }
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for source in 0..n {
            dijkstra(&adj, source, &mut dist[source * n..(source + 1) * n]);
        }
        if dist.iter().any(|d| !d.is_finite()) {
            return Err(SpaceError::DisconnectedGraph {
                components: components(&adj),
            });
        }
        Self::from_flat(n, dist, SlopeRadiusPolicy::Nearest, None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn slope_radius(&self, i: usize) -> f64 {
        self.slope_radius[i]
    }

    /// Mesh width when the space is a grid discretization of a geodesic
    /// continuum, `None` otherwise.
    pub fn geodesic_mesh(&self) -> Option<f64> {
        self.geodesic_mesh
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest positive distance; `INFINITY` on a one-point space.
    pub fn min_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.min(self.dist(i, j));
                }
            }
        }
        m
    }

    /// Neighbors within the slope neighborhood of `x` (excluding `x`).
    pub fn slope_neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let r = self.slope_radius[x];
        (0..self.n).filter(move |&y| y != x && self.dist(x, y) <= r)
    }

    /// The full cost matrix `c(x, y) = f(d(x, y))`.
    pub fn cost_matrix(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.dist.iter().map(|&d| f(d)).collect()
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize, out: &mut [f64]) {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0)
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > out[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < out[v] {
                out[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
}

fn components(adj: &[Vec<(usize, f64)>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// A real-valued function on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self, SpaceError> {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(SpaceError::FieldNotFinite { index });
            }
        }
        Ok(ScalarField { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ScalarField {
            values: vec![value; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn check_len(&self, space: &MetricSpace) -> Result<(), SpaceError> {
        if self.len() != space.len() {
            return Err(SpaceError::FieldLengthMismatch {
                got: self.len(),
                expected: space.len(),
            });
        }
        Ok(())
    }

    /// max f − min f.
    pub fn oscillation(&self) -> f64 {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}
