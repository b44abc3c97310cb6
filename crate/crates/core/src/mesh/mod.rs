//! Conforming triangulations of the plate midplane.

mod generate;
pub mod msh;
pub mod native;
mod refine;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::{lit, Point, Scalar};

pub use generate::{generate_plate_with_hole, generate_rectangle, HoleSpec};
pub use refine::{refine_uniform, refine_uniform_with_parents, RefinedMesh};

/// Identifies a piece of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentTag(pub u32);

impl SegmentTag {
    /// Rectangle side `x1 = 0`.
    pub const G1: SegmentTag = SegmentTag(1);
    /// Rectangle side `x1 = a`.
    pub const G2: SegmentTag = SegmentTag(2);
    /// Rectangle side `x2 = 0`.
    pub const G3: SegmentTag = SegmentTag(3);
    /// Rectangle side `x2 = b`.
    pub const G4: SegmentTag = SegmentTag(4);
    /// Rim of a circular hole.
    pub const HOLE: SegmentTag = SegmentTag(5);
}

impl fmt::Display for SegmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: SegmentTag,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("node {0} has non-finite coordinates")]
    NonFiniteNode(usize),
    #[error("triangle {tri} references node {node}, but the mesh has {n_nodes} nodes")]
    IndexOutOfRange {
        tri: usize,
        node: usize,
        n_nodes: usize,
    },
    #[error("triangle {0} is degenerate")]
    Degenerate(usize),
    #[error("triangle {0} is clockwise")]
    Clockwise(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("triangles sharing edge ({0}, {1}) overlap or are inconsistently oriented")]
    InconsistentOrientation(usize, usize),
    #[error("boundary edge ({0}, {1}) is not a boundary edge of the triangulation")]
    NotABoundaryEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) is listed twice")]
    DuplicateBoundaryEdge(usize, usize),
    #[error("edge ({0}, {1}) lies on the boundary but carries no segment tag (non-conforming mesh?)")]
    UntaggedBoundary(usize, usize),
    #[error("node {0} is not used by any triangle")]
    UnusedNode(usize),
    #[error("invalid geometry: {0}")]
    Geometry(String),
}

/// A validated, counterclockwise, conforming triangulation with tagged
/// boundary edges. Node indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T> {
    nodes: Vec<Point<T>>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshMetrics<T> {
    /// Longest edge over all triangles.
    pub h_max: T,
    pub n_nodes: usize,
    pub n_triangles: usize,
}

#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
pub fn signed_area<T: Scalar>(p: &[Point<T>; 3]) -> T {
    let half = lit::<T>(0.5);
    half * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

#[inline]
pub(crate) fn distance<T: Scalar>(a: Point<T>, b: Point<T>) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl<T: Scalar> TriMesh<T> {
    pub fn new(
        nodes: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        let mesh = Self {
            nodes,
            triangles,
            boundary_edges,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts_unchecked(
        nodes: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Self {
        Self {
            nodes,
            triangles,
            boundary_edges,
        }
    }

    pub fn nodes(&self) -> &[Point<T>] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point<T>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn area(&self, t: usize) -> T {
        signed_area(&self.triangle_points(t))
    }

    pub fn total_area(&self) -> T {
        (0..self.n_triangles()).fold(T::zero(), |acc, t| acc + self.area(t))
    }

    pub fn centroid(&self, t: usize) -> Point<T> {
        let p = self.triangle_points(t);
        let third = lit::<T>(1.0 / 3.0);
        [
            (p[0][0] + p[1][0] + p[2][0]) * third,
            (p[0][1] + p[1][1] + p[2][1]) * third,
        ]
    }

    /// Unique undirected edges in order of first appearance.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashMap::with_capacity(self.triangles.len() * 2);
        let mut out = Vec::with_capacity(self.triangles.len() * 2);
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if seen.insert(edge_key(a, b), ()).is_none() {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// `m - e + l`; equals `1 - holes` for a connected planar triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_nodes() as i64 - self.edges().len() as i64 + self.n_triangles() as i64
    }

    /// Boundary tags present, sorted.
    pub fn tags(&self) -> Vec<SegmentTag> {
        let mut t: Vec<_> = self.boundary_edges.iter().map(|e| e.tag).collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn has_tag(&self, tag: SegmentTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Nodes lying on at least one boundary edge with `tag`.
    pub fn nodes_with_tag(&self, tag: SegmentTag) -> Vec<bool> {
        let mut mark = vec![false; self.n_nodes()];
        for e in self.boundary_edges.iter().filter(|e| e.tag == tag) {
            mark[e.nodes[0]] = true;
            mark[e.nodes[1]] = true;
        }
        mark
    }

    /// Triangles owning at least one node on a `tag` boundary edge.
    pub fn triangles_touching_tag(&self, tag: SegmentTag) -> Vec<usize> {
        let mark = self.nodes_with_tag(tag);
        (0..self.n_triangles())
            .filter(|&t| self.triangles[t].iter().any(|&n| mark[n]))
            .collect()
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: Point<T>) -> [T; 3] {
        let v = self.triangle_points(t);
        let area = signed_area(&v);
        [
            signed_area(&[p, v[1], v[2]]) / area,
            signed_area(&[v[0], p, v[2]]) / area,
            signed_area(&[v[0], v[1], p]) / area,
        ]
    }

    /// First triangle containing `p` (closed), by barycentric test.
    pub fn locate(&self, p: Point<T>) -> Option<usize> {
        let tol = lit::<T>(-1e-12);
        (0..self.n_triangles()).find(|&t| self.barycentric(t, p).iter().all(|&l| l >= tol))
    }

    pub fn metrics(&self) -> MeshMetrics<T> {
        metrics(self)
    }

    pub fn bounding_box(&self) -> (Point<T>, Point<T>) {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    fn validate(&self) -> Result<(), MeshError> {
        let m = self.nodes.len();
        for (i, p) in self.nodes.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(MeshError::NonFiniteNode(i));
            }
        }
        let mut used = vec![false; m];
        // directed edge -> count; undirected key -> number of triangles
        let mut undirected: HashMap<(usize, usize), (u8, (usize, usize))> =
            HashMap::with_capacity(self.triangles.len() * 2);
        for (t, tri) in self.triangles.iter().enumerate() {
            for &n in tri {
                if n >= m {
                    return Err(MeshError::IndexOutOfRange {
                        tri: t,
                        node: n,
                        n_nodes: m,
                    });
                }
                used[n] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Degenerate(t));
            }
            let p = self.triangle_points(t);
            let area = signed_area(&p);
            let longest = (0..3)
                .map(|k| distance(p[k], p[(k + 1) % 3]))
                .fold(T::zero(), T::max);
            if area.abs() <= lit::<T>(1e-14) * longest * longest {
                return Err(MeshError::Degenerate(t));
            }
            if area < T::zero() {
                return Err(MeshError::Clockwise(t));
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let entry = undirected.entry(edge_key(a, b)).or_insert((0, (a, b)));
                entry.0 += 1;
                match entry.0 {
                    1 => {}
                    2 => {
                        // the neighbour must traverse the edge the other way
                        if entry.1 != (b, a) {
                            return Err(MeshError::InconsistentOrientation(a, b));
                        }
                    }
                    _ => return Err(MeshError::NonManifoldEdge(a, b)),
                }
            }
        }
        if let Some(n) = used.iter().position(|u| !u) {
            return Err(MeshError::UnusedNode(n));
        }
        let mut tagged = HashMap::with_capacity(self.boundary_edges.len());
        for e in &self.boundary_edges {
            let [a, b] = e.nodes;
            if a >= m || b >= m {
                return Err(MeshError::NotABoundaryEdge(a, b));
            }
            match undirected.get(&edge_key(a, b)) {
                Some((1, _)) => {}
                _ => return Err(MeshError::NotABoundaryEdge(a, b)),
            }
            if tagged.insert(edge_key(a, b), ()).is_some() {
                return Err(MeshError::DuplicateBoundaryEdge(a, b));
            }
        }
        for (&(a, b), &(count, _)) in &undirected {
            if count == 1 && !tagged.contains_key(&(a, b)) {
                return Err(MeshError::UntaggedBoundary(a, b));
            }
        }
        Ok(())
    }
}

/// Longest edge over all triangles plus element counts.
pub fn metrics<T: Scalar>(mesh: &TriMesh<T>) -> MeshMetrics<T> {
    let mut h_max = T::zero();
    for t in 0..mesh.n_triangles() {
        let p = mesh.triangle_points(t);
        for k in 0..3 {
            h_max = h_max.max(distance(p[k], p[(k + 1) % 3]));
        }
    }
    MeshMetrics {
        h_max,
        n_nodes: mesh.n_nodes(),
        n_triangles: mesh.n_triangles(),
    }
}
