use std::collections::HashMap;

use crate::scalar::{lit, Scalar};

use super::{edge_key, BoundaryEdge, TriMesh};

/// Result of a red refinement that keeps track of where new nodes came from.
#[derive(Debug, Clone)]
pub struct RefinedMesh<T> {
    pub mesh: TriMesh<T>,
    /// For every node of the fine mesh numbered at or above the coarse node
    /// count, the coarse edge whose midpoint it is.
    pub parents: Vec<[usize; 2]>,
}

impl<T: Scalar> RefinedMesh<T> {
    /// Interpolates a coarse P1 nodal field onto the fine mesh. Exact, since
    /// the coarse space is contained in the fine one.
    pub fn prolongate(&self, coarse: &[T]) -> Vec<T> {
        let half = lit::<T>(0.5);
        let mut fine = coarse.to_vec();
        fine.extend(self.parents.iter().map(|&[a, b]| half * (coarse[a] + coarse[b])));
        fine
    }
}

/// Splits every triangle into four congruent children through its edge
/// midpoints.
pub fn refine_uniform<T: Scalar>(mesh: &TriMesh<T>) -> TriMesh<T> {
    refine_uniform_with_parents(mesh).mesh
}

pub fn refine_uniform_with_parents<T: Scalar>(mesh: &TriMesh<T>) -> RefinedMesh<T> {
    let half = lit::<T>(0.5);
    let mut nodes = mesh.nodes().to_vec();
    let mut parents = Vec::new();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * mesh.n_triangles());
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<[T; 2]>| -> usize {
        *midpoint.entry(edge_key(a, b)).or_insert_with(|| {
            let (p, q) = (nodes[a], nodes[b]);
            nodes.push([half * (p[0] + q[0]), half * (p[1] + q[1])]);
            parents.push([a, b]);
            nodes.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    for &[a, b, c] in mesh.triangles() {
        let ab = mid(a, b, &mut nodes);
        let bc = mid(b, c, &mut nodes);
        let ca = mid(c, a, &mut nodes);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }

    let mut edges = Vec::with_capacity(2 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let [p, q] = e.nodes;
        let m = mid(p, q, &mut nodes);
        edges.push(BoundaryEdge {
            nodes: [p, m],
            tag: e.tag,
        });
        edges.push(BoundaryEdge {
            nodes: [m, q],
            tag: e.tag,
        });
    }
    RefinedMesh {
        mesh: TriMesh::from_parts_unchecked(nodes, triangles, edges),
        parents,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generate_plate_with_hole, generate_rectangle, HoleSpec, SegmentTag};
    use super::*;

    #[test]
    fn two_triangle_square() {
        let m = generate_rectangle::<f64>(1.0, 1.0, 1, 1).unwrap();
        let r = refine_uniform(&m);
        assert_eq!((r.n_nodes(), r.n_triangles()), (9, 8));
        assert_eq!(r.boundary_edges().len(), 8);
    }

    #[test]
    fn children_are_quarter_area_and_valid() {
        let spec = HoleSpec::<f64> {
            a: 2.0,
            b: 2.0,
            radius: 0.3,
            center: [0.9, 1.1],
            density: 0.25,
        };
        let m = generate_plate_with_hole(&spec).unwrap();
        let r = refine_uniform(&m);
        for t in 0..m.n_triangles() {
            for k in 0..4 {
                let child = r.area(4 * t + k);
                assert!((child - m.area(t) / 4.0).abs() <= 1e-13 * m.area(t));
            }
        }
        let e = m.edges().len();
        assert_eq!(r.n_nodes(), m.n_nodes() + e);
        TriMesh::new(r.nodes().to_vec(), r.triangles().to_vec(), r.boundary_edges().to_vec())
            .unwrap();
        assert!((r.total_area() - m.total_area()).abs() <= 1e-13 * m.total_area());
        assert!((r.metrics().h_max - m.metrics().h_max / 2.0).abs() <= 1e-15 * m.metrics().h_max);
    }

    #[test]
    fn boundary_tags_cover_parent_edges() {
        let m = generate_rectangle::<f64>(2.0, 1.0, 3, 2).unwrap();
        let r = refine_uniform(&m);
        for tag in m.tags() {
            let len = |mesh: &TriMesh<f64>| -> f64 {
                mesh.boundary_edges()
                    .iter()
                    .filter(|e| e.tag == tag)
                    .map(|e| super::super::distance(mesh.nodes()[e.nodes[0]], mesh.nodes()[e.nodes[1]]))
                    .sum()
            };
            assert!((len(&m) - len(&r)).abs() < 1e-14);
        }
        // every child edge lies on the segment of its tag
        for e in r.boundary_edges().iter().filter(|e| e.tag == SegmentTag::G2) {
            assert_eq!(r.nodes()[e.nodes[0]][0], 2.0);
            assert_eq!(r.nodes()[e.nodes[1]][0], 2.0);
        }
    }

    #[test]
    fn prolongation_reproduces_linear_fields() {
        let m = generate_rectangle::<f64>(1.0, 1.0, 2, 3).unwrap();
        let f = |p: [f64; 2]| 2.0 * p[0] - 0.5 * p[1] + 0.25;
        let coarse: Vec<f64> = m.nodes().iter().map(|&p| f(p)).collect();
        let r = refine_uniform_with_parents(&m);
        let fine = r.prolongate(&coarse);
        for (p, v) in r.mesh.nodes().iter().zip(fine) {
            assert!((f(*p) - v).abs() < 1e-14);
        }
    }

    /// Node counts of a six-level sequence starting from 177 nodes and 310
    /// triangles, following m' = m + e, e' = 2e + 3l, l' = 4l.
    #[test]
    fn node_count_recurrence_from_177_nodes() {
        let (mut m, mut l): (u64, u64) = (177, 310);
        let mut e = m + l - 1; // Euler, simply connected
        let mut seq = vec![m];
        for _ in 0..5 {
            m += e;
            e = 2 * e + 3 * l;
            l *= 4;
            seq.push(m);
        }
        assert_eq!(seq, vec![177, 663, 2565, 10089, 40017, 159393]);
        let diam: [f64; 6] = [0.302456, 0.151228, 0.075614, 0.037807, 0.018903, 0.009451];
        for w in diam.windows(2) {
            assert!((w[0] / 2.0 - w[1]).abs() <= 1e-6);
        }
    }

    #[test]
    fn recurrence_holds_on_real_meshes() {
        let mut mesh = generate_rectangle::<f64>(2.0, 2.0, 3, 3).unwrap();
        for _ in 0..3 {
            let e = mesh.edges().len();
            let next = refine_uniform(&mesh);
            assert_eq!(next.n_nodes(), mesh.n_nodes() + e);
            assert_eq!(next.n_triangles(), 4 * mesh.n_triangles());
            mesh = next;
        }
    }
}
