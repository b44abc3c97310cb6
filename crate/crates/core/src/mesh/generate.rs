use crate::scalar::{lit, Point, Scalar};

use super::{distance, signed_area, BoundaryEdge, MeshError, SegmentTag, TriMesh};

/// Structured mesh of `[0,a] x [0,b]` with `2 nx ny` triangles.
///
/// Every cell is cut along its lower-left to upper-right diagonal, so for
/// `a == b` and `nx == ny` the mesh is mirror-symmetric about `x1 = x2`.
pub fn generate_rectangle<T: Scalar>(
    a: T,
    b: T,
    nx: usize,
    ny: usize,
) -> Result<TriMesh<T>, MeshError> {
    if !(a > T::zero() && b > T::zero()) || nx == 0 || ny == 0 {
        return Err(MeshError::Geometry(
            "rectangle needs a, b > 0 and nx, ny >= 1".into(),
        ));
    }
    let fx = T::from_usize_lossy(nx);
    let fy = T::from_usize_lossy(ny);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([
                a * T::from_usize_lossy(i) / fx,
                b * T::from_usize_lossy(j) / fy,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (n00, n10, n01, n11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            triangles.push([n00, n10, n11]);
            triangles.push([n00, n11, n01]);
        }
    }
    let mut edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        edges.push(BoundaryEdge {
            nodes: [id(i, 0), id(i + 1, 0)],
            tag: SegmentTag::G3,
        });
    }
    for j in 0..ny {
        edges.push(BoundaryEdge {
            nodes: [id(nx, j), id(nx, j + 1)],
            tag: SegmentTag::G2,
        });
    }
    for i in (0..nx).rev() {
        edges.push(BoundaryEdge {
            nodes: [id(i + 1, ny), id(i, ny)],
            tag: SegmentTag::G4,
        });
    }
    for j in (0..ny).rev() {
        edges.push(BoundaryEdge {
            nodes: [id(0, j + 1), id(0, j)],
            tag: SegmentTag::G1,
        });
    }
    Ok(TriMesh::from_parts_unchecked(nodes, triangles, edges))
}

/// Rectangle `[0,a] x [0,b]` with one circular hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleSpec<T> {
    pub a: T,
    pub b: T,
    pub radius: T,
    pub center: Point<T>,
    /// Target edge length.
    pub density: T,
}

/// Deterministic ring mesh of a rectangle with a circular hole.
///
/// The annulus between the rim and the outer rectangle is split into four
/// ruled patches, one per side, each joining a rim arc to its side. Rim
/// nodes lie exactly on the circle; the polygonal rim has sagitta at most
/// `density^2 / (8 r)`.
pub fn generate_plate_with_hole<T: Scalar>(spec: &HoleSpec<T>) -> Result<TriMesh<T>, MeshError> {
    let HoleSpec {
        a,
        b,
        radius: r,
        center: c,
        density,
    } = *spec;
    let zero = T::zero();
    if !(a > zero && b > zero && r > zero && density > zero) {
        return Err(MeshError::Geometry(
            "hole mesh needs a, b, radius, density > 0".into(),
        ));
    }
    if !(c[0] - r > zero && c[0] + r < a && c[1] - r > zero && c[1] + r < b) {
        return Err(MeshError::Geometry(
            "hole touches or crosses the outer boundary".into(),
        ));
    }

    let corners = [[zero, zero], [a, zero], [a, b], [zero, b]];
    let side_tags = [SegmentTag::G3, SegmentTag::G2, SegmentTag::G4, SegmentTag::G1];
    let two_pi = T::PI() + T::PI();
    let mut angles: Vec<T> = corners
        .iter()
        .map(|p| (p[1] - c[1]).atan2(p[0] - c[0]))
        .collect();
    for k in 1..4 {
        while angles[k] <= angles[k - 1] {
            angles[k] = angles[k] + two_pi;
        }
    }
    angles.push(angles[0] + two_pi);

    // largest arc angle whose chord sagitta stays below density^2/(8r)
    let cos_half = T::one() - density * density / (lit::<T>(8.0) * r * r);
    let theta_max = if cos_half <= -T::one() {
        T::PI()
    } else {
        lit::<T>(2.0) * cos_half.acos()
    };

    let ceil = |x: T| -> usize { x.ceil().to_f64_lossy().max(1.0) as usize };
    let mut n_side = [0usize; 4];
    for k in 0..4 {
        let span = angles[k + 1] - angles[k];
        let side_len = distance(corners[k], corners[(k + 1) % 4]);
        n_side[k] = ceil(side_len / density)
            .max(ceil(span / theta_max))
            .max(ceil(r * span / density));
    }
    let rim_point = |theta: T| [c[0] + r * theta.cos(), c[1] + r * theta.sin()];
    let radial = (0..4)
        .map(|k| distance(corners[k], rim_point(angles[k])))
        .fold(zero, T::max);
    let n_t = ceil(radial / density);

    let ring: usize = n_side.iter().sum();
    // per ring position: (patch, local index)
    let mut slots = Vec::with_capacity(ring);
    for (k, &ns) in n_side.iter().enumerate() {
        for i in 0..ns {
            slots.push((k, i));
        }
    }

    let mut nodes = Vec::with_capacity(ring * (n_t + 1));
    for j in 0..=n_t {
        let t = T::from_usize_lossy(j) / T::from_usize_lossy(n_t);
        for &(k, i) in &slots {
            let s = T::from_usize_lossy(i) / T::from_usize_lossy(n_side[k]);
            let inner = rim_point(angles[k] + s * (angles[k + 1] - angles[k]));
            if j == 0 {
                nodes.push(inner);
                continue;
            }
            let p0 = corners[k];
            let p1 = corners[(k + 1) % 4];
            let outer = if i == 0 {
                p0
            } else {
                [p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1])]
            };
            nodes.push(if j == n_t {
                outer
            } else {
                [
                    (T::one() - t) * inner[0] + t * outer[0],
                    (T::one() - t) * inner[1] + t * outer[1],
                ]
            });
        }
    }

    let id = |q: usize, j: usize| j * ring + (q % ring);
    let mut triangles = Vec::with_capacity(2 * ring * n_t);
    for j in 0..n_t {
        for q in 0..ring {
            let quad = [id(q, j), id(q + 1, j), id(q + 1, j + 1), id(q, j + 1)];
            for tri in [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]] {
                let p = [nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]];
                triangles.push(if signed_area(&p) < zero {
                    [tri[0], tri[2], tri[1]]
                } else {
                    tri
                });
            }
        }
    }

    let mut edges = Vec::with_capacity(2 * ring);
    for q in 0..ring {
        edges.push(BoundaryEdge {
            nodes: [id(q, 0), id(q + 1, 0)],
            tag: SegmentTag::HOLE,
        });
    }
    for (q, &(k, _)) in slots.iter().enumerate() {
        edges.push(BoundaryEdge {
            nodes: [id(q, n_t), id(q + 1, n_t)],
            tag: side_tags[k],
        });
    }
    TriMesh::new(nodes, triangles, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_counts() {
        let m = generate_rectangle::<f64>(1.0, 1.0, 1, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_triangles(), m.boundary_edges().len()), (4, 2, 4));
        let m = generate_rectangle::<f64>(2.0, 2.0, 8, 8).unwrap();
        assert_eq!((m.n_nodes(), m.n_triangles()), (81, 128));
        let m = generate_rectangle::<f64>(1.0, 1.0, 2, 2).unwrap();
        for t in 0..m.n_triangles() {
            assert!((m.area(t) - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn rectangle_is_valid_and_tagged() {
        let m = generate_rectangle::<f64>(3.0, 2.0, 5, 3).unwrap();
        TriMesh::new(m.nodes().to_vec(), m.triangles().to_vec(), m.boundary_edges().to_vec())
            .unwrap();
        for e in m.boundary_edges() {
            let [p, q] = [m.nodes()[e.nodes[0]], m.nodes()[e.nodes[1]]];
            let ok = match e.tag {
                SegmentTag::G1 => p[0] == 0.0 && q[0] == 0.0,
                SegmentTag::G2 => p[0] == 3.0 && q[0] == 3.0,
                SegmentTag::G3 => p[1] == 0.0 && q[1] == 0.0,
                SegmentTag::G4 => p[1] == 2.0 && q[1] == 2.0,
                _ => false,
            };
            assert!(ok, "{e:?}");
        }
        assert!(generate_rectangle::<f64>(0.0, 1.0, 1, 1).is_err());
        assert!(generate_rectangle::<f64>(1.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn hole_mesh_properties() {
        let spec = HoleSpec::<f64> {
            a: 2.0,
            b: 2.0,
            radius: 0.2,
            center: [1.0, 1.0],
            density: 0.1,
        };
        let m = generate_plate_with_hole(&spec).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        for t in 0..m.n_triangles() {
            assert!(m.area(t) > 0.0);
        }
        let rim = m.nodes_with_tag(SegmentTag::HOLE);
        let mut count = 0;
        for (p, on_rim) in m.nodes().iter().zip(rim) {
            if on_rim {
                count += 1;
                assert!((distance(*p, [1.0, 1.0]) - 0.2).abs() < 1e-12);
            }
        }
        assert!(count > 0);
        let bound = 0.1 * 0.1 / (8.0 * 0.2);
        for e in m.boundary_edges().iter().filter(|e| e.tag == SegmentTag::HOLE) {
            let [p, q] = [m.nodes()[e.nodes[0]], m.nodes()[e.nodes[1]]];
            let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            let sagitta = 0.2 - distance(mid, [1.0, 1.0]);
            assert!(sagitta <= bound * (1.0 + 1e-12), "{sagitta} > {bound}");
        }
        for tag in [SegmentTag::G1, SegmentTag::G2, SegmentTag::G3, SegmentTag::G4] {
            assert!(m.has_tag(tag));
        }
        let area = 4.0 - m.total_area();
        // polygonal rim: removed area slightly below pi r^2
        assert!(area < std::f64::consts::PI * 0.04 && area > 0.95 * std::f64::consts::PI * 0.04);
    }

    #[test]
    fn hole_mesh_off_center_and_deterministic() {
        let spec = HoleSpec::<f64> {
            a: 3.0,
            b: 2.0,
            radius: 0.3,
            center: [1.1, 0.8],
            density: 0.15,
        };
        let m1 = generate_plate_with_hole(&spec).unwrap();
        let m2 = generate_plate_with_hole(&spec).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(m1.euler_characteristic(), 0);
    }

    #[test]
    fn hole_touching_boundary_rejected() {
        let spec = HoleSpec::<f64> {
            a: 2.0,
            b: 2.0,
            radius: 1.0,
            center: [1.0, 1.0],
            density: 0.1,
        };
        assert!(matches!(
            generate_plate_with_hole(&spec),
            Err(MeshError::Geometry(_))
        ));
    }
}
