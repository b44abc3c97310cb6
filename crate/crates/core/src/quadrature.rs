//! Triangle quadrature rules in barycentric coordinates. Weights sum to one
//! and are multiplied by the triangle area.

use crate::scalar::{Point, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule<T> {
    pub points: Vec<[T; 3]>,
    pub weights: Vec<T>,
}

impl<T: Scalar> TriangleRule<T> {
    /// Edge midpoints, exact up to degree 2.
    pub fn mid_edge() -> Self {
        let (h, z, w) = (T::lit(0.5), T::zero(), T::lit(1.0 / 3.0));
        Self {
            points: vec![[h, h, z], [z, h, h], [h, z, h]],
            weights: vec![w; 3],
        }
    }

    /// Seven-point rule, exact up to degree 5.
    pub fn degree5() -> Self {
        let s = 15f64.sqrt();
        let (a1, b1, w1) = ((6.0 - s) / 21.0, (9.0 + 2.0 * s) / 21.0, (155.0 - s) / 1200.0);
        let (a2, b2, w2) = ((6.0 + s) / 21.0, (9.0 - 2.0 * s) / 21.0, (155.0 + s) / 1200.0);
        let third = 1.0 / 3.0;
        let pts = [
            [third, third, third],
            [b1, a1, a1],
            [a1, b1, a1],
            [a1, a1, b1],
            [b2, a2, a2],
            [a2, b2, a2],
            [a2, a2, b2],
        ];
        let ws = [9.0 / 40.0, w1, w1, w1, w2, w2, w2];
        Self {
            points: pts.iter().map(|p| p.map(T::lit)).collect(),
            weights: ws.iter().map(|&w| T::lit(w)).collect(),
        }
    }

    /// Physical points and area-scaled weights on a triangle.
    pub fn on(&self, tri: &[Point<T>; 3], area: T) -> impl Iterator<Item = (Point<T>, [T; 3], T)> + '_ {
        let tri = *tri;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            let x = [
                l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
            ];
            (x, *l, w * area)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of l1^i l2^j l3^k over a triangle of area A is
    /// 2A i! j! k! / (i+j+k+2)!.
    fn exact(i: u32, j: u32, k: u32) -> f64 {
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        2.0 * f(i) * f(j) * f(k) / f(i + j + k + 2)
    }

    fn check(rule: &TriangleRule<f64>, degree: u32) {
        for i in 0..=degree {
            for j in 0..=degree - i {
                let k = degree - i - j;
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| w * l[0].powi(i as i32) * l[1].powi(j as i32) * l[2].powi(k as i32))
                    .sum();
                assert!((q - exact(i, j, k)).abs() < 1e-15, "{i} {j} {k}: {q}");
            }
        }
    }

    #[test]
    fn mid_edge_exact_to_degree_two() {
        let r = TriangleRule::mid_edge();
        for d in 0..=2 {
            check(&r, d);
        }
    }

    #[test]
    fn seven_point_exact_to_degree_five() {
        let r = TriangleRule::degree5();
        for d in 0..=5 {
            check(&r, d);
        }
        let sum: f64 = r.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }
}
