use crate::material::MaterialParams;
use crate::mesh::TriMesh;
use crate::scalar::{lit, Point, Scalar};
use crate::splitting::FieldSolution;

/// Displacements and microrotations at one point of the plate body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointKinematics<T> {
    pub u: [T; 3],
    pub phi: [T; 3],
}

/// Through-thickness reconstruction from the nine midplane fields at
/// `zeta = 2 x3 / h`. `Psi` carries length units, so `u_alpha = zeta Psi_alpha`
/// with no further scaling.
pub fn reconstruct<T: Scalar>(f: &[T; 9], zeta: T) -> PointKinematics<T> {
    let [psi1, psi2, w, om3, o1, o2, ws, oh1, oh2] = *f;
    let bubble = T::one() - zeta * zeta;
    PointKinematics {
        u: [zeta * psi1, zeta * psi2, w + bubble * ws],
        phi: [o1 * bubble + oh1, o2 * bubble + oh2, zeta * om3],
    }
}

/// Evaluates the reconstructed 3-D fields of a solution.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics<'a, T> {
    sol: &'a FieldSolution<T>,
    mesh: &'a TriMesh<T>,
    thickness: T,
}

impl<'a, T: Scalar> Kinematics<'a, T> {
    pub fn new(sol: &'a FieldSolution<T>, mesh: &'a TriMesh<T>, m: &MaterialParams<T>) -> Self {
        Self {
            sol,
            mesh,
            thickness: m.thickness,
        }
    }

    /// Dimensionless coordinate of the height `x3`.
    pub fn zeta(&self, x3: T) -> T {
        lit::<T>(2.0) * x3 / self.thickness
    }

    pub fn at_node(&self, node: usize, zeta: T) -> PointKinematics<T> {
        reconstruct(&self.sol.at_node(node), zeta)
    }

    /// `None` when `x` lies outside the mesh.
    pub fn at(&self, x: Point<T>, zeta: T) -> Option<PointKinematics<T>> {
        let t = self.mesh.locate(x)?;
        let l = self.mesh.barycentric(t, x);
        Some(reconstruct(
            &self.sol.at_barycentric(&self.mesh.triangles()[t], &l),
            zeta,
        ))
    }

    /// Largest nodal `|u3|` on the fiber `zeta`.
    pub fn max_abs_u3(&self, zeta: T) -> T {
        (0..self.sol.n_nodes())
            .map(|n| self.at_node(n, zeta).u[2].abs())
            .fold(T::zero(), T::max)
    }
}
