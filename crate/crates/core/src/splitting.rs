//! The splitting-parameter algorithm: solve at `eta = 0` and `eta = 1`,
//! pick the optimal `eta0` from four work densities and combine.
//!
//! The work density `W(ij)` is the load-solution duality integral
//! `int f(eta = i) . v_j`. With that choice, `eta0` is the stationary point
//! of `W(eta) = int f(eta) . v_eta`, which is quadratic in `eta`.

use log::warn;
use thiserror::Error;

use crate::assembly::{assemble_load, assemble_matrix, AssemblyError, BcSpec, DirichletMask};
use crate::material::MaterialParams;
use crate::mesh::TriMesh;
use crate::operator::{LoadSpec, OperatorTable, RhsVector, SourceField, Variable};
use crate::quadrature::TriangleRule;
use crate::scalar::{lit, Point, Scalar};
use crate::solver::{PreparedSolver, SolveReport, SolverError, SolverOptions};

#[derive(Debug, Error)]
pub enum SplitError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("work densities do not depend on eta (denominator {denominator:e})")]
    DegenerateSplit { denominator: f64 },
}

/// Nine nodal fields and the splitting parameter that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSolution<T> {
    n_nodes: usize,
    values: Vec<T>,
    pub eta: T,
}

impl<T: Scalar> FieldSolution<T> {
    /// `values` holds the nine fields back to back.
    pub fn new(n_nodes: usize, values: Vec<T>, eta: T) -> Self {
        assert_eq!(values.len(), 9 * n_nodes, "expected nine fields of {n_nodes} nodes");
        Self { n_nodes, values, eta }
    }

    pub fn zeros(n_nodes: usize) -> Self {
        Self::new(n_nodes, vec![T::zero(); 9 * n_nodes], T::zero())
    }

    /// Nodal interpolant of nine point functions.
    pub fn interpolate(mesh: &TriMesh<T>, f: impl Fn(Point<T>) -> [T; 9]) -> Self {
        let n = mesh.n_nodes();
        let mut values = vec![T::zero(); 9 * n];
        for (p, &x) in mesh.nodes().iter().enumerate() {
            for (i, v) in f(x).into_iter().enumerate() {
                values[i * n + p] = v;
            }
        }
        Self::new(n, values, T::zero())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn field(&self, var: Variable) -> &[T] {
        let i = var.index();
        &self.values[i * self.n_nodes..(i + 1) * self.n_nodes]
    }

    pub fn at_node(&self, node: usize) -> [T; 9] {
        std::array::from_fn(|i| self.values[i * self.n_nodes + node])
    }

    /// P1 interpolation inside a triangle from barycentric coordinates.
    pub fn at_barycentric(&self, tri: &[usize; 3], l: &[T; 3]) -> [T; 9] {
        std::array::from_fn(|i| {
            let f = &self.values[i * self.n_nodes..];
            l[0] * f[tri[0]] + l[1] * f[tri[1]] + l[2] * f[tri[2]]
        })
    }

    pub fn max_abs(&self, var: Variable) -> T {
        self.field(var).iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `(1 - eta) a + eta b`.
    pub fn combine(a: &Self, b: &Self, eta: T) -> Self {
        assert_eq!(a.n_nodes, b.n_nodes);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| (T::one() - eta) * x + eta * y)
            .collect();
        Self::new(a.n_nodes, values, eta)
    }

    /// Relative L2 (Euclidean, all nine fields) distance.
    pub fn relative_difference(&self, other: &Self) -> f64 {
        let (mut d, mut n) = (0.0, 0.0);
        for (&x, &y) in self.values.iter().zip(&other.values) {
            let (x, y) = (x.to_f64_lossy(), y.to_f64_lossy());
            d += (x - y) * (x - y);
            n += y * y;
        }
        if n > 0.0 {
            (d / n).sqrt()
        } else {
            d.sqrt()
        }
    }
}

/// `W(ij) = int f(eta = i) . v_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkDensities<T> {
    pub w00: T,
    pub w01: T,
    pub w10: T,
    pub w11: T,
}

impl<T: Scalar> WorkDensities<T> {
    pub fn denominator(&self) -> T {
        lit::<T>(2.0) * (self.w11 + self.w00 - self.w10 - self.w01)
    }

    /// `q(eta) = (1-eta)^2 W00 + eta (1-eta) (W01 + W10) + eta^2 W11`.
    pub fn quadratic(&self, eta: T) -> T {
        let s = T::one() - eta;
        s * s * self.w00 + eta * s * (self.w01 + self.w10) + eta * eta * self.w11
    }
}

/// `eta0 = (2 W00 - W10 - W01) / (2 (W11 + W00 - W10 - W01))`.
///
/// Not clamped to `[0, 1]`.
pub fn optimal_eta<T: Scalar>(w: &WorkDensities<T>) -> Result<T, SplitError> {
    let den = w.denominator();
    let scale = [w.w00, w.w01, w.w10, w.w11]
        .iter()
        .fold(T::zero(), |m, v| m.max(v.abs()));
    if !(den.abs() > lit::<T>(1e-14) * scale) {
        return Err(SplitError::DegenerateSplit {
            denominator: den.to_f64_lossy(),
        });
    }
    Ok((lit::<T>(2.0) * w.w00 - w.w10 - w.w01) / den)
}

/// `int f . v` by the mid-edge rule, `v` taken as P1.
pub fn work_integral<T: Scalar, S: SourceField<T> + ?Sized>(
    mesh: &TriMesh<T>,
    source: &S,
    sol: &FieldSolution<T>,
) -> T {
    let rule = TriangleRule::<T>::mid_edge();
    let mut total = T::zero();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for (x, l, w) in rule.on(&mesh.triangle_points(t), mesh.area(t)) {
            let f = source.eval(x);
            let v = sol.at_barycentric(tri, &l);
            let dot = f.iter().zip(&v).fold(T::zero(), |s, (&a, &b)| s + a * b);
            total = total + w * dot;
        }
    }
    total
}

/// Work of the load split at `load_eta` (0 or 1) against `sol`.
pub fn work_density<T: Scalar>(
    load_eta: T,
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    load: &LoadSpec<T>,
    m: &MaterialParams<T>,
) -> T {
    work_integral(mesh, &RhsVector::new(load, m, load_eta), sol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport<T> {
    pub works: WorkDensities<T>,
    /// Optimal value, or `None` if the split was degenerate.
    pub eta0: Option<T>,
    /// The value actually used.
    pub eta: T,
    pub solves: [SolveReport; 2],
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome<T> {
    pub solution: FieldSolution<T>,
    pub v0: FieldSolution<T>,
    pub v1: FieldSolution<T>,
    pub report: SplitReport<T>,
}

/// Factors the stiffness matrix once and solves for any splitting value.
pub struct EtaSolver<'a, T: Scalar> {
    mesh: &'a TriMesh<T>,
    load: LoadSpec<T>,
    material: MaterialParams<T>,
    mask: DirichletMask,
    solver: PreparedSolver<T>,
}

impl<'a, T: Scalar> EtaSolver<'a, T> {
    pub fn new(
        mesh: &'a TriMesh<T>,
        table: &OperatorTable<T>,
        load: &LoadSpec<T>,
        material: &MaterialParams<T>,
        bc: &BcSpec,
        options: SolverOptions,
    ) -> Result<Self, SplitError> {
        let (matrix, mask) = assemble_matrix(mesh, table, bc)?;
        let solver = PreparedSolver::new(matrix, options)?;
        Ok(Self {
            mesh,
            load: load.clone(),
            material: *material,
            mask,
            solver,
        })
    }

    pub fn mask(&self) -> &DirichletMask {
        &self.mask
    }

    pub fn solver(&self) -> &PreparedSolver<T> {
        &self.solver
    }

    pub fn rhs(&self, eta: T) -> RhsVector<T> {
        RhsVector::new(&self.load, &self.material, eta)
    }

    /// Solves `K v = F(eta)` directly.
    pub fn solve_eta(&self, eta: T) -> Result<(FieldSolution<T>, SolveReport), SplitError> {
        let f = assemble_load(self.mesh, &self.rhs(eta), &self.mask);
        let (mut x, report) = self.solver.solve(&f)?;
        for (xi, &c) in x.iter_mut().zip(self.mask.flags()) {
            if c {
                *xi = T::zero();
            }
        }
        Ok((FieldSolution::new(self.mesh.n_nodes(), x, eta), report))
    }

    /// `int f(eta) . sol`.
    pub fn work(&self, eta: T, sol: &FieldSolution<T>) -> T {
        work_integral(self.mesh, &self.rhs(eta), sol)
    }

    pub fn split(&self) -> Result<SplitOutcome<T>, SplitError> {
        let (v0, r0) = self.solve_eta(T::zero())?;
        let (v1, r1) = self.solve_eta(T::one())?;
        let works = WorkDensities {
            w00: self.work(T::zero(), &v0),
            w01: self.work(T::zero(), &v1),
            w10: self.work(T::one(), &v0),
            w11: self.work(T::one(), &v1),
        };
        let mut warnings = Vec::new();
        let eta0 = match optimal_eta(&works) {
            Ok(e) => Some(e),
            Err(err) => {
                let msg = format!("{err}; falling back to eta = 1");
                warn!("{msg}");
                warnings.push(msg);
                None
            }
        };
        let eta = eta0.unwrap_or(T::one());
        if eta0.is_some() && (eta < T::zero() || eta > T::one()) {
            let msg = format!("optimal eta {eta} lies outside [0, 1]");
            warn!("{msg}");
            warnings.push(msg);
        }
        let solution = FieldSolution::combine(&v0, &v1, eta);
        Ok(SplitOutcome {
            solution,
            v0,
            v1,
            report: SplitReport {
                works,
                eta0,
                eta,
                solves: [r0, r1],
                warnings,
            },
        })
    }
}

pub fn solve_with_splitting<T: Scalar>(
    mesh: &TriMesh<T>,
    table: &OperatorTable<T>,
    load: &LoadSpec<T>,
    material: &MaterialParams<T>,
    bc: &BcSpec,
    options: SolverOptions,
) -> Result<SplitOutcome<T>, SplitError> {
    EtaSolver::new(mesh, table, load, material, bc, options)?.split()
}

pub fn solve_fixed_eta<T: Scalar>(
    mesh: &TriMesh<T>,
    table: &OperatorTable<T>,
    load: &LoadSpec<T>,
    material: &MaterialParams<T>,
    bc: &BcSpec,
    eta: T,
    options: SolverOptions,
) -> Result<(FieldSolution<T>, SolveReport), SplitError> {
    EtaSolver::new(mesh, table, load, material, bc, options)?.solve_eta(eta)
}
