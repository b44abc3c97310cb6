use std::fmt;

use crate::assembly::{assemble, BcSpec, ElementMatrices};
use crate::mesh::{refine_uniform_with_parents, TriMesh};
use crate::operator::{AnalyticField, ManufacturedSolution, OperatorTable};
use crate::quadrature::TriangleRule;
use crate::scalar::Scalar;
use crate::solver::{solve, SolverOptions};
use crate::splitting::{FieldSolution, SplitError};

/// Sum over the nine fields of the squared norms, square-rooted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub h1: f64,
    pub l2: f64,
}

/// `eL2^2 = sum_i int (u_i^h - u_i)^2`, `eH1^2 = eL2^2 + sum_i int |grad(u_i^h - u_i)|^2`,
/// by seven-point quadrature on every element.
pub fn error_norms<T: Scalar, F: AnalyticField<T>>(
    sol: &FieldSolution<T>,
    exact: &[F; 9],
    mesh: &TriMesh<T>,
) -> ErrorNorms {
    let rule = TriangleRule::<T>::degree5();
    let (mut l2, mut semi) = (0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        let el = ElementMatrices::new(&pts).expect("valid mesh has no degenerate elements");
        let grads: [[T; 2]; 9] = std::array::from_fn(|i| {
            let f = sol.field(crate::operator::Variable::ALL[i]);
            let mut g = [T::zero(); 2];
            for (a, &p) in tri.iter().enumerate() {
                g[0] = g[0] + f[p] * el.gradients[a][0];
                g[1] = g[1] + f[p] * el.gradients[a][1];
            }
            g
        });
        for (x, l, w) in rule.on(&pts, el.area) {
            let v = sol.at_barycentric(tri, &l);
            let w = w.to_f64_lossy();
            for i in 0..9 {
                let e = (v[i] - exact[i].value(x)).to_f64_lossy();
                let ge = exact[i].gradient(x);
                let dx = (grads[i][0] - ge[0]).to_f64_lossy();
                let dy = (grads[i][1] - ge[1]).to_f64_lossy();
                l2 += w * e * e;
                semi += w * (dx * dx + dy * dy);
            }
        }
    }
    ErrorNorms {
        h1: (l2 + semi).sqrt(),
        l2: l2.sqrt(),
    }
}

/// Norms of the difference of two P1 solutions on the same mesh. Exact up
/// to rounding, since the integrands are polynomials of degree two.
pub fn difference_norms<T: Scalar>(a: &FieldSolution<T>, b: &FieldSolution<T>, mesh: &TriMesh<T>) -> ErrorNorms {
    assert_eq!(a.n_nodes(), mesh.n_nodes());
    assert_eq!(b.n_nodes(), mesh.n_nodes());
    let (mut l2, mut semi) = (0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let el = ElementMatrices::new(&mesh.triangle_points(t)).expect("valid mesh");
        for var in crate::operator::Variable::ALL {
            let (fa, fb) = (a.field(var), b.field(var));
            let d: [f64; 3] = std::array::from_fn(|k| (fa[tri[k]] - fb[tri[k]]).to_f64_lossy());
            let mut g = [0.0; 2];
            for k in 0..3 {
                for (r, m) in el.mass[k].iter().enumerate() {
                    l2 += d[k] * m.to_f64_lossy() * d[r];
                }
                g[0] += d[k] * el.gradients[k][0].to_f64_lossy();
                g[1] += d[k] * el.gradients[k][1].to_f64_lossy();
            }
            semi += el.area.to_f64_lossy() * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    ErrorNorms {
        h1: (l2 + semi).sqrt(),
        l2: l2.max(0.0).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelError {
    pub refinement: usize,
    pub n_nodes: usize,
    pub h_max: f64,
    pub errors: ErrorNorms,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorReport {
    pub levels: Vec<LevelError>,
}

/// `log2(e_k / e_{k+1})` for consecutive levels.
pub fn rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

impl ErrorReport {
    pub fn h1_rates(&self) -> Vec<f64> {
        rates(&self.levels.iter().map(|l| l.errors.h1).collect::<Vec<_>>())
    }

    pub fn l2_rates(&self) -> Vec<f64> {
        rates(&self.levels.iter().map(|l| l.errors.l2).collect::<Vec<_>>())
    }

    /// Rate table with the columns Refinements, Number of Nodes, Diameter,
    /// Error, Convergence Rate.
    pub fn table(&self, norm: Norm) -> String {
        let errs: Vec<f64> = self
            .levels
            .iter()
            .map(|l| match norm {
                Norm::H1 => l.errors.h1,
                Norm::L2 => l.errors.l2,
            })
            .collect();
        let r = rates(&errs);
        let mut out = format!(
            "{:<12} {:>15} {:>10} {:>14} {:>16}\n",
            "Refinements", "Number of Nodes", "Diameter", format!("Error ({norm})"), "Convergence Rate"
        );
        for (k, l) in self.levels.iter().enumerate() {
            let rate = if k == 0 { String::new() } else { format!("{:.2}", r[k - 1]) };
            out.push_str(&format!(
                "{:<12} {:>15} {:>10.6} {:>14.6e} {:>16}\n",
                l.refinement, l.n_nodes, l.h_max, errs[k], rate
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    H1,
    L2,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::H1 => "H1",
            Norm::L2 => "L2",
        })
    }
}

/// A manufactured-solution problem: the operator, the exact fields and the
/// boundary conditions they satisfy.
pub struct MmsProblem<'a, T> {
    pub table: &'a OperatorTable<T>,
    pub exact: &'a ManufacturedSolution<T>,
    pub bc: &'a BcSpec,
    pub options: SolverOptions,
}

/// Solves on `initial` and on `refinements` successive red refinements and
/// records the errors against the exact solution.
pub fn convergence_study<T: Scalar>(
    initial: &TriMesh<T>,
    refinements: usize,
    problem: &MmsProblem<'_, T>,
    mut on_level: impl FnMut(&LevelError),
) -> Result<ErrorReport, SplitError> {
    let mut mesh = initial.clone();
    let mut report = ErrorReport::default();
    for k in 0..=refinements {
        if k > 0 {
            mesh = refine_uniform_with_parents(&mesh).mesh;
        }
        let source = problem.exact.source(problem.table);
        let sys = assemble(&mesh, problem.table, &source, problem.bc)?;
        let (x, _) = solve(&sys.matrix, &sys.rhs, &problem.options)?;
        let sol = FieldSolution::new(mesh.n_nodes(), x, T::zero());
        let level = LevelError {
            refinement: k,
            n_nodes: mesh.n_nodes(),
            h_max: mesh.metrics().h_max.to_f64_lossy(),
            errors: error_norms(&sol, &problem.exact.fields, &mesh),
        };
        on_level(&level);
        report.levels.push(level);
    }
    Ok(report)
}

/// Convergence without an exact solution. Each level is prolongated onto
/// the next, and the norms of successive differences `u_{k+1} - u_k` play
/// the role of errors; their ratios converge to the same rates.
pub fn self_convergence<T: Scalar>(
    initial: &TriMesh<T>,
    refinements: usize,
    mut solve_on: impl FnMut(&TriMesh<T>) -> Result<FieldSolution<T>, SplitError>,
) -> Result<ErrorReport, SplitError> {
    let mut mesh = initial.clone();
    let mut prev = solve_on(&mesh)?;
    let mut report = ErrorReport::default();
    for k in 1..=refinements {
        let refined = refine_uniform_with_parents(&mesh);
        let sol = solve_on(&refined.mesh)?;
        let n = refined.mesh.n_nodes();
        let mut values = Vec::with_capacity(9 * n);
        for var in crate::operator::Variable::ALL {
            values.extend(refined.prolongate(prev.field(var)));
        }
        let coarse = FieldSolution::new(n, values, prev.eta);
        report.levels.push(LevelError {
            refinement: k,
            n_nodes: n,
            h_max: mesh.metrics().h_max.to_f64_lossy(),
            errors: difference_norms(&sol, &coarse, &refined.mesh),
        });
        mesh = refined.mesh;
        prev = sol;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_rectangle;
    use crate::operator::Quadratic;

    #[test]
    fn linear_fields_have_zero_error() {
        let mesh = generate_rectangle::<f64>(2.0, 1.0, 3, 2).unwrap();
        let exact: [Quadratic<f64>; 9] =
            std::array::from_fn(|i| Quadratic { coeffs: [i as f64, 0.5, -1.0 + i as f64, 0.0, 0.0, 0.0] });
        let sol = FieldSolution::interpolate(&mesh, |x| std::array::from_fn(|i| exact[i].value(x)));
        let e = error_norms(&sol, &exact, &mesh);
        assert!(e.h1 < 1e-13 && e.l2 < 1e-13);
    }

    #[test]
    fn quadratic_interpolation_error_is_exact() {
        // u = x^2 on the unit square, one variable; the interpolation error
        // on each element is computed exactly by the degree-5 rule, so two
        // meshes give an exact ratio of 4 in L2.
        let exact: [Quadratic<f64>; 9] = std::array::from_fn(|i| Quadratic {
            coeffs: if i == 0 { [0.0, 0.0, 0.0, 1.0, 0.0, 0.0] } else { [0.0; 6] },
        });
        let e = |n: usize| {
            let mesh = generate_rectangle::<f64>(1.0, 1.0, n, n).unwrap();
            let sol = FieldSolution::interpolate(&mesh, |x| std::array::from_fn(|i| exact[i].value(x)));
            error_norms(&sol, &exact, &mesh)
        };
        let (a, b) = (e(4), e(8));
        assert!((a.l2 / b.l2 - 4.0).abs() < 1e-10);
    }

    #[test]
    fn difference_norms_agree_with_quadrature() {
        let mesh = generate_rectangle::<f64>(1.0, 1.0, 3, 3).unwrap();
        let a = FieldSolution::interpolate(&mesh, |x| [x[0] * x[0], x[1], 0.0, 0.0, 0.0, 0.0, 0.0, x[0] * x[1], 1.0]);
        let b = FieldSolution::zeros(mesh.n_nodes());
        // a as an exact field is the same P1 function; compare to error_norms
        // against zero fields
        let zero = [Quadratic { coeffs: [0.0; 6] }; 9];
        let want = error_norms(&a, &zero, &mesh);
        let got = difference_norms(&a, &b, &mesh);
        assert!((want.l2 - got.l2).abs() < 1e-13 && (want.h1 - got.h1).abs() < 1e-13);
    }

    #[test]
    fn triangle_inequality() {
        let mesh = generate_rectangle::<f64>(1.0, 1.0, 3, 3).unwrap();
        let f = |s: f64| FieldSolution::interpolate(&mesh, move |x| std::array::from_fn(|i| (s * x[0] + i as f64 * x[1]).sin()));
        let (a, b, c) = (f(1.0), f(2.0), f(-0.5));
        let ab = difference_norms(&a, &b, &mesh);
        let bc = difference_norms(&b, &c, &mesh);
        let ac = difference_norms(&a, &c, &mesh);
        assert!(ac.h1 <= ab.h1 + bc.h1 + 1e-15);
        assert!(ac.l2 <= ab.l2 + bc.l2 + 1e-15);
    }

    #[test]
    fn table_rates() {
        assert!((rates(&[1.620369, 0.711098])[0] - 1.19).abs() < 0.005);
        assert!((rates(&[0.279484, 0.069632])[0] - 2.00).abs() < 0.005);
        let report = ErrorReport {
            levels: vec![
                LevelError { refinement: 0, n_nodes: 4, h_max: 1.0, errors: ErrorNorms { h1: 1.0, l2: 1.0 } },
                LevelError { refinement: 1, n_nodes: 9, h_max: 0.5, errors: ErrorNorms { h1: 0.5, l2: 0.25 } },
            ],
        };
        assert_eq!(report.h1_rates(), vec![1.0]);
        assert_eq!(report.l2_rates(), vec![2.0]);
        let t = report.table(Norm::L2);
        assert!(t.lines().nth(2).unwrap().trim_end().ends_with("2.00"));
    }
}
