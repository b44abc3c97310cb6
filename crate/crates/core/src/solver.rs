//! Linear solvers for the assembled nonsymmetric system.

use std::fmt;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use thiserror::Error;

use crate::scalar::{lit, Scalar};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Sparse LU with partial pivoting.
    #[default]
    Direct,
    /// Restarted GMRES preconditioned by ILU(0).
    Iterative,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Direct => "direct",
            SolverKind::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Target relative residual `|K x - F| / |F|`.
    pub tol: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Direct,
            tol: 1e-10,
            max_iterations: 20_000,
            restart: 80,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(SolverError::InvalidTolerance(self.tol));
        }
        if self.restart == 0 || self.max_iterations == 0 {
            return Err(SolverError::InvalidOptions("restart and max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("tolerance {0} outside (0, 1e-2]")]
    InvalidTolerance(f64),
    #[error("{0}")]
    InvalidOptions(&'static str),
    #[error("matrix is not square or does not match the right-hand side")]
    DimensionMismatch,
    #[error("system is singular or numerically singular")]
    SingularSystem,
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: SolverKind,
    pub relative_residual: f64,
    /// Krylov iterations, or refinement sweeps for the direct path.
    pub iterations: usize,
}

/// `|K x - F| / |F|`, with `|F| = 0` treated as an absolute residual.
pub fn relative_residual<T: Scalar>(k: &CsrMatrix<T>, x: &[T], f: &[T]) -> f64 {
    let kx = k.matvec(x);
    let r = norm(kx.iter().zip(f).map(|(&a, &b)| a - b));
    let nf = norm(f.iter().copied());
    if nf > 0.0 {
        r / nf
    } else {
        r
    }
}

fn norm<T: Scalar>(v: impl Iterator<Item = T>) -> f64 {
    v.map(|x| {
        let x = x.to_f64_lossy();
        x * x
    })
    .sum::<f64>()
    .sqrt()
}

enum Backend<T: Scalar> {
    Direct(faer::sparse::linalg::solvers::Lu<usize, T>),
    Iterative(Ilu0<T>),
}

/// A factorized or preconditioned matrix, reusable for several right-hand
/// sides.
pub struct PreparedSolver<T: Scalar> {
    matrix: CsrMatrix<T>,
    options: SolverOptions,
    backend: Backend<T>,
}

impl<T: Scalar> PreparedSolver<T> {
    pub fn new(matrix: CsrMatrix<T>, options: SolverOptions) -> Result<Self, SolverError> {
        options.validate()?;
        if matrix.n_rows() != matrix.n_cols() {
            return Err(SolverError::DimensionMismatch);
        }
        let backend = match options.kind {
            SolverKind::Direct => {
                let n = matrix.n_rows();
                let triplets: Vec<Triplet<usize, usize, T>> = matrix
                    .triplets()
                    .map(|(row, col, val)| Triplet { row, col, val })
                    .collect();
                let a = SparseColMat::<usize, T>::try_new_from_triplets(n, n, &triplets)
                    .map_err(|_| SolverError::DimensionMismatch)?;
                Backend::Direct(a.sp_lu().map_err(|_| SolverError::SingularSystem)?)
            }
            SolverKind::Iterative => Backend::Iterative(Ilu0::new(&matrix)?),
        };
        Ok(Self {
            matrix,
            options,
            backend,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn solve(&self, rhs: &[T]) -> Result<(Vec<T>, SolveReport), SolverError> {
        if rhs.len() != self.matrix.n_rows() {
            return Err(SolverError::DimensionMismatch);
        }
        if rhs.iter().all(|v| v.is_zero()) {
            let report = SolveReport {
                method: self.options.kind,
                relative_residual: 0.0,
                iterations: 0,
            };
            return Ok((vec![T::zero(); rhs.len()], report));
        }
        match &self.backend {
            Backend::Direct(lu) => self.solve_direct(lu, rhs),
            Backend::Iterative(ilu) => gmres(&self.matrix, ilu, rhs, &self.options),
        }
    }

    fn solve_direct(
        &self,
        lu: &faer::sparse::linalg::solvers::Lu<usize, T>,
        rhs: &[T],
    ) -> Result<(Vec<T>, SolveReport), SolverError> {
        let n = rhs.len();
        let apply = |b: &[T]| -> Vec<T> {
            let mut m = Mat::<T>::from_fn(n, 1, |i, _| b[i]);
            lu.solve_in_place(m.as_mut());
            (0..n).map(|i| m[(i, 0)]).collect()
        };
        let mut x = apply(rhs);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::SingularSystem);
        }
        let mut res = relative_residual(&self.matrix, &x, rhs);
        let mut sweeps = 0;
        // a few sweeps of iterative refinement recover digits lost to pivoting
        while res > self.options.tol && sweeps < 5 {
            let kx = self.matrix.matvec(&x);
            let r: Vec<T> = rhs.iter().zip(&kx).map(|(&b, &a)| b - a).collect();
            let dx = apply(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi = *xi + d;
            }
            let next = relative_residual(&self.matrix, &x, rhs);
            sweeps += 1;
            if !next.is_finite() {
                return Err(SolverError::SingularSystem);
            }
            if next >= res {
                res = next;
                break;
            }
            res = next;
        }
        if !res.is_finite() {
            return Err(SolverError::SingularSystem);
        }
        if res > self.options.tol {
            return Err(SolverError::NonConvergence {
                iterations: sweeps,
                residual: res,
            });
        }
        Ok((
            x,
            SolveReport {
                method: SolverKind::Direct,
                relative_residual: res,
                iterations: sweeps,
            },
        ))
    }
}

pub fn solve<T: Scalar>(
    matrix: &CsrMatrix<T>,
    rhs: &[T],
    options: &SolverOptions,
) -> Result<(Vec<T>, SolveReport), SolverError> {
    PreparedSolver::new(matrix.clone(), *options)?.solve(rhs)
}

/// Incomplete LU on the sparsity pattern of the matrix. `L` has a unit
/// diagonal and shares storage with `U`.
struct Ilu0<T> {
    lu: CsrMatrix<T>,
    diag: Vec<usize>,
}

impl<T: Scalar> Ilu0<T> {
    fn new(a: &CsrMatrix<T>) -> Result<Self, SolverError> {
        let n = a.n_rows();
        let mut lu = a.clone();
        let diag: Vec<usize> = (0..n)
            .map(|i| lu.position(i, i).ok_or(SolverError::SingularSystem))
            .collect::<Result<_, _>>()?;
        let row_ptr = lu.row_ptr().to_vec();
        let col_idx = lu.col_idx().to_vec();
        let vals = lu.values_mut();
        let mut where_in_row = vec![usize::MAX; n];
        for i in 0..n {
            let span = row_ptr[i]..row_ptr[i + 1];
            for p in span.clone() {
                where_in_row[col_idx[p]] = p;
            }
            for p in span.clone() {
                let k = col_idx[p];
                if k >= i {
                    break;
                }
                let pivot = vals[diag[k]];
                if pivot.is_zero() {
                    return Err(SolverError::SingularSystem);
                }
                let lik = vals[p] / pivot;
                vals[p] = lik;
                for q in diag[k] + 1..row_ptr[k + 1] {
                    let w = where_in_row[col_idx[q]];
                    if w != usize::MAX {
                        vals[w] = vals[w] - lik * vals[q];
                    }
                }
            }
            for p in span {
                where_in_row[col_idx[p]] = usize::MAX;
            }
            if vals[diag[i]].is_zero() || !vals[diag[i]].is_finite() {
                return Err(SolverError::SingularSystem);
            }
        }
        Ok(Self { lu, diag })
    }

    fn apply(&self, b: &[T], out: &mut [T]) {
        let n = b.len();
        let (rp, ci, v) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.values());
        for i in 0..n {
            let mut s = b[i];
            for p in rp[i]..self.diag[i] {
                s = s - v[p] * out[ci[p]];
            }
            out[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = out[i];
            for p in self.diag[i] + 1..rp[i + 1] {
                s = s - v[p] * out[ci[p]];
            }
            out[i] = s / v[self.diag[i]];
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

fn nrm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Right-preconditioned restarted GMRES with modified Gram-Schmidt.
fn gmres<T: Scalar>(
    a: &CsrMatrix<T>,
    m: &Ilu0<T>,
    b: &[T],
    opts: &SolverOptions,
) -> Result<(Vec<T>, SolveReport), SolverError> {
    let n = b.len();
    let tol = lit::<T>(opts.tol);
    let bnorm = nrm(b);
    let restart = opts.restart.min(n.max(1));
    let mut x = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut total = 0;
    let mut last = f64::INFINITY;
    let mut stalled = 0;
    loop {
        a.matvec_into(&x, &mut tmp);
        let r: Vec<T> = b.iter().zip(&tmp).map(|(&bi, &ai)| bi - ai).collect();
        let beta = nrm(&r);
        let rel = (beta / bnorm).to_f64_lossy();
        if rel <= opts.tol {
            let check = relative_residual(a, &x, b);
            return Ok((
                x,
                SolveReport {
                    method: SolverKind::Iterative,
                    relative_residual: check,
                    iterations: total,
                },
            ));
        }
        if !rel.is_finite() {
            return Err(SolverError::SingularSystem);
        }
        if total >= opts.max_iterations {
            return Err(SolverError::NonConvergence {
                iterations: total,
                residual: rel,
            });
        }
        // stagnation across restarts
        if rel > 0.999 * last {
            stalled += 1;
            if stalled >= 3 {
                return Err(SolverError::NonConvergence {
                    iterations: total,
                    residual: rel,
                });
            }
        } else {
            stalled = 0;
        }
        last = rel;

        let mut basis: Vec<Vec<T>> = Vec::with_capacity(restart + 1);
        basis.push(r.iter().map(|&v| v / beta).collect());
        let mut h = vec![vec![T::zero(); restart]; restart + 1];
        let mut cs = vec![T::zero(); restart];
        let mut sn = vec![T::zero(); restart];
        let mut g = vec![T::zero(); restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            m.apply(&basis[k], &mut tmp);
            a.matvec_into(&tmp, &mut w);
            for (j, v) in basis.iter().enumerate() {
                let hjk = dot(&w, v);
                h[j][k] = hjk;
                for (wi, &vi) in w.iter_mut().zip(v) {
                    *wi = *wi - hjk * vi;
                }
            }
            let hn = nrm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom.is_zero() {
                return Err(SolverError::SingularSystem);
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = T::zero();
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            k_used = k + 1;
            total += 1;
            let happy = hn <= T::epsilon() * beta;
            if g[k + 1].abs() <= tol * bnorm || happy || total >= opts.max_iterations {
                break;
            }
            basis.push(w.iter().map(|&v| v / hn).collect());
        }
        let mut y = vec![T::zero(); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s = s - h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut z = vec![T::zero(); n];
        for (j, &yj) in y.iter().enumerate() {
            for (zi, &vi) in z.iter_mut().zip(&basis[j]) {
                *zi = *zi + yj * vi;
            }
        }
        m.apply(&z, &mut tmp);
        for (xi, &d) in x.iter_mut().zip(&tmp) {
            *xi = *xi + d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both() -> [SolverOptions; 2] {
        [
            SolverOptions::default(),
            SolverOptions {
                kind: SolverKind::Iterative,
                ..Default::default()
            },
        ]
    }

    #[test]
    fn identity_returns_rhs() {
        let k = CsrMatrix::<f64>::identity(5);
        let f = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        for opts in both() {
            let (x, rep) = solve(&k, &f, &opts).unwrap();
            for (a, b) in x.iter().zip(&f) {
                assert!((a - b).abs() <= 1e-15 * b.abs());
            }
            assert!(rep.relative_residual <= 1e-15);
        }
    }

    /// `-u'' = 1` on (0,1), u(0) = u(1) = 0, linear elements on n cells:
    /// the nodal values are exact, `x (1 - x) / 2`.
    #[test]
    fn poisson_tridiagonal() {
        let n = 16;
        let h = 1.0 / n as f64;
        let mut trip = Vec::new();
        for i in 0..n - 1 {
            trip.push((i, i, 2.0 / h));
            if i > 0 {
                trip.push((i, i - 1, -1.0 / h));
            }
            if i + 1 < n - 1 {
                trip.push((i, i + 1, -1.0 / h));
            }
        }
        let k = CsrMatrix::from_triplets(n - 1, n - 1, &trip);
        let f = vec![h; n - 1];
        for opts in both() {
            let (x, _) = solve(&k, &f, &opts).unwrap();
            for (i, xi) in x.iter().enumerate() {
                let t = (i + 1) as f64 * h;
                assert!((xi - t * (1.0 - t) / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nonsymmetric_system_residual_verified() {
        let n = 60;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 4.0 + (i % 3) as f64));
            if i > 0 {
                trip.push((i, i - 1, -1.5));
            }
            if i + 2 < n {
                trip.push((i, i + 2, 0.7));
            }
        }
        let k = CsrMatrix::from_triplets(n, n, &trip);
        let f: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        for opts in both() {
            let (x, rep) = solve(&k, &f, &opts).unwrap();
            let independent = relative_residual(&k, &x, &f);
            assert!(rep.relative_residual <= opts.tol);
            assert!(independent <= opts.tol);
            let (y, _) = solve(&k, &f, &opts).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let k = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        for opts in both() {
            let err = solve(&k, &[1.0, 2.0], &opts).unwrap_err();
            assert!(
                matches!(err, SolverError::SingularSystem | SolverError::NonConvergence { .. }),
                "{err:?}"
            );
        }
    }

    #[test]
    fn tolerance_range_checked() {
        let k = CsrMatrix::<f64>::identity(2);
        for tol in [0.0, -1.0, 0.5] {
            let opts = SolverOptions { tol, ..Default::default() };
            assert_eq!(solve(&k, &[1.0, 1.0], &opts).unwrap_err(), SolverError::InvalidTolerance(tol));
        }
    }
}
