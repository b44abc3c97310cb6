//! Finite element solver for the bending of thin Cosserat (micropolar)
//! elastic plates.
//!
//! The plate is described by nine midplane fields
//! `[Psi1, Psi2, W, Omega3, Omega1_0, Omega2_0, W*, Omega_hat1, Omega_hat2]`
//! governed by a coupled second-order elliptic system. Each field is
//! approximated by continuous piecewise-linear elements on a triangle mesh.
//! The transverse pressure is split between two load paths by a parameter
//! `eta`, and the optimal split is found from two solves with one
//! factorization.
//!
//! A typical run:
//!
//! ```
//! use cosserat_core::{assembly::BcSpec, material, mesh, operator, solver, splitting};
//!
//! let m = material::MaterialParams::new(2.0, 1.0, 0.5, 1.0, 1.0, 0.5, 0.1).unwrap();
//! let table = operator::build_operator_table(&material::derive_coefficients(&m, 1.0).unwrap());
//! let plate = mesh::generate_rectangle(2.0, 2.0, 8, 8).unwrap();
//! let load = operator::LoadSpec::sinusoidal(1.0, 2.0, 2.0).unwrap();
//! let out = splitting::solve_with_splitting(
//!     &plate, &table, &load, &m, &BcSpec::clamped(), solver::SolverOptions::default(),
//! ).unwrap();
//! assert!(out.report.eta0.is_some());
//! ```
//!
//! All numerical code is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix `f64`.

pub mod assembly;
pub mod material;
pub mod mesh;
pub mod operator;
pub mod postproc;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod splitting;

use thiserror::Error;

pub use scalar::{Point, Scalar};

pub type Real = f64;
pub type MaterialParams = material::MaterialParams<f64>;
pub type StiffnessCoefficients = material::StiffnessCoefficients<f64>;
pub type TriMesh = mesh::TriMesh<f64>;
pub type OperatorTable = operator::OperatorTable<f64>;
pub type LoadSpec = operator::LoadSpec<f64>;
pub type CsrMatrix = sparse::CsrMatrix<f64>;
pub type BlockSystem = assembly::BlockSystem<f64>;
pub type FieldSolution = splitting::FieldSolution<f64>;
pub type SplitOutcome = splitting::SplitOutcome<f64>;
pub type ResultantField = postproc::ResultantField<f64>;

/// Any failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Material(#[from] material::MaterialError),
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Msh(#[from] mesh::msh::MshError),
    #[error(transparent)]
    NativeMesh(#[from] mesh::native::NativeMeshError),
    #[error(transparent)]
    Load(#[from] operator::LoadError),
    #[error(transparent)]
    Assembly(#[from] assembly::AssemblyError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Split(#[from] splitting::SplitError),
    #[error(transparent)]
    Scf(#[from] postproc::ScfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
