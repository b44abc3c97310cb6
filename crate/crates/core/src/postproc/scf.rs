use thiserror::Error;

use crate::assembly::BcSpec;
use crate::material::MaterialParams;
use crate::mesh::{generate_plate_with_hole, generate_rectangle, HoleSpec, MeshError, SegmentTag, TriMesh};
use crate::operator::{LoadSpec, OperatorTable};
use crate::scalar::{lit, Point, Scalar};
use crate::solver::SolverOptions;
use crate::splitting::{solve_with_splitting, FieldSolution, SplitError};

use super::resultants::resultants;

#[derive(Debug, Error)]
pub enum ScfError {
    #[error("mesh has no HOLE-tagged boundary")]
    MissingHole,
    #[error("nominal stress must be positive, got {0}")]
    NonPositiveNominal(f64),
    #[error("point ({0}, {1}) lies outside the mesh")]
    Outside(f64, f64),
    #[error("need ≥ 2 radii")]
    TooFewRadii,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// Top-fiber bending stress `6 |M11| / h^2` on every element.
pub fn bending_stress<T: Scalar>(
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    m: &MaterialParams<T>,
    load: &LoadSpec<T>,
) -> Vec<T> {
    let k = lit::<T>(6.0) / (m.thickness * m.thickness);
    resultants(sol, mesh, m, load)
        .elements
        .iter()
        .map(|e| k * e.m[0][0].abs())
        .collect()
}

/// Bending stress at `x`, averaged over the elements whose closure holds it.
pub fn nominal_stress<T: Scalar>(
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    m: &MaterialParams<T>,
    load: &LoadSpec<T>,
    x: Point<T>,
) -> Result<T, ScfError> {
    let stress = bending_stress(sol, mesh, m, load);
    let tol = lit::<T>(-1e-10);
    let (mut sum, mut count) = (T::zero(), 0usize);
    for (t, s) in stress.iter().enumerate() {
        if mesh.barycentric(t, x).iter().all(|&l| l >= tol) {
            sum = sum + *s;
            count += 1;
        }
    }
    if count == 0 {
        return Err(ScfError::Outside(x[0].to_f64_lossy(), x[1].to_f64_lossy()));
    }
    Ok(sum / T::from_usize_lossy(count))
}

/// Peak bending stress over the elements touching the hole rim, divided by
/// `nominal`.
pub fn stress_concentration<T: Scalar>(
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    m: &MaterialParams<T>,
    load: &LoadSpec<T>,
    nominal: T,
) -> Result<T, ScfError> {
    if !mesh.has_tag(SegmentTag::HOLE) {
        return Err(ScfError::MissingHole);
    }
    if !(nominal > T::zero()) {
        return Err(ScfError::NonPositiveNominal(nominal.to_f64_lossy()));
    }
    let stress = bending_stress(sol, mesh, m, load);
    let peak = mesh
        .triangles_touching_tag(SegmentTag::HOLE)
        .into_iter()
        .map(|t| stress[t])
        .fold(T::zero(), T::max);
    Ok(peak / nominal)
}

/// Plate, load and discretization shared by every hole radius.
#[derive(Debug, Clone)]
pub struct ScfSetup<T> {
    pub a: T,
    pub b: T,
    pub center: Point<T>,
    /// Target edge length for both the hole-free and the holed meshes.
    pub density: T,
    pub material: MaterialParams<T>,
    pub load: LoadSpec<T>,
    /// Boundary conditions on the outer edges; the rim is always free.
    pub outer: BcSpec,
    pub options: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfCase<T> {
    pub radius: T,
    pub peak_stress: T,
    pub scf: T,
    pub eta: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfStudy<T> {
    pub nominal: T,
    pub cases: Vec<ScfCase<T>>,
}

impl<T: Scalar> ScfStudy<T> {
    pub fn is_nondecreasing(&self) -> bool {
        self.cases.windows(2).all(|w| w[1].scf >= w[0].scf)
    }
}

/// Solves the hole-free plate for the nominal stress at the hole center,
/// then each holed plate with the same load and splitting rule.
pub fn scf_study<T: Scalar>(
    setup: &ScfSetup<T>,
    table: &OperatorTable<T>,
    radii: &[T],
) -> Result<ScfStudy<T>, ScfError> {
    if radii.len() < 2 {
        return Err(ScfError::TooFewRadii);
    }
    let cells = |len: T| (len / setup.density).ceil().to_usize().unwrap_or(1).max(2);
    let plain = generate_rectangle(setup.a, setup.b, cells(setup.a), cells(setup.b))?;
    let base = solve_with_splitting(
        &plain,
        table,
        &setup.load,
        &setup.material,
        &setup.outer,
        setup.options,
    )?;
    let nominal = nominal_stress(&base.solution, &plain, &setup.material, &setup.load, setup.center)?;
    let bc = setup.outer.clone().with_free(SegmentTag::HOLE);
    let mut cases = Vec::with_capacity(radii.len());
    for &radius in radii {
        let mesh = generate_plate_with_hole(&HoleSpec {
            a: setup.a,
            b: setup.b,
            radius,
            center: setup.center,
            density: setup.density,
        })?;
        let out = solve_with_splitting(&mesh, table, &setup.load, &setup.material, &bc, setup.options)?;
        let scf = stress_concentration(&out.solution, &mesh, &setup.material, &setup.load, nominal)?;
        cases.push(ScfCase {
            radius,
            peak_stress: scf * nominal,
            scf,
            eta: out.report.eta,
        });
    }
    Ok(ScfStudy { nominal, cases })
}
