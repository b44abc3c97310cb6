use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cosserat_core::assembly::BcSpec;
use cosserat_core::mesh::{metrics, msh, native, refine_uniform, SegmentTag, TriMesh};
use cosserat_core::operator::{ManufacturedSolution, Variable};
use cosserat_core::postproc::{
    convergence_study, export, resultants, scf_study, Kinematics, MmsProblem, Norm, ScfSetup,
};
use cosserat_core::splitting::{EtaSolver, FieldSolution, SplitReport};
use thiserror::Error;

use crate::config::{ConfigError, EtaConfig, GeometryConfig, MmsBc, RunConfig};

/// Relative L2 tolerance of the linearity check.
pub const LINEARITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solver failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    f(&mut w).and_then(|_| w.flush()).map_err(wrap)
}

fn prepare_out(out: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    let text = cfg.to_toml();
    write_file(&out.join("effective_config.toml"), |w| w.write_all(text.as_bytes()))
}

fn refined(mut mesh: TriMesh<f64>, levels: usize) -> TriMesh<f64> {
    for _ in 0..levels {
        mesh = refine_uniform(&mesh);
    }
    mesh
}

fn split_report(r: &SplitReport<f64>, s: &mut String) {
    let w = &r.works;
    let _ = writeln!(s, "eta0 = {}", r.eta0.map_or("none".into(), |e| format!("{e:e}")));
    let _ = writeln!(s, "W00 = {:e}\nW01 = {:e}\nW10 = {:e}\nW11 = {:e}", w.w00, w.w01, w.w10, w.w11);
    for (k, solve) in r.solves.iter().enumerate() {
        let _ = writeln!(s, "residual_eta{k} = {:e}", solve.relative_residual);
    }
    for warning in &r.warnings {
        let _ = writeln!(s, "warning = {warning:?}");
    }
}

pub fn solve(cfg: &RunConfig, out: &Path, verify_linearity: bool) -> Result<(), CliError> {
    let m = cfg.material_params()?;
    let table = cfg.operator()?;
    let load = cfg.load_spec()?;
    let options = cfg.solver_options()?;
    let mesh = refined(cfg.base_mesh()?, cfg.refinements);
    prepare_out(out, cfg)?;

    let bc = cfg.bc_spec();
    let solver = EtaSolver::new(&mesh, &table, &load, &m, &bc, options).map_err(numerical)?;
    let mut report = String::new();
    let _ = writeln!(report, "nodes = {}\ntriangles = {}", mesh.n_nodes(), mesh.n_triangles());
    let _ = writeln!(report, "h_max = {}", metrics(&mesh).h_max);
    let (sol, parts) = match cfg.eta {
        EtaConfig::Mode(_) => {
            let o = solver.split().map_err(numerical)?;
            split_report(&o.report, &mut report);
            (o.solution, Some((o.v0, o.v1)))
        }
        EtaConfig::Fixed(eta) => {
            let (sol, r) = solver.solve_eta(eta).map_err(numerical)?;
            let _ = writeln!(report, "residual = {:e}", r.relative_residual);
            (sol, None)
        }
    };
    let _ = writeln!(report, "eta = {:e}", sol.eta);
    let _ = writeln!(report, "max_abs_W = {:e}", sol.max_abs(Variable::W));
    let kin = Kinematics::new(&sol, &mesh, &m);
    let _ = writeln!(report, "max_abs_u3_midplane = {:e}", kin.max_abs_u3(0.0));

    if verify_linearity {
        let (v0, v1) = match parts {
            Some(p) => p,
            None => (
                solver.solve_eta(0.0).map_err(numerical)?.0,
                solver.solve_eta(1.0).map_err(numerical)?.0,
            ),
        };
        let direct = solver.solve_eta(sol.eta).map_err(numerical)?.0;
        let diff = direct.relative_difference(&FieldSolution::combine(&v0, &v1, sol.eta));
        let _ = writeln!(report, "linearity_difference = {diff:e}");
        if !(diff <= LINEARITY_TOL) {
            fs::write(out.join("report.txt"), &report).ok();
            return Err(CliError::Numerical(format!(
                "linearity check failed: relative difference {diff:e} > {LINEARITY_TOL:e}"
            )));
        }
    }

    let res = resultants(&sol, &mesh, &m, &load);
    let o = &cfg.outputs;
    if !o.csv.is_empty() {
        write_file(&out.join(&o.csv), |w| export::write_nodes_csv(w, &mesh, &sol))?;
    }
    if !o.resultants_csv.is_empty() {
        write_file(&out.join(&o.resultants_csv), |w| export::write_resultants_csv(w, &mesh, &res))?;
    }
    if !o.vtk.is_empty() {
        write_file(&out.join(&o.vtk), |w| export::write_vtk(w, "cosserat plate", &mesh, &sol, Some(&res)))?;
    }
    write_file(&out.join("report.txt"), |w| w.write_all(report.as_bytes()))?;
    print!("{report}");
    Ok(())
}

pub fn mms(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let GeometryConfig::Rectangle { .. } = cfg.geometry else {
        return Err(CliError::Usage("mms needs a rectangle geometry".into()));
    };
    let (a, b) = cfg.extent()?;
    let table = cfg.operator()?;
    let options = cfg.solver_options()?;
    let mms = cfg.mms.clone().unwrap_or_default();
    let (exact, bc) = match mms.bc {
        MmsBc::Dirichlet => (ManufacturedSolution::dirichlet(a, b, mms.amplitudes), BcSpec::clamped()),
        MmsBc::Mixed => (
            ManufacturedSolution::simply_supported(a, b, mms.amplitudes),
            BcSpec::simply_supported(),
        ),
    };
    prepare_out(out, cfg)?;
    let problem = MmsProblem {
        table: &table,
        exact: &exact,
        bc: &bc,
        options,
    };
    let report = convergence_study(&cfg.base_mesh()?, cfg.refinements, &problem, |l| {
        log::info!("level {}: {} nodes, H1 {:e}, L2 {:e}", l.refinement, l.n_nodes, l.errors.h1, l.errors.l2);
    })
    .map_err(numerical)?;
    let text = format!(
        "Error in H1-norm\n{}\nError in L2-norm\n{}",
        report.table(Norm::H1),
        report.table(Norm::L2)
    );
    write_file(&out.join("mms.txt"), |w| w.write_all(text.as_bytes()))?;
    print!("{text}");
    Ok(())
}

pub fn scf(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg
        .scf
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing [scf] section".into()))?;
    let GeometryConfig::Rectangle { a, b, .. } = cfg.geometry else {
        return Err(CliError::Usage("scf needs a rectangle geometry (the outer plate)".into()));
    };
    if s.radii.len() < 2 {
        return Err(CliError::Usage("need ≥ 2 radii".into()));
    }
    let mut radii = s.radii.clone();
    radii.sort_by(f64::total_cmp);
    let setup = ScfSetup {
        a,
        b,
        center: s.center.unwrap_or([a / 2.0, b / 2.0]),
        density: s.density,
        material: cfg.material_params()?,
        load: cfg.load_spec()?,
        outer: cfg.bc.spec(),
        options: cfg.solver_options()?,
    };
    let table = cfg.operator()?;
    prepare_out(out, cfg)?;
    let study = scf_study(&setup, &table, &radii).map_err(numerical)?;
    let mut csv = String::from("radius,scf,peak_stress,eta\n");
    for c in &study.cases {
        let _ = writeln!(csv, "{},{},{},{}", c.radius, c.scf, c.peak_stress, c.eta);
    }
    write_file(&out.join("scf.csv"), |w| w.write_all(csv.as_bytes()))?;
    print!("{csv}");
    println!("nominal = {}", study.nominal);
    println!(
        "monotonic = {}",
        if study.is_nondecreasing() { "nondecreasing" } else { "violated" }
    );
    Ok(())
}

pub fn write_mesh(mesh: &TriMesh<f64>, path: &Path) -> Result<(), CliError> {
    let text = if path.extension().is_some_and(|e| e == "msh") {
        msh::write_msh(mesh)
    } else {
        native::write_native(mesh)
    };
    write_file(path, |w| w.write_all(text.as_bytes()))
}

pub fn mesh_info(mesh: &TriMesh<f64>) -> String {
    let mm = metrics(mesh);
    let (lo, hi) = mesh.bounding_box();
    let mut s = format!(
        "nodes = {}\ntriangles = {}\nh_max = {}\narea = {}\nbounding_box = [{}, {}] x [{}, {}]\neuler_characteristic = {}\n",
        mm.n_nodes,
        mm.n_triangles,
        mm.h_max,
        mesh.total_area(),
        lo[0],
        hi[0],
        lo[1],
        hi[1],
        mesh.euler_characteristic()
    );
    for tag in mesh.tags() {
        let count = mesh.boundary_edges().iter().filter(|e| e.tag == tag).count();
        let name = match tag {
            SegmentTag::G1 => "G1".to_string(),
            SegmentTag::G2 => "G2".to_string(),
            SegmentTag::G3 => "G3".to_string(),
            SegmentTag::G4 => "G4".to_string(),
            SegmentTag::HOLE => "HOLE".to_string(),
            SegmentTag(t) => t.to_string(),
        };
        let _ = writeln!(s, "edges_{name} = {count}");
    }
    s
}
