//! Plot-ready text output: CSV tables and legacy ASCII VTK.
//!
//! Numbers are printed with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use std::io::{self, Write};

use crate::mesh::TriMesh;
use crate::operator::Variable;
use crate::scalar::Scalar;
use crate::splitting::FieldSolution;

use super::resultants::{ElementResultants, ResultantField};

/// One row per node: `x,y,Psi1,...,Omega_hat2`.
pub fn write_nodes_csv<T: Scalar, W: Write>(
    mut w: W,
    mesh: &TriMesh<T>,
    sol: &FieldSolution<T>,
) -> io::Result<()> {
    write!(w, "x,y")?;
    for v in Variable::ALL {
        write!(w, ",{}", v.name())?;
    }
    writeln!(w)?;
    for (n, p) in mesh.nodes().iter().enumerate() {
        write!(w, "{},{}", p[0], p[1])?;
        for f in sol.at_node(n) {
            write!(w, ",{f}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One row per element: index, centroid and the twenty resultant components.
pub fn write_resultants_csv<T: Scalar, W: Write>(
    mut w: W,
    mesh: &TriMesh<T>,
    res: &ResultantField<T>,
) -> io::Result<()> {
    write!(w, "element,cx,cy")?;
    for name in ElementResultants::<T>::NAMES {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for (t, e) in res.elements.iter().enumerate() {
        let c = mesh.centroid(t);
        write!(w, "{t},{},{}", c[0], c[1])?;
        for v in e.to_array() {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Unstructured grid with the nine fields as point scalars and, if given,
/// the resultants as cell scalars.
pub fn write_vtk<T: Scalar, W: Write>(
    mut w: W,
    title: &str,
    mesh: &TriMesh<T>,
    sol: &FieldSolution<T>,
    res: Option<&ResultantField<T>>,
) -> io::Result<()> {
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_nodes())?;
    for p in mesh.nodes() {
        writeln!(w, "{} {} 0", p[0], p[1])?;
    }
    let nt = mesh.n_triangles();
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    writeln!(w, "POINT_DATA {}", mesh.n_nodes())?;
    for v in Variable::ALL {
        writeln!(w, "SCALARS {} double 1", v.name())?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for x in sol.field(v) {
            writeln!(w, "{x}")?;
        }
    }
    if let Some(res) = res {
        writeln!(w, "CELL_DATA {nt}")?;
        for (k, name) in ElementResultants::<T>::NAMES.iter().enumerate() {
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for e in &res.elements {
                writeln!(w, "{}", e.to_array()[k])?;
            }
        }
    }
    Ok(())
}
