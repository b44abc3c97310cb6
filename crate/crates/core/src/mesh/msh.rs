//! Reader and writer for the ASCII Gmsh legacy 2.2 subset: 2-node lines
//! (tagged boundary segments) and 3-node triangles.
//!
//! The physical tag of a line element becomes its segment tag. Gmsh ids are
//! 1-based and may be sparse; they are renumbered densely in file order.
//! Triangles are reoriented counterclockwise and nodes not used by any
//! triangle are dropped.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::{Point, Scalar};

use super::{signed_area, BoundaryEdge, MeshError, SegmentTag, TriMesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MshError {
    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("unexpected end of file: {0}")]
    Eof(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn perr(line: usize, token: &str, message: impl Into<String>) -> MshError {
    MshError::Parse {
        line,
        token: token.to_string(),
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_nonempty(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MshError> {
        self.next_nonempty()
            .ok_or_else(|| MshError::Eof(format!("expected {what}")))
    }
}

fn parse_num<N: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<N, MshError> {
    tok.parse()
        .map_err(|_| perr(line, tok, format!("invalid {what}")))
}

fn expect_marker(lines: &mut Lines<'_>, marker: &str) -> Result<(), MshError> {
    let (ln, l) = lines.expect(marker)?;
    if l != marker {
        return Err(perr(ln, l, format!("expected {marker}")));
    }
    Ok(())
}

fn count_line(lines: &mut Lines<'_>, what: &str) -> Result<usize, MshError> {
    let (ln, l) = lines.expect(what)?;
    parse_num(ln, l, what)
}

/// Parses an ASCII Gmsh 2.2 mesh into a validated [`TriMesh`].
pub fn parse_msh<T: Scalar>(text: &str) -> Result<TriMesh<T>, MshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let mut saw_format = false;
    let mut nodes: Vec<(usize, u64, [f64; 2])> = Vec::new();
    let mut lines_el: Vec<(usize, [u64; 2], u32)> = Vec::new();
    let mut tris: Vec<(usize, [u64; 3])> = Vec::new();
    let mut saw_nodes = false;
    let mut saw_elements = false;

    while let Some((ln, l)) = lines.next_nonempty() {
        match l {
            "$MeshFormat" => {
                let (vln, v) = lines.expect("format line")?;
                let mut it = v.split_whitespace();
                let ver = it.next().unwrap_or("");
                if ver != "2.2" {
                    return Err(perr(vln, ver, "unsupported format version"));
                }
                let ft = it.next().unwrap_or("");
                if ft != "0" {
                    return Err(perr(vln, ft, "only ASCII files (file-type 0) are supported"));
                }
                expect_marker(&mut lines, "$EndMeshFormat")?;
                saw_format = true;
            }
            "$Nodes" => {
                let n = count_line(&mut lines, "node count")?;
                nodes.reserve(n);
                for _ in 0..n {
                    let (nln, nl) = lines.expect("node line")?;
                    let toks: Vec<&str> = nl.split_whitespace().collect();
                    if toks.len() != 4 {
                        return Err(perr(nln, nl, "node line needs `id x y z`"));
                    }
                    let id: u64 = parse_num(nln, toks[0], "node id")?;
                    let x: f64 = parse_num(nln, toks[1], "coordinate")?;
                    let y: f64 = parse_num(nln, toks[2], "coordinate")?;
                    let z: f64 = parse_num(nln, toks[3], "coordinate")?;
                    if z.abs() > 1e-12 {
                        return Err(perr(nln, toks[3], "z coordinate must be 0"));
                    }
                    nodes.push((nln, id, [x, y]));
                }
                expect_marker(&mut lines, "$EndNodes")?;
                saw_nodes = true;
            }
            "$Elements" => {
                let n = count_line(&mut lines, "element count")?;
                for _ in 0..n {
                    let (eln, el) = lines.expect("element line")?;
                    let toks: Vec<&str> = el.split_whitespace().collect();
                    if toks.len() < 3 {
                        return Err(perr(eln, el, "element line too short"));
                    }
                    let ty: u32 = parse_num(eln, toks[1], "element type")?;
                    let ntags: usize = parse_num(eln, toks[2], "tag count")?;
                    let want = match ty {
                        1 => 2,
                        2 => 3,
                        _ => {
                            return Err(perr(eln, toks[1], format!("unsupported element type {ty}")))
                        }
                    };
                    if toks.len() != 3 + ntags + want {
                        return Err(perr(
                            eln,
                            el,
                            format!("element of type {ty} with {ntags} tags needs {} fields", 3 + ntags + want),
                        ));
                    }
                    let physical: u32 = if ntags > 0 {
                        parse_num(eln, toks[3], "physical tag")?
                    } else {
                        0
                    };
                    let ids: Vec<u64> = toks[3 + ntags..]
                        .iter()
                        .map(|t| parse_num(eln, t, "node id"))
                        .collect::<Result<_, _>>()?;
                    if ty == 1 {
                        lines_el.push((eln, [ids[0], ids[1]], physical));
                    } else {
                        tris.push((eln, [ids[0], ids[1], ids[2]]));
                    }
                }
                expect_marker(&mut lines, "$EndElements")?;
                saw_elements = true;
            }
            other if other.starts_with('$') && !other.starts_with("$End") => {
                // skip unknown sections such as $PhysicalNames
                let end = format!("$End{}", &other[1..]);
                loop {
                    let (_, s) = lines.expect(&end)?;
                    if s == end {
                        break;
                    }
                }
            }
            other => return Err(perr(ln, other, "unexpected content outside a section")),
        }
    }
    if !saw_format {
        return Err(MshError::Eof("missing $MeshFormat section".into()));
    }
    if !saw_nodes || !saw_elements {
        return Err(MshError::Eof("missing $Nodes or $Elements section".into()));
    }

    let mut index: HashMap<u64, usize> = HashMap::with_capacity(nodes.len());
    for (i, (ln, id, _)) in nodes.iter().enumerate() {
        if index.insert(*id, i).is_some() {
            return Err(perr(*ln, &id.to_string(), "duplicate node id"));
        }
    }
    let lookup = |ln: usize, id: u64| -> Result<usize, MshError> {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| perr(ln, &id.to_string(), "unknown node id"))
    };

    // renumber: keep nodes referenced by triangles, in file order
    let mut used = vec![false; nodes.len()];
    let mut raw_tris = Vec::with_capacity(tris.len());
    for (ln, ids) in &tris {
        let t = [lookup(*ln, ids[0])?, lookup(*ln, ids[1])?, lookup(*ln, ids[2])?];
        for &n in &t {
            used[n] = true;
        }
        raw_tris.push(t);
    }
    let mut new_id = vec![usize::MAX; nodes.len()];
    let mut pts: Vec<Point<T>> = Vec::new();
    for (i, (_, _, p)) in nodes.iter().enumerate() {
        if used[i] {
            new_id[i] = pts.len();
            pts.push([T::lit(p[0]), T::lit(p[1])]);
        }
    }
    let triangles: Vec<[usize; 3]> = raw_tris
        .into_iter()
        .map(|t| {
            let t = [new_id[t[0]], new_id[t[1]], new_id[t[2]]];
            if signed_area(&[pts[t[0]], pts[t[1]], pts[t[2]]]) < T::zero() {
                [t[0], t[2], t[1]]
            } else {
                t
            }
        })
        .collect();
    let mut edges = Vec::with_capacity(lines_el.len());
    for (ln, ids, tag) in &lines_el {
        let a = new_id[lookup(*ln, ids[0])?];
        let b = new_id[lookup(*ln, ids[1])?];
        if a == usize::MAX || b == usize::MAX {
            return Err(perr(*ln, &ids[0].to_string(), "line element uses a node outside every triangle"));
        }
        edges.push(BoundaryEdge {
            nodes: [a, b],
            tag: SegmentTag(*tag),
        });
    }
    Ok(TriMesh::new(pts, triangles, edges)?)
}

/// Serializes a mesh as ASCII Gmsh 2.2. Coordinates are written with the
/// shortest representation that parses back to the same value.
pub fn write_msh<T: Scalar>(mesh: &TriMesh<T>) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.n_nodes());
    for (i, p) in mesh.nodes().iter().enumerate() {
        let _ = writeln!(s, "{} {} {} 0", i + 1, p[0], p[1]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.boundary_edges().len() + mesh.n_triangles());
    let mut id = 1;
    for e in mesh.boundary_edges() {
        let _ = writeln!(
            s,
            "{id} 1 2 {t} {t} {} {}",
            e.nodes[0] + 1,
            e.nodes[1] + 1,
            t = e.tag.0
        );
        id += 1;
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "{id} 2 2 0 1 {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_TRIANGLE: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
4
1 1 2 7 1 1 2
2 1 2 7 1 2 3
3 1 2 8 1 3 1
4 2 2 0 1 1 2 3
$EndElements
";

    #[test]
    fn minimal_triangle() {
        let m: TriMesh<f64> = parse_msh(ONE_TRIANGLE).unwrap();
        assert_eq!((m.n_nodes(), m.n_triangles(), m.boundary_edges().len()), (3, 1, 3));
        assert_eq!(m.tags(), vec![SegmentTag(7), SegmentTag(8)]);
    }

    #[test]
    fn clockwise_triangle_is_reoriented() {
        let text = ONE_TRIANGLE.replace("4 2 2 0 1 1 2 3", "4 2 2 0 1 1 3 2");
        let m: TriMesh<f64> = parse_msh(&text).unwrap();
        assert!(m.area(0) > 0.0);
    }

    #[test]
    fn unsupported_element_type() {
        let text = ONE_TRIANGLE.replace("4 2 2 0 1 1 2 3", "4 4 2 0 1 1 2 3 3");
        let err = parse_msh::<f64>(&text).unwrap_err();
        assert_eq!(
            err,
            MshError::Parse {
                line: 15,
                token: "4".into(),
                message: "unsupported element type 4".into()
            }
        );
        assert!(err.to_string().starts_with("line 15: unsupported element type 4"));
    }

    #[test]
    fn nonzero_z_rejected() {
        let text = ONE_TRIANGLE.replace("3 0 1 0\n", "3 0 1 0.5\n");
        let err = parse_msh::<f64>(&text).unwrap_err();
        assert!(matches!(err, MshError::Parse { line: 8, .. }), "{err}");
    }

    #[test]
    fn writer_round_trip_is_identity() {
        let m: TriMesh<f64> = parse_msh(ONE_TRIANGLE).unwrap();
        let again: TriMesh<f64> = parse_msh(&write_msh(&m)).unwrap();
        assert_eq!(m, again);
    }
}
