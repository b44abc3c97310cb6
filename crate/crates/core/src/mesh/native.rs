//! Plain-text mesh format:
//!
//! ```text
//! tri-mesh v1
//! nodes N
//! x y            (N lines)
//! triangles L
//! i j k          (L lines, 0-based)
//! bedges B
//! i j tag        (B lines)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::Scalar;

use super::{BoundaryEdge, MeshError, SegmentTag, TriMesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NativeMeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn err(line: usize, message: impl Into<String>) -> NativeMeshError {
    NativeMeshError::Parse {
        line,
        message: message.into(),
    }
}

pub fn write_native<T: Scalar>(mesh: &TriMesh<T>) -> String {
    let mut s = String::from("tri-mesh v1\n");
    let _ = writeln!(s, "nodes {}", mesh.n_nodes());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{} {}", p[0], p[1]);
    }
    let _ = writeln!(s, "triangles {}", mesh.n_triangles());
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "bedges {}", mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag.0);
    }
    s
}

pub fn parse_native<T: Scalar>(text: &str) -> Result<TriMesh<T>, NativeMeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of input, expected {what}")))
    };
    let (ln, header) = next("header")?;
    if header != "tri-mesh v1" {
        return Err(err(ln, "expected header `tri-mesh v1`"));
    }
    fn section(ln: usize, line: &str, name: &str) -> Result<usize, NativeMeshError> {
        let mut it = line.split_whitespace();
        match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
            (Some(n), Some(Ok(count)), None) if n == name => Ok(count),
            _ => Err(err(ln, format!("expected `{name} <count>`"))),
        }
    }
    fn fields<N: std::str::FromStr, const K: usize>(ln: usize, line: &str) -> Result<[N; K], NativeMeshError> {
        let parsed: Vec<N> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, format!("invalid number `{t}`"))))
            .collect::<Result<_, _>>()?;
        parsed
            .try_into()
            .map_err(|_| err(ln, format!("expected {K} fields")))
    }

    let (ln, l) = next("nodes")?;
    let n = section(ln, l, "nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("node")?;
        let [x, y]: [f64; 2] = fields(ln, l)?;
        nodes.push([T::lit(x), T::lit(y)]);
    }
    let (ln, l) = next("triangles")?;
    let n = section(ln, l, "triangles")?;
    let mut triangles = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("triangle")?;
        triangles.push(fields::<usize, 3>(ln, l)?);
    }
    let (ln, l) = next("bedges")?;
    let n = section(ln, l, "bedges")?;
    let mut edges = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("boundary edge")?;
        let [a, b, tag]: [usize; 3] = fields(ln, l)?;
        edges.push(BoundaryEdge {
            nodes: [a, b],
            tag: SegmentTag(tag as u32),
        });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing content"));
    }
    Ok(TriMesh::new(nodes, triangles, edges)?)
}
