//! P1 Galerkin assembly of the nine-field block system.
//!
//! Unknown `(var, node)` sits at global index `var * n_nodes + node`.

use thiserror::Error;

use crate::mesh::{SegmentTag, TriMesh};
use crate::operator::{OperatorTable, ScalarOperatorTerm, SourceField, Variable};
use crate::quadrature::TriangleRule;
use crate::scalar::{lit, Point, Scalar};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("triangle {0} is degenerate")]
    DegenerateElement(usize),
    #[error("degenerate triangle")]
    Degenerate,
}

/// Exact P1 element integrals on one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices<T> {
    pub area: T,
    /// Constant basis gradients.
    pub gradients: [[T; 2]; 3],
    /// `int phi_m phi_n`
    pub mass: [[T; 3]; 3],
    /// `int phi_m d(phi_n)/dx_k` for `k = 1, 2`.
    pub convection: [[[T; 3]; 3]; 2],
}

impl<T: Scalar> ElementMatrices<T> {
    pub fn new(tri: &[Point<T>; 3]) -> Result<Self, AssemblyError> {
        let [p0, p1, p2] = *tri;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let area = lit::<T>(0.5) * det.abs();
        let xs = [p0[0], p1[0], p2[0]];
        let ys = [p0[1], p1[1], p2[1]];
        let span = |v: [T; 3]| v.iter().copied().fold(T::neg_infinity(), T::max) - v.iter().copied().fold(T::infinity(), T::min);
        let bbox = span(xs).max(span(ys));
        if !(area > lit::<T>(1e-14) * bbox * bbox) {
            return Err(AssemblyError::Degenerate);
        }
        let gradients = [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ];
        let diag = area / lit::<T>(6.0);
        let off = area / lit::<T>(12.0);
        let mass = std::array::from_fn(|m| std::array::from_fn(|n| if m == n { diag } else { off }));
        let third = area / lit::<T>(3.0);
        let convection = std::array::from_fn(|k| std::array::from_fn(|_| std::array::from_fn(|n| third * gradients[n][k])));
        Ok(Self {
            area,
            gradients,
            mass,
            convection,
        })
    }

    /// `int grad(phi_m) . A grad(phi_n)`
    pub fn stiffness(&self, a: &[[T; 2]; 2]) -> [[T; 3]; 3] {
        let g = &self.gradients;
        std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                let ag = [
                    a[0][0] * g[n][0] + a[0][1] * g[n][1],
                    a[1][0] * g[n][0] + a[1][1] * g[n][1],
                ];
                self.area * (g[m][0] * ag[0] + g[m][1] * ag[1])
            })
        })
    }

    /// Local matrix of `int phi_m L phi_n` for one operator entry, after
    /// integrating second-order terms by parts.
    pub fn local(&self, terms: &[ScalarOperatorTerm<T>]) -> [[T; 3]; 3] {
        let mut out = [[T::zero(); 3]; 3];
        for term in terms {
            let (k, s) = match *term {
                ScalarOperatorTerm::Zeroth { coefficient } => (self.mass, coefficient),
                ScalarOperatorTerm::First { coefficient, axis } => (self.convection[axis.index()], coefficient),
                ScalarOperatorTerm::Second { a } => (self.stiffness(&a), -T::one()),
            };
            for m in 0..3 {
                for n in 0..3 {
                    out[m][n] = out[m][n] + s * k[m][n];
                }
            }
        }
        out
    }
}

/// Which boundary segments a condition applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segments {
    None,
    All,
    Only(Vec<SegmentTag>),
    AllExcept(Vec<SegmentTag>),
}

impl Segments {
    pub fn contains(&self, tag: SegmentTag) -> bool {
        match self {
            Segments::None => false,
            Segments::All => true,
            Segments::Only(t) => t.contains(&tag),
            Segments::AllExcept(t) => !t.contains(&tag),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Clamped,
    SimplySupported,
    Custom,
}

/// Homogeneous Dirichlet conditions per variable. Segments not listed for a
/// variable carry the natural condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcSpec {
    pub kind: BcKind,
    pub dirichlet: [Segments; 9],
}

impl BcSpec {
    /// All nine variables vanish on the whole boundary.
    pub fn clamped() -> Self {
        Self {
            kind: BcKind::Clamped,
            dirichlet: std::array::from_fn(|_| Segments::All),
        }
    }

    /// Clamped everywhere except the listed segments, which are left free.
    pub fn clamped_except(free: &[SegmentTag]) -> Self {
        Self {
            kind: BcKind::Custom,
            dirichlet: std::array::from_fn(|_| Segments::AllExcept(free.to_vec())),
        }
    }

    /// Simply supported rectangle: on the edges `x1 = const` (G1, G2) the
    /// deflections, `Psi2`, `Omega1_0` and `Omega_hat1` vanish; on `x2 = const`
    /// (G3, G4) the deflections, `Psi1`, `Omega2_0` and `Omega_hat2`. `Omega3`
    /// is free everywhere.
    pub fn simply_supported() -> Self {
        use Variable::*;
        let x_edges = || Segments::Only(vec![SegmentTag::G1, SegmentTag::G2]);
        let y_edges = || Segments::Only(vec![SegmentTag::G3, SegmentTag::G4]);
        Self {
            kind: BcKind::SimplySupported,
            dirichlet: std::array::from_fn(|i| match Variable::ALL[i] {
                W | WStar => Segments::All,
                Psi2 | Omega1Zero | OmegaHat1 => x_edges(),
                Psi1 | Omega2Zero | OmegaHat2 => y_edges(),
                Omega3 => Segments::None,
            }),
        }
    }

    /// Natural conditions for every variable.
    pub fn natural() -> Self {
        Self {
            kind: BcKind::Custom,
            dirichlet: std::array::from_fn(|_| Segments::None),
        }
    }

    /// Same conditions, but every variable is left free on `tag`.
    pub fn with_free(self, tag: SegmentTag) -> Self {
        let dirichlet = self.dirichlet.map(|s| match s {
            Segments::None => Segments::None,
            Segments::All => Segments::AllExcept(vec![tag]),
            Segments::Only(mut v) => {
                v.retain(|&t| t != tag);
                Segments::Only(v)
            }
            Segments::AllExcept(mut v) => {
                if !v.contains(&tag) {
                    v.push(tag);
                }
                Segments::AllExcept(v)
            }
        });
        Self {
            kind: BcKind::Custom,
            dirichlet,
        }
    }
}

/// Constrained `(variable, node)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletMask {
    n_nodes: usize,
    flags: Vec<bool>,
}

impl DirichletMask {
    pub fn new<T: Scalar>(mesh: &TriMesh<T>, bc: &BcSpec) -> Self {
        let n = mesh.n_nodes();
        let mut flags = vec![false; 9 * n];
        for e in mesh.boundary_edges() {
            for (var, seg) in bc.dirichlet.iter().enumerate() {
                if seg.contains(e.tag) {
                    for &node in &e.nodes {
                        flags[var * n + node] = true;
                    }
                }
            }
        }
        Self { n_nodes: n, flags }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn is_constrained(&self, var: usize, node: usize) -> bool {
        self.flags[var * self.n_nodes + node]
    }

    /// Per global index.
    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Assembled system `K u = F` with boundary conditions applied.
#[derive(Debug, Clone)]
pub struct BlockSystem<T> {
    pub n_nodes: usize,
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<T>,
    pub mask: DirichletMask,
}

#[inline]
pub fn dof(var: usize, node: usize, n_nodes: usize) -> usize {
    var * n_nodes + node
}

fn node_adjacency<T: Scalar>(mesh: &TriMesh<T>) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = (0..mesh.n_nodes()).map(|i| vec![i]).collect();
    for tri in mesh.triangles() {
        for &a in tri {
            for &b in tri {
                adj[a].push(b);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Sparsity pattern of the constrained system, values zeroed.
fn pattern<T: Scalar>(mesh: &TriMesh<T>, table: &OperatorTable<T>, mask: &DirichletMask) -> CsrMatrix<T> {
    let m = mesh.n_nodes();
    let adj = node_adjacency(mesh);
    let mut row_ptr = Vec::with_capacity(9 * m + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for i in 0..9 {
        let blocks: Vec<usize> = (0..9).filter(|&j| j == i || table.is_block_nonzero(i, j)).collect();
        for p in 0..m {
            if mask.is_constrained(i, p) {
                col_idx.push(dof(i, p, m));
            } else {
                for &j in &blocks {
                    for &q in &adj[p] {
                        if !mask.is_constrained(j, q) {
                            col_idx.push(dof(j, q, m));
                        }
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    let nnz = col_idx.len();
    CsrMatrix::from_raw(9 * m, 9 * m, row_ptr, col_idx, vec![T::zero(); nnz])
}

/// Stiffness matrix with Dirichlet rows and columns replaced by identity.
pub fn assemble_matrix<T: Scalar>(
    mesh: &TriMesh<T>,
    table: &OperatorTable<T>,
    bc: &BcSpec,
) -> Result<(CsrMatrix<T>, DirichletMask), AssemblyError> {
    let mask = DirichletMask::new(mesh, bc);
    let m = mesh.n_nodes();
    let mut k = pattern(mesh, table, &mask);
    let blocks: Vec<(usize, usize)> = (0..9)
        .flat_map(|i| (0..9).map(move |j| (i, j)))
        .filter(|&(i, j)| table.is_block_nonzero(i, j))
        .collect();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let el = ElementMatrices::new(&mesh.triangle_points(t)).map_err(|_| AssemblyError::DegenerateElement(t))?;
        for &(i, j) in &blocks {
            let local = el.local(table.entry(i, j));
            for (a, &p) in tri.iter().enumerate() {
                if mask.is_constrained(i, p) {
                    continue;
                }
                let row = dof(i, p, m);
                for (b, &q) in tri.iter().enumerate() {
                    if mask.is_constrained(j, q) {
                        continue;
                    }
                    let pos = k.position(row, dof(j, q, m)).expect("entry in pattern");
                    let v = &mut k.values_mut()[pos];
                    *v = *v + local[a][b];
                }
            }
        }
    }
    for (g, &c) in mask.flags().iter().enumerate() {
        if c {
            let pos = k.position(g, g).expect("diagonal in pattern");
            k.values_mut()[pos] = T::one();
        }
    }
    Ok((k, mask))
}

/// `F_m = int phi_m f` by the mid-edge rule; constrained entries are zero.
pub fn assemble_load<T: Scalar, S: SourceField<T> + ?Sized>(
    mesh: &TriMesh<T>,
    source: &S,
    mask: &DirichletMask,
) -> Vec<T> {
    let m = mesh.n_nodes();
    let rule = TriangleRule::<T>::mid_edge();
    let mut f = vec![T::zero(); 9 * m];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        for (x, l, w) in rule.on(&pts, mesh.area(t)) {
            let val = source.eval(x);
            for (i, &fi) in val.iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                for (a, &p) in tri.iter().enumerate() {
                    let g = dof(i, p, m);
                    f[g] = f[g] + w * l[a] * fi;
                }
            }
        }
    }
    for (g, &c) in mask.flags().iter().enumerate() {
        if c {
            f[g] = T::zero();
        }
    }
    f
}

pub fn assemble<T: Scalar, S: SourceField<T> + ?Sized>(
    mesh: &TriMesh<T>,
    table: &OperatorTable<T>,
    source: &S,
    bc: &BcSpec,
) -> Result<BlockSystem<T>, AssemblyError> {
    let (matrix, mask) = assemble_matrix(mesh, table, bc)?;
    let rhs = assemble_load(mesh, source, &mask);
    Ok(BlockSystem {
        n_nodes: mesh.n_nodes(),
        matrix,
        rhs,
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{derive_coefficients, MaterialParams, StiffnessCoefficients};
    use crate::mesh::{generate_rectangle, BoundaryEdge};
    use crate::operator::build_operator_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs() -> StiffnessCoefficients<f64> {
        let m = MaterialParams::new(2.1, 1.3, 0.1, 0.4, 0.6, 0.2, 0.1).unwrap();
        derive_coefficients(&m, 1.0).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn freeing_a_segment() {
        let h = SegmentTag::HOLE;
        let bc = BcSpec::simply_supported().with_free(h);
        for (i, s) in bc.dirichlet.iter().enumerate() {
            let orig = &BcSpec::simply_supported().dirichlet[i];
            assert!(!s.contains(h));
            for t in [SegmentTag::G1, SegmentTag::G2, SegmentTag::G3, SegmentTag::G4] {
                assert_eq!(s.contains(t), orig.contains(t));
            }
        }
        assert_eq!(BcSpec::clamped().with_free(h).dirichlet, BcSpec::clamped_except(&[h]).dirichlet);
    }

    #[test]
    fn unit_right_triangle() {
        let el = ElementMatrices::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let k = el.stiffness(&[[1.0, 0.0], [0.0, 1.0]]);
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for m in 0..3 {
            for n in 0..3 {
                assert!(close(k[m][n], want[m][n]));
                assert!(close(el.mass[m][n], if m == n { 1.0 / 12.0 } else { 1.0 / 24.0 }));
                assert!(close(el.convection[0][m][n], [-1.0, 1.0, 0.0][n] / 6.0));
            }
        }
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        let el = ElementMatrices::new(&[[0.1, 0.2], [1.3, 0.4], [0.5, 1.7]]).unwrap();
        let k = el.stiffness(&[[1.3, -0.4], [0.7, 2.0]]);
        for row in k {
            assert!(row.iter().sum::<f64>().abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_triangle_rejected() {
        assert_eq!(
            ElementMatrices::new(&[[0.0, 0.0], [1.0, 0.0], [2.0, 1e-16]]),
            Err(AssemblyError::Degenerate)
        );
    }

    #[test]
    fn single_term_table() {
        let c = coeffs();
        let full = build_operator_table(&c);
        let mut t = OperatorTable::empty();
        t.entry_mut(2, 2).extend_from_slice(full.entry(2, 2));
        let mesh = TriMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            vec![
                BoundaryEdge { nodes: [0, 1], tag: SegmentTag::G3 },
                BoundaryEdge { nodes: [1, 2], tag: SegmentTag::G2 },
                BoundaryEdge { nodes: [2, 0], tag: SegmentTag::G1 },
            ],
        )
        .unwrap();
        let (k, _) = assemble_matrix(&mesh, &t, &BcSpec::natural()).unwrap();
        let s = ElementMatrices::new(&mesh.triangle_points(0)).unwrap().stiffness(&[[1.0, 0.0], [0.0, 1.0]]);
        for m in 0..3 {
            for n in 0..3 {
                assert!((k.get(6 + m, 6 + n) + c.get(3) * s[m][n]).abs() < 1e-15);
            }
        }
        // every other block is empty apart from the structural diagonal
        for (r, col, v) in k.triplets() {
            if !(r / 3 == 2 && col / 3 == 2) {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn disjoint_nodes_do_not_couple() {
        let mesh = generate_rectangle::<f64>(1.0, 1.0, 1, 1).unwrap();
        let t = build_operator_table(&coeffs());
        let (k, _) = assemble_matrix(&mesh, &t, &BcSpec::natural()).unwrap();
        // triangles [0,1,3] and [0,3,2]: nodes 1 and 2 never share one
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(k.get(i * 4 + 1, j * 4 + 2), 0.0);
                assert_eq!(k.get(i * 4 + 2, j * 4 + 1), 0.0);
                assert_eq!(k.position(i * 4 + 1, j * 4 + 2), None);
            }
        }
    }

    /// Loops over seven-point quadrature points and evaluates every basis
    /// function and gradient from barycentric coordinates.
    fn quadrature_oracle(mesh: &TriMesh<f64>, t: &OperatorTable<f64>) -> Vec<Vec<f64>> {
        let m = mesh.n_nodes();
        let mut k = vec![vec![0.0; 9 * m]; 9 * m];
        let rule = TriangleRule::<f64>::degree5();
        for (e, tri) in mesh.triangles().iter().enumerate() {
            let p = mesh.triangle_points(e);
            let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
            let grad = |n: usize| {
                let (b, c) = (p[(n + 1) % 3], p[(n + 2) % 3]);
                [(b[1] - c[1]) / det, (c[0] - b[0]) / det]
            };
            for (_, l, w) in rule.on(&p, mesh.area(e)) {
                for i in 0..9 {
                    for j in 0..9 {
                        for term in t.entry(i, j) {
                            for a in 0..3 {
                                for b in 0..3 {
                                    let (ga, gb) = (grad(a), grad(b));
                                    let v = match *term {
                                        ScalarOperatorTerm::Zeroth { coefficient } => coefficient * l[a] * l[b],
                                        ScalarOperatorTerm::First { coefficient, axis } => {
                                            coefficient * l[a] * gb[axis.index()]
                                        }
                                        ScalarOperatorTerm::Second { a: am } => {
                                            let mut s = 0.0;
                                            for r in 0..2 {
                                                for q in 0..2 {
                                                    s += ga[r] * am[r][q] * gb[q];
                                                }
                                            }
                                            -s
                                        }
                                    };
                                    k[i * m + tri[a]][j * m + tri[b]] += w * v;
                                }
                            }
                        }
                    }
                }
            }
        }
        k
    }

    #[test]
    fn matches_quadrature_oracle_on_perturbed_mesh() {
        let base = generate_rectangle::<f64>(1.0, 1.0, 4, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nodes: Vec<[f64; 2]> = base
            .nodes()
            .iter()
            .map(|&[x, y]| {
                let interior = x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0;
                if interior {
                    [x + rng.random_range(-0.05..0.05), y + rng.random_range(-0.05..0.05)]
                } else {
                    [x, y]
                }
            })
            .collect();
        let mesh = TriMesh::new(nodes, base.triangles().to_vec(), base.boundary_edges().to_vec()).unwrap();
        let t = build_operator_table(&coeffs());
        let (k, _) = assemble_matrix(&mesh, &t, &BcSpec::natural()).unwrap();
        let oracle = quadrature_oracle(&mesh, &t);
        let scale = oracle.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
        let dense = k.to_dense();
        for r in 0..dense.len() {
            for c in 0..dense.len() {
                assert!((dense[r][c] - oracle[r][c]).abs() <= 1e-12 * scale, "({r},{c})");
            }
        }
    }

    #[test]
    fn omega3_block_row_sums() {
        let c = coeffs();
        let t = build_operator_table(&c);
        let mesh = generate_rectangle::<f64>(2.0, 1.0, 3, 2).unwrap();
        let m = mesh.n_nodes();
        let (k, _) = assemble_matrix(&mesh, &t, &BcSpec::natural()).unwrap();
        let mut mass_rows = vec![0.0; m];
        for (e, tri) in mesh.triangles().iter().enumerate() {
            for &p in tri {
                mass_rows[p] += mesh.area(e) / 3.0;
            }
        }
        for p in 0..m {
            let sum: f64 = (0..m).map(|q| k.get(3 * m + p, 3 * m + q)).sum();
            assert!((sum + 2.0 * c.get(12) * mass_rows[p]).abs() < 1e-14);
        }
    }

    #[test]
    fn dirichlet_rows_are_identity() {
        let mesh = generate_rectangle::<f64>(1.0, 1.0, 3, 3).unwrap();
        let t = build_operator_table(&coeffs());
        let f = |_: [f64; 2]| [1.0; 9];
        let sys = assemble(&mesh, &t, &f, &BcSpec::simply_supported()).unwrap();
        let m = mesh.n_nodes();
        assert!(sys.mask.count() > 0);
        for g in 0..9 * m {
            if sys.mask.flags()[g] {
                let (cols, vals) = sys.matrix.row(g);
                assert_eq!((cols, vals), (&[g][..], &[1.0][..]));
                assert_eq!(sys.rhs[g], 0.0);
                for r in 0..9 * m {
                    if r != g {
                        assert_eq!(sys.matrix.get(r, g), 0.0);
                    }
                }
            }
        }
        // Omega3 is never constrained for simple support
        assert!((0..m).all(|p| !sys.mask.is_constrained(3, p)));
        // W at a corner is
        assert!(sys.mask.is_constrained(2, 0));
        // Psi1 on the left edge (x1 = 0, not a corner) is free
        assert!(!sys.mask.is_constrained(0, 4));
    }

    #[test]
    fn load_of_constant_source_integrates_area() {
        let mesh = generate_rectangle::<f64>(2.0, 1.5, 3, 2).unwrap();
        let f = |_: [f64; 2]| [1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let load = assemble_load(&mesh, &f, &DirichletMask::new(&mesh, &BcSpec::natural()));
        let m = mesh.n_nodes();
        assert!((load[..m].iter().sum::<f64>() - 3.0).abs() < 1e-14);
        assert!((load[2 * m..3 * m].iter().sum::<f64>() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn assembly_is_deterministic() {
        let mesh = generate_rectangle::<f64>(1.0, 1.0, 4, 3).unwrap();
        let t = build_operator_table(&coeffs());
        let (a, _) = assemble_matrix(&mesh, &t, &BcSpec::clamped()).unwrap();
        let (b, _) = assemble_matrix(&mesh, &t, &BcSpec::clamped()).unwrap();
        assert_eq!(a, b);
    }
}
