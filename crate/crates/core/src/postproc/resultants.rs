use crate::assembly::ElementMatrices;
use crate::material::MaterialParams;
use crate::mesh::TriMesh;
use crate::operator::split_pressure as split;
use crate::operator::{LoadSpec, Variable};
use crate::scalar::{lit, Scalar};
use crate::splitting::FieldSolution;

/// Stress resultants of one element, constant over the triangle.
///
/// Moments (`m`, `r`, `r_star`, `s_star`) are in N·m/m, forces (`q`,
/// `q_star`, `q_hat`) in N/m. Two-index arrays are stored as `x[i][j]` for
/// the component with indices `ij` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementResultants<T> {
    pub m: [[T; 2]; 2],
    pub r: [[T; 2]; 2],
    pub r_star: [[T; 2]; 2],
    pub q: [T; 2],
    pub q_star: [T; 2],
    pub q_hat: [T; 2],
    pub s_star: [T; 2],
}

impl<T: Scalar> ElementResultants<T> {
    pub const NAMES: [&'static str; 20] = [
        "M11", "M22", "M12", "M21", "R11", "R22", "R12", "R21", "Rs11", "Rs22", "Rs12",
        "Rs21", "Q1", "Q2", "Qs1", "Qs2", "Qh1", "Qh2", "Ss1", "Ss2",
    ];

    /// Components in the order of [`Self::NAMES`].
    pub fn to_array(&self) -> [T; 20] {
        let t = |x: &[[T; 2]; 2]| [x[0][0], x[1][1], x[0][1], x[1][0]];
        let (m, r, rs) = (t(&self.m), t(&self.r), t(&self.r_star));
        [
            m[0], m[1], m[2], m[3], r[0], r[1], r[2], r[3], rs[0], rs[1], rs[2], rs[3],
            self.q[0], self.q[1], self.q_star[0], self.q_star[1], self.q_hat[0],
            self.q_hat[1], self.s_star[0], self.s_star[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Piecewise-constant resultants, one entry per triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultantField<T> {
    pub elements: Vec<ElementResultants<T>>,
}

impl<T: Scalar> ResultantField<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Area-weighted average of one component onto the nodes. Meant for
    /// plotting only; verification uses the element values.
    pub fn nodal_average(&self, mesh: &TriMesh<T>, component: usize) -> Vec<T> {
        let mut sum = vec![T::zero(); mesh.n_nodes()];
        let mut weight = vec![T::zero(); mesh.n_nodes()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let a = mesh.area(t);
            let v = self.elements[t].to_array()[component];
            for &n in tri {
                sum[n] = sum[n] + a * v;
                weight[n] = weight[n] + a;
            }
        }
        sum.iter()
            .zip(&weight)
            .map(|(&s, &w)| if w > T::zero() { s / w } else { T::zero() })
            .collect()
    }
}

/// Values at the centroid and constant gradients of the nine fields on one triangle.
pub(crate) fn element_state<T: Scalar>(
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    t: usize,
) -> ([T; 9], [[T; 2]; 9]) {
    let tri = mesh.triangles()[t];
    let el = ElementMatrices::new(&mesh.triangle_points(t))
        .expect("valid mesh has no degenerate elements");
    let third = lit::<T>(1.0 / 3.0);
    let mut val = [T::zero(); 9];
    let mut grad = [[T::zero(); 2]; 9];
    for v in Variable::ALL {
        let f = sol.field(v);
        let i = v.index();
        for (a, &n) in tri.iter().enumerate() {
            val[i] = val[i] + third * f[n];
            grad[i][0] = grad[i][0] + f[n] * el.gradients[a][0];
            grad[i][1] = grad[i][1] + f[n] * el.gradients[a][1];
        }
    }
    (val, grad)
}

/// Evaluates the reverse constitutive relations from field values `u` and
/// gradients `g` (indexed by [`Variable`]) and the split pressures.
pub fn constitutive<T: Scalar>(
    m: &MaterialParams<T>,
    u: &[T; 9],
    g: &[[T; 2]; 9],
    p1: T,
    p2: T,
) -> ElementResultants<T> {
    let n = |v: f64| lit::<T>(v);
    let (lam, mu, al, be, ga, ep, h) =
        (m.lambda, m.mu, m.alpha, m.beta, m.gamma, m.epsilon, m.thickness);
    let h3 = h * h * h;
    let psi = [Variable::Psi1.index(), Variable::Psi2.index()];
    let om0 = [Variable::Omega1Zero.index(), Variable::Omega2Zero.index()];
    let omh = [Variable::OmegaHat1.index(), Variable::OmegaHat2.index()];
    let (w, ws, om3) = (
        Variable::W.index(),
        Variable::WStar.index(),
        Variable::Omega3.index(),
    );
    // (-1)^k for one-based k
    let sign = |k: usize| if k % 2 == 0 { T::one() } else { -T::one() };

    let mut out = ElementResultants::default();
    let l2m = lam + n(2.0) * mu;
    let pressure = (n(3.0) * p1 + n(5.0) * p2) * lam * h * h / (n(30.0) * l2m);
    let bg = be + n(2.0) * ga;
    for a in 0..2 {
        let b = 1 - a;
        out.m[a][a] = h3 * mu * (lam + mu) / (n(3.0) * l2m) * g[psi[a]][a]
            + lam * mu * h3 / (n(6.0) * l2m) * g[psi[b]][b]
            + pressure;
        out.m[b][a] = (mu - al) * h3 / n(12.0) * g[psi[a]][b]
            + h3 * (al + mu) / n(12.0) * g[psi[b]][a]
            + sign(b + 1) * al * h3 / n(6.0) * u[om3];
        out.r[b][a] = n(5.0) * (ga - ep) * h / n(6.0) * g[om0[b]][a]
            + n(5.0) * h * (ga + ep) / n(6.0) * g[om0[a]][b];
        out.r[a][a] = n(10.0) * h * ga * (be + ga) / (n(3.0) * bg) * g[om0[a]][a]
            + n(5.0) * h * be * ga / (n(3.0) * bg) * g[om0[b]][b];
        out.r_star[b][a] = n(2.0) * (ga - ep) * h / n(3.0) * g[omh[b]][a]
            + n(2.0) * (ga + ep) * h / n(3.0) * g[omh[a]][b];
        out.r_star[a][a] = n(8.0) * ga * (ga + be) * h / (n(3.0) * bg) * g[omh[a]][a]
            + n(4.0) * ga * be * h / (n(3.0) * bg) * g[omh[b]][b];
        out.q[a] = n(5.0) * h * (al + mu) / n(6.0) * u[psi[a]]
            + n(5.0) * (mu - al) * h / n(6.0) * g[w][a]
            + n(2.0) * (mu - al) * h / n(3.0) * g[ws][a]
            + sign(b + 1) * n(5.0) * h * al / n(3.0) * (u[om0[b]] + u[omh[b]]);
        out.q_star[a] = n(5.0) * (mu - al) * h / n(6.0) * u[psi[a]]
            + n(5.0) * (mu - al) * (mu - al) * h / (n(6.0) * (mu + al)) * g[w][a]
            + n(2.0) * (mu + al) * h / n(3.0) * g[ws][a]
            + sign(a + 1) * n(5.0) * h * al / n(3.0)
                * (u[om0[b]] + (mu - al) / (mu + al) * u[omh[b]]);
        let k = n(8.0) * al * mu * h / (n(3.0) * (mu + al));
        out.q_hat[a] = k * g[w][a] + sign(a + 1) * k * u[omh[b]];
        out.s_star[a] = n(5.0) * ga * ep * h3 / (n(3.0) * (ga + ep)) * g[om3][a];
    }
    out
}

/// Resultants on every element from the P1 solution. Undifferentiated
/// fields and the pressure split (with `sol.eta`) are taken at the centroid.
pub fn resultants<T: Scalar>(
    sol: &FieldSolution<T>,
    mesh: &TriMesh<T>,
    m: &MaterialParams<T>,
    load: &LoadSpec<T>,
) -> ResultantField<T> {
    let elements = (0..mesh.n_triangles())
        .map(|t| {
            let (u, g) = element_state(sol, mesh, t);
            let (p1, p2) = split(load.pressure(mesh.centroid(t)), sol.eta);
            constitutive(m, &u, &g, p1, p2)
        })
        .collect();
    ResultantField { elements }
}
