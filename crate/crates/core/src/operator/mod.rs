//! The 9x9 differential operator of the plate field equations, the
//! splitting-parameter dependent load vector, and analytic fields used to
//! manufacture right-hand sides.

mod analytic;
mod load;

use std::fmt;

use crate::material::StiffnessCoefficients;
use crate::scalar::{lit, Scalar};

pub use analytic::{
    apply_operator_analytic, AnalyticField, ManufacturedSolution, ManufacturedSource, Quadratic,
    Trig, TrigProduct,
};
pub use load::{LoadError, LoadKind, LoadSpec, RhsVector, SourceField};
pub(crate) use load::split as split_pressure;

/// Kinematic unknowns in solution-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    Psi1,
    Psi2,
    W,
    Omega3,
    Omega1Zero,
    Omega2Zero,
    WStar,
    OmegaHat1,
    OmegaHat2,
}

impl Variable {
    pub const ALL: [Variable; 9] = [
        Variable::Psi1,
        Variable::Psi2,
        Variable::W,
        Variable::Omega3,
        Variable::Omega1Zero,
        Variable::Omega2Zero,
        Variable::WStar,
        Variable::OmegaHat1,
        Variable::OmegaHat2,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name used in exported files.
    pub fn name(self) -> &'static str {
        match self {
            Variable::Psi1 => "Psi1",
            Variable::Psi2 => "Psi2",
            Variable::W => "W",
            Variable::Omega3 => "Omega3",
            Variable::Omega1Zero => "Omega1_0",
            Variable::Omega2Zero => "Omega2_0",
            Variable::WStar => "W_star",
            Variable::OmegaHat1 => "Omega_hat1",
            Variable::OmegaHat2 => "Omega_hat2",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }
}

/// A constant-coefficient scalar differential operator of order 0, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarOperatorTerm<T> {
    /// `coefficient * u`
    Zeroth { coefficient: T },
    /// `coefficient * du/dx_axis`
    First { coefficient: T, axis: Axis },
    /// `div(A grad u) = sum_kl A_kl d2u/dx_k dx_l`
    Second { a: [[T; 2]; 2] },
}

impl<T: Scalar> ScalarOperatorTerm<T> {
    pub fn order(&self) -> u8 {
        match self {
            Self::Zeroth { .. } => 0,
            Self::First { .. } => 1,
            Self::Second { .. } => 2,
        }
    }

    pub fn scaled(self, s: T) -> Self {
        match self {
            Self::Zeroth { coefficient } => Self::Zeroth {
                coefficient: s * coefficient,
            },
            Self::First { coefficient, axis } => Self::First {
                coefficient: s * coefficient,
                axis,
            },
            Self::Second { a } => Self::Second {
                a: [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]],
            },
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Self::Zeroth { coefficient } | Self::First { coefficient, .. } => coefficient.is_zero(),
            Self::Second { a } => a.iter().flatten().all(|v| v.is_zero()),
        }
    }

    /// Applies the term to a field given its value, gradient and Hessian.
    pub fn apply(&self, value: T, gradient: [T; 2], hessian: [[T; 2]; 2]) -> T {
        match *self {
            Self::Zeroth { coefficient } => coefficient * value,
            Self::First { coefficient, axis } => coefficient * gradient[axis.index()],
            Self::Second { a } => {
                a[0][0] * hessian[0][0]
                    + a[0][1] * hessian[0][1]
                    + a[1][0] * hessian[1][0]
                    + a[1][1] * hessian[1][1]
            }
        }
    }
}

/// One entry of the operator matrix: a sum of scalar terms.
pub type OperatorEntry<T> = Vec<ScalarOperatorTerm<T>>;

/// The 9x9 operator acting on the kinematic unknowns, row `i` being the
/// equation tested against variable `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTable<T> {
    entries: [[OperatorEntry<T>; 9]; 9],
}

impl<T: Scalar> OperatorTable<T> {
    /// Zero-based access.
    pub fn entry(&self, row: usize, col: usize) -> &[ScalarOperatorTerm<T>] {
        &self.entries[row][col]
    }

    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut OperatorEntry<T> {
        &mut self.entries[row][col]
    }

    pub fn empty() -> Self {
        Self {
            entries: std::array::from_fn(|_| std::array::from_fn(|_| Vec::new())),
        }
    }

    pub fn is_block_nonzero(&self, row: usize, col: usize) -> bool {
        !self.entries[row][col].is_empty()
    }

    /// Number of non-empty entries.
    pub fn nonzero_blocks(&self) -> usize {
        self.entries.iter().flatten().filter(|e| !e.is_empty()).count()
    }
}

fn d2<T: Scalar>(a11: T, a22: T) -> ScalarOperatorTerm<T> {
    ScalarOperatorTerm::Second {
        a: [[a11, T::zero()], [T::zero(), a22]],
    }
}

/// `coef * d2/dx1dx2`, split symmetrically over the off-diagonal of A.
fn mixed<T: Scalar>(coef: T) -> ScalarOperatorTerm<T> {
    let half = lit::<T>(0.5) * coef;
    ScalarOperatorTerm::Second {
        a: [[T::zero(), half], [half, T::zero()]],
    }
}

fn d1<T: Scalar>(coefficient: T, axis: Axis) -> ScalarOperatorTerm<T> {
    ScalarOperatorTerm::First { coefficient, axis }
}

fn d0<T: Scalar>(coefficient: T) -> ScalarOperatorTerm<T> {
    ScalarOperatorTerm::Zeroth { coefficient }
}

fn scale<T: Scalar>(entry: &[ScalarOperatorTerm<T>], s: T) -> OperatorEntry<T> {
    entry.iter().map(|t| t.scaled(s)).collect()
}

/// Fills the operator matrix from the stiffness coefficients.
///
/// Entries are kept exactly as tabulated, including the `k1`-scaled entries
/// and the repeated operators in rows 7 to 9 (row 7 uses `-L14` in column 2,
/// row 9 uses `L55` in column 6, and `L85` coincides with `L55`). Terms with a
/// zero coefficient are dropped, so vanishing operators give empty entries.
///
/// Those two entries and the `+L16` couplings in row 2 are not mirror images
/// of their row 1, 6 and 8 partners, so the operator is not invariant under
/// swapping `x1` and `x2`. Solutions on symmetric plates are therefore not
/// symmetric either.
pub fn build_operator_table<T: Scalar>(coeffs: &StiffnessCoefficients<T>) -> OperatorTable<T> {
    let c = |i: usize| coeffs.get(i);
    let k1 = coeffs.k1;
    let one = T::one();
    let two = lit::<T>(2.0);
    let neg = -one;
    use Axis::{X1, X2};

    let l11 = vec![d2(c(1), c(2)), d0(-c(3))];
    let l12 = vec![mixed(c(1) - c(2))];
    let l13 = vec![d1(c(11), X1)];
    let l14 = vec![d1(c(12), X2)];
    let l16 = vec![d0(c(13))];
    let l22 = vec![d2(c(2), c(1)), d0(-c(3))];
    let l23 = vec![d1(c(11), X2)];
    let l24 = vec![d1(-c(12), X1)];
    let l33 = vec![d2(c(3), c(3))];
    let l35 = vec![d1(-c(13), X2)];
    let l36 = vec![d1(c(13), X1)];
    let l38 = vec![d1(-c(10), X2)];
    let l39 = vec![d1(c(10), X1)];
    let l41 = vec![d1(-c(12), X2)];
    let l42 = vec![d1(c(12), X1)];
    let l44 = vec![d2(c(6), c(6)), d0(-two * c(12))];
    let l55 = vec![d2(c(7), c(8)), d0(-two * c(13))];
    let l56 = vec![mixed(c(7) - c(8))];
    let l58 = vec![d0(-c(9))];
    let l66 = vec![d2(c(8), c(7)), d0(-two * c(13))];
    let l73 = vec![d2(c(5), c(5))];
    let l77 = vec![d2(c(4), c(4))];
    let l78 = vec![d1(-c(14), X2)];
    let l79 = vec![d1(c(14), X1)];
    let l85 = vec![d2(c(7), c(8)), d0(-two * c(13))];
    let l88 = vec![d2(c(7), c(8)), d0(-c(15))];
    let l99 = vec![d2(c(8), c(7)), d0(-c(15))];
    let z: OperatorEntry<T> = Vec::new();

    let rows: [[OperatorEntry<T>; 9]; 9] = [
        [
            l11.clone(),
            l12.clone(),
            l13.clone(),
            l14.clone(),
            z.clone(),
            l16.clone(),
            scale(&l13, k1),
            z.clone(),
            l16.clone(),
        ],
        [
            l12.clone(),
            l22,
            l23.clone(),
            l24,
            l16.clone(),
            z.clone(),
            scale(&l23, k1),
            l16.clone(),
            z.clone(),
        ],
        [
            scale(&l13, neg),
            scale(&l23, neg),
            l33,
            z.clone(),
            l35.clone(),
            l36.clone(),
            scale(&l77, k1),
            l38.clone(),
            l39.clone(),
        ],
        [l41, l42, z.clone(), l44, z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        [
            z.clone(),
            scale(&l16, neg),
            scale(&l38, neg),
            z.clone(),
            l55.clone(),
            l56.clone(),
            scale(&l35, -k1),
            l58.clone(),
            z.clone(),
        ],
        [
            l16.clone(),
            z.clone(),
            scale(&l39, neg),
            z.clone(),
            l56.clone(),
            l66,
            scale(&l36, -k1),
            z.clone(),
            l58,
        ],
        [
            scale(&l13, neg),
            scale(&l14, neg),
            l73,
            z.clone(),
            l35.clone(),
            l36.clone(),
            scale(&l77, k1),
            l78.clone(),
            l79.clone(),
        ],
        [
            z.clone(),
            scale(&l16, neg),
            scale(&l78, neg),
            z.clone(),
            l85,
            l56.clone(),
            scale(&l35, -k1),
            scale(&l88, k1),
            scale(&l56, k1),
        ],
        [
            l16,
            z.clone(),
            scale(&l79, neg),
            z,
            l56.clone(),
            l55,
            scale(&l36, -k1),
            scale(&l56, k1),
            scale(&l99, k1),
        ],
    ];
    let entries = rows.map(|row| row.map(|e| e.into_iter().filter(|t| !t.is_zero()).collect()));
    OperatorTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{derive_coefficients, MaterialParams};

    fn coeffs() -> StiffnessCoefficients<f64> {
        let m = MaterialParams::new(2.1, 1.3, 0.1, 0.4, 0.6, 0.2, 0.1).unwrap();
        derive_coefficients(&m, 1.0).unwrap()
    }

    #[test]
    fn documented_entries() {
        let c = coeffs();
        let t = build_operator_table(&c);
        assert_eq!(t.entry(0, 0), &[d2(c.get(1), c.get(2)), d0(-c.get(3))]);
        assert_eq!(t.entry(1, 1), &[d2(c.get(2), c.get(1)), d0(-c.get(3))]);
        assert_eq!(t.entry(0, 2), &[d1(c.get(11), Axis::X1)]);
        assert_eq!(t.entry(2, 0), &[d1(-c.get(11), Axis::X1)]);
        assert_eq!(t.entry(0, 6), &[d1(c.get(11), Axis::X1)]);
        assert_eq!(t.entry(3, 3), &[d2(c.get(6), c.get(6)), d0(-2.0 * c.get(12))]);
        assert_eq!(t.entry(3, 0), &[d1(-c.get(12), Axis::X2)]);
        assert_eq!(t.entry(3, 1), &[d1(c.get(12), Axis::X1)]);
        assert!(t.entry(0, 4).is_empty());
    }

    #[test]
    fn k1_scales_marked_entries() {
        let mut c = coeffs();
        c.k1 = 2.5;
        let t = build_operator_table(&c);
        assert_eq!(t.entry(0, 6), &[d1(2.5 * c.get(11), Axis::X1)]);
        assert_eq!(t.entry(2, 6), &[d2(2.5 * c.get(4), 2.5 * c.get(4))]);
        assert_eq!(t.entry(4, 6), &[d1(2.5 * c.get(13), Axis::X2)]);
        assert_eq!(t.entry(8, 8), &[d2(2.5 * c.get(8), 2.5 * c.get(7)), d0(-2.5 * c.get(15))]);
        // column 3 of row 7 carries no k1
        assert_eq!(t.entry(6, 2), &[d2(c.get(5), c.get(5))]);
    }

    #[test]
    fn zero_coefficients_give_empty_table() {
        let c = StiffnessCoefficients {
            c: [0.0; 15],
            k1: 1.0,
        };
        let t = build_operator_table(&c);
        assert_eq!(t.nonzero_blocks(), 0);
    }

    #[test]
    fn every_coefficient_is_used() {
        let base = coeffs();
        let t0 = build_operator_table(&base);
        for i in 0..15 {
            let mut c = base;
            c.c[i] *= 1.5;
            assert_ne!(build_operator_table(&c), t0, "c{} unused", i + 1);
        }
        let mut c = base;
        c.k1 = 3.0;
        assert_ne!(build_operator_table(&c), t0);
    }

    #[test]
    fn term_order() {
        assert_eq!(d0(1.0).order(), 0);
        assert_eq!(d1(1.0, Axis::X2).order(), 1);
        assert_eq!(mixed(1.0).order(), 2);
    }
}
