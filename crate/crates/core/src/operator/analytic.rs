use crate::scalar::{Point, Scalar};

use super::load::SourceField;
use super::{OperatorTable, Variable};

/// A smooth scalar field with closed-form first and second derivatives.
pub trait AnalyticField<T>: Send + Sync {
    fn value(&self, x: Point<T>) -> T;
    fn gradient(&self, x: Point<T>) -> [T; 2];
    fn hessian(&self, x: Point<T>) -> [[T; 2]; 2];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    /// Value, first and second derivative of `f(k t)` with respect to `t`.
    fn eval<T: Scalar>(self, k: T, t: T) -> [T; 3] {
        let (s, c) = (k * t).sin_cos();
        match self {
            Trig::Sin => [s, k * c, -k * k * s],
            Trig::Cos => [c, -k * s, -k * k * c],
        }
    }
}

/// `amplitude * fx(kx x1) * fy(ky x2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigProduct<T> {
    pub amplitude: T,
    pub kx: T,
    pub ky: T,
    pub fx: Trig,
    pub fy: Trig,
}

impl<T: Scalar> AnalyticField<T> for TrigProduct<T> {
    fn value(&self, x: Point<T>) -> T {
        self.amplitude * self.fx.eval(self.kx, x[0])[0] * self.fy.eval(self.ky, x[1])[0]
    }

    fn gradient(&self, x: Point<T>) -> [T; 2] {
        let (f, g) = (self.fx.eval(self.kx, x[0]), self.fy.eval(self.ky, x[1]));
        [self.amplitude * f[1] * g[0], self.amplitude * f[0] * g[1]]
    }

    fn hessian(&self, x: Point<T>) -> [[T; 2]; 2] {
        let (f, g) = (self.fx.eval(self.kx, x[0]), self.fy.eval(self.ky, x[1]));
        let a = self.amplitude;
        let m = a * f[1] * g[1];
        [[a * f[2] * g[0], m], [m, a * f[0] * g[2]]]
    }
}

/// `c0 + c1 x1 + c2 x2 + c11 x1^2 + c12 x1 x2 + c22 x2^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic<T> {
    pub coeffs: [T; 6],
}

impl<T: Scalar> AnalyticField<T> for Quadratic<T> {
    fn value(&self, x: Point<T>) -> T {
        let [c0, c1, c2, c11, c12, c22] = self.coeffs;
        c0 + c1 * x[0] + c2 * x[1] + c11 * x[0] * x[0] + c12 * x[0] * x[1] + c22 * x[1] * x[1]
    }

    fn gradient(&self, x: Point<T>) -> [T; 2] {
        let [_, c1, c2, c11, c12, c22] = self.coeffs;
        let two = T::one() + T::one();
        [c1 + two * c11 * x[0] + c12 * x[1], c2 + c12 * x[0] + two * c22 * x[1]]
    }

    fn hessian(&self, _: Point<T>) -> [[T; 2]; 2] {
        let [_, _, _, c11, c12, c22] = self.coeffs;
        let two = T::one() + T::one();
        [[two * c11, c12], [c12, two * c22]]
    }
}

/// Pointwise `L u` for nine analytic fields.
pub fn apply_operator_analytic<T: Scalar, F: AnalyticField<T>>(
    table: &OperatorTable<T>,
    fields: &[F; 9],
    x: Point<T>,
) -> [T; 9] {
    let jets: [(T, [T; 2], [[T; 2]; 2]); 9] =
        std::array::from_fn(|j| (fields[j].value(x), fields[j].gradient(x), fields[j].hessian(x)));
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for (j, &(v, g, h)) in jets.iter().enumerate() {
            for term in table.entry(i, j) {
                acc = acc + term.apply(v, g, h);
            }
        }
        acc
    })
}

/// Nine trigonometric fields on `[0,a] x [0,b]` used as exact solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution<T> {
    pub fields: [TrigProduct<T>; 9],
}

impl<T: Scalar> ManufacturedSolution<T> {
    /// Every component is `U_i sin(pi x1/a) sin(pi x2/b)`, vanishing on the
    /// whole boundary. Pairs with clamped conditions.
    pub fn dirichlet(a: T, b: T, amplitudes: [T; 9]) -> Self {
        Self::with_pattern(a, b, amplitudes, |_| (Trig::Sin, Trig::Sin))
    }

    /// Components vanish where the simply supported conditions prescribe
    /// them and have zero normal derivative elsewhere, so the homogeneous
    /// natural conditions hold exactly.
    pub fn simply_supported(a: T, b: T, amplitudes: [T; 9]) -> Self {
        use Variable::*;
        Self::with_pattern(a, b, amplitudes, |v| match v {
            W | WStar => (Trig::Sin, Trig::Sin),
            Psi1 | Omega2Zero | OmegaHat2 => (Trig::Cos, Trig::Sin),
            Psi2 | Omega1Zero | OmegaHat1 => (Trig::Sin, Trig::Cos),
            Omega3 => (Trig::Cos, Trig::Cos),
        })
    }

    fn with_pattern(a: T, b: T, amplitudes: [T; 9], pattern: impl Fn(Variable) -> (Trig, Trig)) -> Self {
        let (kx, ky) = (T::PI() / a, T::PI() / b);
        Self {
            fields: std::array::from_fn(|i| {
                let (fx, fy) = pattern(Variable::ALL[i]);
                TrigProduct {
                    amplitude: amplitudes[i],
                    kx,
                    ky,
                    fx,
                    fy,
                }
            }),
        }
    }

    pub fn value(&self, x: Point<T>) -> [T; 9] {
        std::array::from_fn(|i| self.fields[i].value(x))
    }

    pub fn gradient(&self, x: Point<T>) -> [[T; 2]; 9] {
        std::array::from_fn(|i| self.fields[i].gradient(x))
    }

    /// The right-hand side that makes this the exact solution.
    pub fn source<'a>(&'a self, table: &'a OperatorTable<T>) -> ManufacturedSource<'a, T> {
        ManufacturedSource {
            table,
            solution: self,
        }
    }
}

/// `L u` for a manufactured `u`, usable as a load.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedSource<'a, T> {
    table: &'a OperatorTable<T>,
    solution: &'a ManufacturedSolution<T>,
}

impl<T: Scalar> SourceField<T> for ManufacturedSource<'_, T> {
    fn eval(&self, x: Point<T>) -> [T; 9] {
        apply_operator_analytic(self.table, &self.solution.fields, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{derive_coefficients, MaterialParams};
    use crate::operator::build_operator_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(k1: f64) -> (crate::material::StiffnessCoefficients<f64>, OperatorTable<f64>) {
        let m = MaterialParams::new(2.1, 1.3, 0.1, 0.4, 0.6, 0.2, 0.1).unwrap();
        let c = derive_coefficients(&m, k1).unwrap();
        (c, build_operator_table(&c))
    }

    /// Second, independent pass over the operator list: every L_ij written
    /// out as a closure over central differences of the fields.
    fn fd_oracle(c: &[f64; 16], k1: f64, u: &dyn Fn(usize, [f64; 2]) -> f64, x: [f64; 2]) -> [f64; 9] {
        let h = 1e-3;
        let v = |j: usize| u(j, x);
        let dx = |j: usize| (u(j, [x[0] + h, x[1]]) - u(j, [x[0] - h, x[1]])) / (2.0 * h);
        let dy = |j: usize| (u(j, [x[0], x[1] + h]) - u(j, [x[0], x[1] - h])) / (2.0 * h);
        let dxx = |j: usize| (u(j, [x[0] + h, x[1]]) - 2.0 * v(j) + u(j, [x[0] - h, x[1]])) / (h * h);
        let dyy = |j: usize| (u(j, [x[0], x[1] + h]) - 2.0 * v(j) + u(j, [x[0], x[1] - h])) / (h * h);
        let dxy = |j: usize| {
            (u(j, [x[0] + h, x[1] + h]) - u(j, [x[0] + h, x[1] - h]) - u(j, [x[0] - h, x[1] + h])
                + u(j, [x[0] - h, x[1] - h]))
                / (4.0 * h * h)
        };
        let l11 = |j| c[1] * dxx(j) + c[2] * dyy(j) - c[3] * v(j);
        let l12 = |j| (c[1] - c[2]) * dxy(j);
        let l13 = |j| c[11] * dx(j);
        let l14 = |j| c[12] * dy(j);
        let l16 = |j| c[13] * v(j);
        let l22 = |j| c[2] * dxx(j) + c[1] * dyy(j) - c[3] * v(j);
        let l23 = |j| c[11] * dy(j);
        let l24 = |j| -c[12] * dx(j);
        let l33 = |j| c[3] * (dxx(j) + dyy(j));
        let l35 = |j| -c[13] * dy(j);
        let l36 = |j| c[13] * dx(j);
        let l38 = |j| -c[10] * dy(j);
        let l39 = |j| c[10] * dx(j);
        let l41 = |j| -c[12] * dy(j);
        let l42 = |j| c[12] * dx(j);
        let l44 = |j| c[6] * (dxx(j) + dyy(j)) - 2.0 * c[12] * v(j);
        let l55 = |j| c[7] * dxx(j) + c[8] * dyy(j) - 2.0 * c[13] * v(j);
        let l56 = |j| (c[7] - c[8]) * dxy(j);
        let l58 = |j| -c[9] * v(j);
        let l66 = |j| c[8] * dxx(j) + c[7] * dyy(j) - 2.0 * c[13] * v(j);
        let l73 = |j| c[5] * (dxx(j) + dyy(j));
        let l77 = |j| c[4] * (dxx(j) + dyy(j));
        let l78 = |j| -c[14] * dy(j);
        let l79 = |j| c[14] * dx(j);
        let l85 = |j| c[7] * dxx(j) + c[8] * dyy(j) - 2.0 * c[13] * v(j);
        let l88 = |j| c[7] * dxx(j) + c[8] * dyy(j) - c[15] * v(j);
        let l99 = |j| c[8] * dxx(j) + c[7] * dyy(j) - c[15] * v(j);
        [
            l11(0) + l12(1) + l13(2) + l14(3) + l16(5) + k1 * l13(6) + l16(8),
            l12(0) + l22(1) + l23(2) + l24(3) + l16(4) + k1 * l23(6) + l16(7),
            -l13(0) - l23(1) + l33(2) + l35(4) + l36(5) + k1 * l77(6) + l38(7) + l39(8),
            l41(0) + l42(1) + l44(3),
            -l16(1) - l38(2) + l55(4) + l56(5) - k1 * l35(6) + l58(7),
            l16(0) - l39(2) + l56(4) + l66(5) - k1 * l36(6) + l58(8),
            -l13(0) - l14(1) + l73(2) + l35(4) + l36(5) + k1 * l77(6) + l78(7) + l79(8),
            -l16(1) - l78(2) + l85(4) + l56(5) - k1 * l35(6) + k1 * l88(7) + k1 * l56(8),
            l16(0) - l79(2) + l56(4) + l55(5) - k1 * l36(6) + k1 * l56(7) + k1 * l99(8),
        ]
    }

    #[test]
    fn zero_field_gives_zero() {
        let (_, t) = table(1.0);
        let zero = [Quadratic { coeffs: [0.0; 6] }; 9];
        assert_eq!(apply_operator_analytic(&t, &zero, [0.3, 0.4]), [0.0; 9]);
    }

    #[test]
    fn matches_finite_difference_oracle_on_quadratics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k1 in [1.0, 0.7] {
            let (c, t) = table(k1);
            let mut cc = [0.0; 16];
            cc[1..].copy_from_slice(&c.c);
            let fields: [Quadratic<f64>; 9] =
                std::array::from_fn(|_| Quadratic { coeffs: std::array::from_fn(|_| rng.random_range(-1.0..1.0)) });
            let u = |j: usize, x: [f64; 2]| fields[j].value(x);
            for _ in 0..20 {
                let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let got = apply_operator_analytic(&t, &fields, x);
                let want = fd_oracle(&cc, k1, &u, x);
                for i in 0..9 {
                    assert!(
                        (got[i] - want[i]).abs() <= 1e-6 * (1.0 + want[i].abs()),
                        "row {i}: {} vs {}",
                        got[i],
                        want[i]
                    );
                }
            }
        }
    }

    #[test]
    fn trig_derivatives_match_differences() {
        let f = TrigProduct {
            amplitude: 1.3f64,
            kx: 1.1,
            ky: 0.6,
            fx: Trig::Cos,
            fy: Trig::Sin,
        };
        let x = [0.4, 0.9];
        let h = 1e-4;
        let g = f.gradient(x);
        let hs = f.hessian(x);
        let num_gx = (f.value([x[0] + h, x[1]]) - f.value([x[0] - h, x[1]])) / (2.0 * h);
        let num_gy = (f.value([x[0], x[1] + h]) - f.value([x[0], x[1] - h])) / (2.0 * h);
        let num_xy = (f.gradient([x[0], x[1] + h])[0] - f.gradient([x[0], x[1] - h])[0]) / (2.0 * h);
        assert!((g[0] - num_gx).abs() < 1e-7 && (g[1] - num_gy).abs() < 1e-7);
        assert!((hs[0][1] - num_xy).abs() < 1e-7);
    }

    #[test]
    fn sine_fields_are_laplacian_eigenfunctions() {
        let (_, t) = table(1.0);
        // only the (3,3) entry, acting on W alone
        let mut only = OperatorTable::empty();
        only.entry_mut(2, 2).extend_from_slice(t.entry(2, 2));
        let a = 2.0;
        let mut amps = [0.0; 9];
        amps[2] = 1.7;
        let u = ManufacturedSolution::dirichlet(a, a, amps);
        let k = std::f64::consts::PI / a;
        let crate::operator::ScalarOperatorTerm::Second { a: m } = t.entry(2, 2)[0] else {
            panic!()
        };
        for x in [[0.3, 0.5], [1.2, 1.7]] {
            let got = apply_operator_analytic(&only, &u.fields, x)[2];
            let want = -k * k * (m[0][0] + m[1][1]) * u.value(x)[2];
            assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn simply_supported_pattern_vanishes_where_prescribed() {
        let u = ManufacturedSolution::simply_supported(2.0f64, 3.0, [1.0; 9]);
        // x1 = 0 edge: W, W*, Psi2, Omega1_0, Omega_hat1
        for i in [2, 6, 1, 4, 7] {
            assert!(u.value([0.0, 1.1])[i].abs() < 1e-15);
            assert!(u.value([2.0, 1.1])[i].abs() < 1e-15);
        }
        // x2 = 0 edge: W, W*, Psi1, Omega2_0, Omega_hat2
        for i in [2, 6, 0, 5, 8] {
            assert!(u.value([0.7, 0.0])[i].abs() < 1e-15);
            assert!(u.value([0.7, 3.0])[i].abs() < 1e-15);
        }
        // Omega3 has zero normal derivative everywhere on the boundary
        assert!(u.gradient([0.0, 1.0])[3][0].abs() < 1e-15);
        assert!(u.gradient([0.5, 3.0])[3][1].abs() < 1e-15);
    }
}
