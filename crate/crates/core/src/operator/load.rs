use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::material::MaterialParams;
use crate::scalar::{lit, Point, Scalar};

/// Anything that yields the nine right-hand side components at a point.
pub trait SourceField<T>: Sync {
    fn eval(&self, x: Point<T>) -> [T; 9];
}

impl<T, F> SourceField<T> for F
where
    F: Fn(Point<T>) -> [T; 9] + Sync,
{
    fn eval(&self, x: Point<T>) -> [T; 9] {
        self(x)
    }
}

type PressureFn<T> = Arc<dyn Fn(Point<T>) -> T + Send + Sync>;
type GradientFn<T> = Arc<dyn Fn(Point<T>) -> [T; 2] + Send + Sync>;

#[derive(Clone)]
pub enum LoadKind<T> {
    Uniform,
    /// `sin(pi x1 / a) sin(pi x2 / b)`
    Sinusoidal { a: T, b: T },
    /// Caller-supplied shape and its gradient.
    Custom {
        pressure: PressureFn<T>,
        gradient: GradientFn<T>,
    },
}

impl<T: fmt::Debug> fmt::Debug for LoadKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadKind::Uniform => f.write_str("Uniform"),
            LoadKind::Sinusoidal { a, b } => f
                .debug_struct("Sinusoidal")
                .field("a", a)
                .field("b", b)
                .finish(),
            LoadKind::Custom { .. } => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("pressure gradient disagrees with finite differences at ({x}, {y}): analytic ({g0}, {g1}), numeric ({n0}, {n1})")]
    InconsistentGradient {
        x: f64,
        y: f64,
        g0: f64,
        g1: f64,
        n0: f64,
        n1: f64,
    },
    #[error("invalid load: {0}")]
    Invalid(&'static str),
}

/// Transverse pressure `p(x) = amplitude * shape(x)` in Pa.
#[derive(Debug, Clone)]
pub struct LoadSpec<T> {
    pub amplitude: T,
    pub kind: LoadKind<T>,
}

impl<T: Scalar> LoadSpec<T> {
    pub fn uniform(amplitude: T) -> Self {
        Self {
            amplitude,
            kind: LoadKind::Uniform,
        }
    }

    pub fn sinusoidal(amplitude: T, a: T, b: T) -> Result<Self, LoadError> {
        if !(a > T::zero() && b > T::zero()) {
            return Err(LoadError::Invalid("sinusoidal load needs a, b > 0"));
        }
        Ok(Self {
            amplitude,
            kind: LoadKind::Sinusoidal { a, b },
        })
    }

    /// Custom load. The gradient is spot-checked against central differences
    /// at ten deterministic points of the box `lo..hi`.
    pub fn custom<P, G>(
        amplitude: T,
        pressure: P,
        gradient: G,
        lo: Point<T>,
        hi: Point<T>,
    ) -> Result<Self, LoadError>
    where
        P: Fn(Point<T>) -> T + Send + Sync + 'static,
        G: Fn(Point<T>) -> [T; 2] + Send + Sync + 'static,
    {
        let spec = Self {
            amplitude,
            kind: LoadKind::Custom {
                pressure: Arc::new(pressure),
                gradient: Arc::new(gradient),
            },
        };
        spec.check_gradient(lo, hi)?;
        Ok(spec)
    }

    fn check_gradient(&self, lo: Point<T>, hi: Point<T>) -> Result<(), LoadError> {
        let LoadKind::Custom { pressure, gradient } = &self.kind else {
            return Ok(());
        };
        let lo = lo.map(|v| v.to_f64_lossy());
        let hi = hi.map(|v| v.to_f64_lossy());
        let diam = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
        if !(diam > 0.0) {
            return Err(LoadError::Invalid("empty bounding box"));
        }
        let step = 1e-5 * diam;
        let halton = |mut i: usize, base: usize| {
            let (mut f, mut r) = (1.0, 0.0);
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        };
        let p = |x: f64, y: f64| pressure([T::lit(x), T::lit(y)]).to_f64_lossy();
        let mut samples = Vec::with_capacity(10);
        for i in 1..=10 {
            let x = lo[0] + halton(i, 2) * (hi[0] - lo[0]);
            let y = lo[1] + halton(i, 3) * (hi[1] - lo[1]);
            let g = gradient([T::lit(x), T::lit(y)]).map(|v| v.to_f64_lossy());
            let n = [
                (p(x + step, y) - p(x - step, y)) / (2.0 * step),
                (p(x, y + step) - p(x, y - step)) / (2.0 * step),
            ];
            samples.push((x, y, g, n));
        }
        let scale = samples
            .iter()
            .map(|s| s.2[0].hypot(s.2[1]))
            .fold(0.0, f64::max)
            .max(1e-300);
        for (x, y, g, n) in samples {
            if (g[0] - n[0]).hypot(g[1] - n[1]) > 1e-6 * scale {
                return Err(LoadError::InconsistentGradient {
                    x,
                    y,
                    g0: g[0],
                    g1: g[1],
                    n0: n[0],
                    n1: n[1],
                });
            }
        }
        Ok(())
    }

    pub fn pressure(&self, x: Point<T>) -> T {
        self.amplitude
            * match &self.kind {
                LoadKind::Uniform => T::one(),
                LoadKind::Sinusoidal { a, b } => {
                    (T::PI() * x[0] / *a).sin() * (T::PI() * x[1] / *b).sin()
                }
                LoadKind::Custom { pressure, .. } => pressure(x),
            }
    }

    pub fn gradient(&self, x: Point<T>) -> [T; 2] {
        let g = match &self.kind {
            LoadKind::Uniform => [T::zero(); 2],
            LoadKind::Sinusoidal { a, b } => {
                let (kx, ky) = (T::PI() / *a, T::PI() / *b);
                [
                    kx * (kx * x[0]).cos() * (ky * x[1]).sin(),
                    ky * (kx * x[0]).sin() * (ky * x[1]).cos(),
                ]
            }
            LoadKind::Custom { gradient, .. } => gradient(x),
        };
        [self.amplitude * g[0], self.amplitude * g[1]]
    }
}

/// The load vector of the field equations for one value of the splitting
/// parameter. With `p1 = eta p` and `p2 = 2/3 (1 - eta) p`:
///
/// ```text
/// f1 = -h^2 lambda (3 p1,1 + 5 p2,1) / (30 (lambda + 2 mu))
/// f2 = -h^2 lambda (3 p1,2 + 5 p2,2) / (30 (lambda + 2 mu))
/// f3 = -p1
/// f7 = h^2 (3 p1 + 4 p2) / 24
/// ```
///
/// and zero for the other components.
#[derive(Debug, Clone)]
pub struct RhsVector<T> {
    pub eta: T,
    load: LoadSpec<T>,
    lambda: T,
    mu: T,
    thickness: T,
}

impl<T: Scalar> RhsVector<T> {
    pub fn new(load: &LoadSpec<T>, m: &MaterialParams<T>, eta: T) -> Self {
        Self {
            eta,
            load: load.clone(),
            lambda: m.lambda,
            mu: m.mu,
            thickness: m.thickness,
        }
    }

    /// The split pressures `(p1, p2)` at `x`.
    pub fn split_pressures(&self, x: Point<T>) -> (T, T) {
        split(self.load.pressure(x), self.eta)
    }

    pub fn load(&self) -> &LoadSpec<T> {
        &self.load
    }
}

#[inline]
pub(crate) fn split<T: Scalar>(p: T, eta: T) -> (T, T) {
    (eta * p, lit::<T>(2.0 / 3.0) * (T::one() - eta) * p)
}

impl<T: Scalar> SourceField<T> for RhsVector<T> {
    fn eval(&self, x: Point<T>) -> [T; 9] {
        let n = |v: f64| lit::<T>(v);
        let h2 = self.thickness * self.thickness;
        let (p1, p2) = self.split_pressures(x);
        let g = self.load.gradient(x);
        let (g1, g2) = (split(g[0], self.eta), split(g[1], self.eta));
        let k = -h2 * self.lambda / (n(30.0) * (self.lambda + n(2.0) * self.mu));
        let z = T::zero();
        [
            k * (n(3.0) * g1.0 + n(5.0) * g1.1),
            k * (n(3.0) * g2.0 + n(5.0) * g2.1),
            -p1,
            z,
            z,
            z,
            h2 * (n(3.0) * p1 + n(4.0) * p2) / n(24.0),
            z,
            z,
        ]
    }
}
