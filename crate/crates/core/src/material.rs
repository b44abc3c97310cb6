//! Elastic constants of a Cosserat plate and the stiffness coefficients
//! derived from them.

use thiserror::Error;

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("{0}")]
    Invariant(&'static str),
    #[error("material constant `{0}` is not finite")]
    NotFinite(&'static str),
}

/// The six Cosserat constants plus plate thickness, all in SI units.
///
/// `lambda`, `mu` and `alpha` are in Pa; `beta`, `gamma` and `epsilon` in N;
/// `thickness` in m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams<T> {
    pub lambda: T,
    pub mu: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub epsilon: T,
    pub thickness: T,
}

impl<T: Scalar> MaterialParams<T> {
    /// Builds a parameter set and checks it.
    pub fn new(
        lambda: T,
        mu: T,
        alpha: T,
        beta: T,
        gamma: T,
        epsilon: T,
        thickness: T,
    ) -> Result<Self, MaterialError> {
        let m = Self {
            lambda,
            mu,
            alpha,
            beta,
            gamma,
            epsilon,
            thickness,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let named = [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
            ("thickness", self.thickness),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(MaterialError::NotFinite(name));
            }
        }
        let zero = T::zero();
        let two = lit::<T>(2.0);
        if self.mu <= zero {
            return Err(MaterialError::Invariant("mu must be positive"));
        }
        if self.lambda + two * self.mu <= zero {
            return Err(MaterialError::Invariant("lambda+2*mu must be positive"));
        }
        if self.thickness <= zero {
            return Err(MaterialError::Invariant("thickness must be positive"));
        }
        // alpha = 0 leaves the Omega_3 equation as a pure-Neumann Laplacian.
        if self.alpha <= zero {
            return Err(MaterialError::Invariant("alpha must be positive"));
        }
        if self.gamma + self.epsilon <= zero {
            return Err(MaterialError::Invariant("gamma+epsilon must be positive"));
        }
        if self.beta + two * self.gamma <= zero {
            return Err(MaterialError::Invariant("beta+2*gamma must be positive"));
        }
        Ok(())
    }

    /// Same constants with a different thickness.
    pub fn with_thickness(mut self, thickness: T) -> Self {
        self.thickness = thickness;
        self
    }
}

/// The coefficients `c[0] ..= c[14]` (named c1..c15 in the usual notation)
/// that parameterize the plate operator, plus the auxiliary multiplier `k1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessCoefficients<T> {
    pub c: [T; 15],
    pub k1: T,
}

impl<T: Scalar> StiffnessCoefficients<T> {
    /// One-based accessor: `get(1)` is c1.
    #[inline]
    pub fn get(&self, i: usize) -> T {
        self.c[i - 1]
    }

    /// Evaluates the coefficient formulas without checking the material
    /// invariants. Denominators that vanish produce non-finite entries.
    pub fn evaluate(m: &MaterialParams<T>, k1: T) -> Self {
        let MaterialParams {
            lambda: l,
            mu,
            alpha: a,
            beta: b,
            gamma: g,
            epsilon: e,
            thickness: h,
        } = *m;
        let n = |x: f64| lit::<T>(x);
        let h3 = h * h * h;
        let apm = a + mu;
        let amm = a - mu;
        let c = [
            h3 * mu * (l + mu) / (n(3.0) * (l + n(2.0) * mu)),
            h3 * apm / n(12.0),
            n(5.0) * h * apm / n(6.0),
            n(5.0) * h * amm * amm / (n(6.0) * apm),
            h * (n(5.0) * a * a + n(6.0) * a * mu + n(5.0) * mu * mu) / (n(6.0) * apm),
            h3 * g * e / (n(3.0) * (g + e)),
            n(10.0) * h * g * (b + g) / (n(3.0) * (b + n(2.0) * g)),
            n(5.0) * h * (g + e) / n(6.0),
            n(10.0) * h * a * a / (n(3.0) * apm),
            n(5.0) * h * a * amm / (n(3.0) * apm),
            n(5.0) * h * amm / n(6.0),
            h3 * a / n(6.0),
            n(5.0) * h * a / n(3.0),
            h * a * (n(5.0) * a + n(3.0) * mu) / (n(3.0) * apm),
            n(2.0) * h * a * (n(5.0) * a + n(4.0) * mu) / (n(3.0) * apm),
        ];
        Self { c, k1 }
    }
}

/// Validates `m` and returns its stiffness coefficients.
pub fn derive_coefficients<T: Scalar>(
    m: &MaterialParams<T>,
    k1: T,
) -> Result<StiffnessCoefficients<T>, MaterialError> {
    m.validate()?;
    if !k1.is_finite() {
        return Err(MaterialError::NotFinite("k1"));
    }
    Ok(StiffnessCoefficients::evaluate(m, k1))
}
