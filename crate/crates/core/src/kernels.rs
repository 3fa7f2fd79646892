//! Radial kernel families in one dimension.
//!
//! Every kernel is evaluated as a function of the signed offset `t = x - x_i`
//! with `r = |t|`. Derivatives are taken with respect to `t` (so odd orders are
//! odd functions of `t`), and antiderivatives form the integration chain used
//! by the integrated collocation scheme:
//!
//! ```text
//! stage 2 = ∫ φ,   stage 1 = ∫∫ φ,   stage 0 = ∫∫∫ φ
//! ```
//!
//! The multiquadric chain is available in closed form. All other families fall
//! back to adaptive quadrature from the base point `t = 0` using the repeated
//! integration formula `∫_0^t (t-u)^m / m! φ(u) du`, so every stage costs a
//! single one-dimensional integral.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{RbfError, Result};
use crate::quadrature;
use crate::scalar::Real;

/// Highest derivative order the kernels provide.
pub const MAX_DERIVATIVE: usize = 3;
/// Number of antiderivative stages (stage indices `0..ANTIDERIVATIVE_STAGES`).
pub const ANTIDERIVATIVE_STAGES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `sqrt(r^2 + c^2)`
    Mq,
    /// `1 / sqrt(r^2 + c^2)`
    Imq,
    /// `exp(-c r^2)`
    Ga,
    /// `(-1)^(k+1) r^(2k) ln r`
    Tps,
    /// `r^(2k+1)`
    Conical,
    /// `exp(-c r)`
    ExpSpline,
}

impl KernelFamily {
    pub fn uses_shape(self) -> bool {
        matches!(self, Self::Mq | Self::Imq | Self::Ga | Self::ExpSpline)
    }

    pub fn uses_order(self) -> bool {
        matches!(self, Self::Tps | Self::Conical)
    }

    /// Whether the first derivative vanishes as `r → ∞`.
    pub fn derivative_decays(self) -> bool {
        matches!(self, Self::Imq | Self::Ga | Self::ExpSpline)
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Mq => "MQ",
            Self::Imq => "IMQ",
            Self::Ga => "GA",
            Self::Tps => "TPS",
            Self::Conical => "Conical",
            Self::ExpSpline => "ExpSpline",
        };
        f.write_str(name)
    }
}

/// A kernel family together with its shape parameter `c` or order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T> {
    family: KernelFamily,
    shape: T,
    order: u32,
}

impl<T: Real> KernelSpec<T> {
    /// Builds a kernel. `shape` must be positive for MQ/IMQ/GA/ExpSpline and
    /// `order` must be at least 1 for TPS/Conical; the unused parameter is ignored.
    pub fn new(family: KernelFamily, shape: T, order: u32) -> Result<Self> {
        if family.uses_shape() && !(shape > T::zero() && shape.is_finite()) {
            return Err(RbfError::InvalidKernel(format!(
                "{family} shape parameter must be positive and finite, got {shape}"
            )));
        }
        if family.uses_order() && order == 0 {
            return Err(RbfError::InvalidKernel(format!(
                "{family} order must be a positive integer"
            )));
        }
        Ok(Self {
            family,
            shape: if family.uses_shape() { shape } else { T::zero() },
            order: if family.uses_order() { order } else { 0 },
        })
    }

    pub fn mq(c: T) -> Result<Self> {
        Self::new(KernelFamily::Mq, c, 0)
    }

    pub fn imq(c: T) -> Result<Self> {
        Self::new(KernelFamily::Imq, c, 0)
    }

    pub fn ga(c: T) -> Result<Self> {
        Self::new(KernelFamily::Ga, c, 0)
    }

    pub fn exp_spline(c: T) -> Result<Self> {
        Self::new(KernelFamily::ExpSpline, c, 0)
    }

    pub fn tps(k: u32) -> Result<Self> {
        Self::new(KernelFamily::Tps, T::zero(), k)
    }

    pub fn conical(k: u32) -> Result<Self> {
        Self::new(KernelFamily::Conical, T::zero(), k)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn shape(&self) -> T {
        self.shape
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Returns the same family with a different shape parameter.
    pub fn with_shape(&self, c: T) -> Result<Self> {
        Self::new(self.family, c, self.order)
    }

    /// `φ(|t|)`.
    pub fn eval(&self, t: T) -> T {
        let c = self.shape;
        let r = t.abs();
        match self.family {
            KernelFamily::Mq => t.hypot(c),
            KernelFamily::Imq => t.hypot(c).recip(),
            KernelFamily::Ga => (-c * t * t).exp(),
            KernelFamily::ExpSpline => (-c * r).exp(),
            KernelFamily::Tps => {
                if r == T::zero() {
                    T::zero()
                } else {
                    self.tps_sign() * r.powi(2 * self.order as i32) * r.ln()
                }
            }
            KernelFamily::Conical => r.powi(2 * self.order as i32 + 1),
        }
    }

    fn tps_sign(&self) -> T {
        // (-1)^(k+1)
        if self.order % 2 == 1 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn capability(&self, what: String) -> RbfError {
        RbfError::Capability {
            family: self.family,
            what,
        }
    }

    /// `d^k/dt^k φ(|t|)` for `k` in `0..=3`.
    pub fn eval_derivative(&self, k: usize, t: T) -> Result<T> {
        if k == 0 {
            return Ok(self.eval(t));
        }
        if k > MAX_DERIVATIVE {
            return Err(self.capability(format!("derivative order {k}")));
        }
        let c = self.shape;
        let lit = T::lit;
        let value = match self.family {
            KernelFamily::Mq => {
                let s = t.hypot(c);
                match k {
                    1 => t / s,
                    2 => c * c / (s * s * s),
                    _ => -lit(3.0) * c * c * t / s.powi(5),
                }
            }
            KernelFamily::Imq => {
                let s = t.hypot(c);
                match k {
                    1 => -t / (s * s * s),
                    2 => (lit(2.0) * t * t - c * c) / s.powi(5),
                    _ => lit(3.0) * t * (lit(3.0) * c * c - lit(2.0) * t * t) / s.powi(7),
                }
            }
            KernelFamily::Ga => {
                let e = (-c * t * t).exp();
                match k {
                    1 => -lit(2.0) * c * t * e,
                    2 => (lit(4.0) * c * c * t * t - lit(2.0) * c) * e,
                    _ => (lit(12.0) * c * c * t - lit(8.0) * c * c * c * t * t * t) * e,
                }
            }
            KernelFamily::ExpSpline => {
                if t == T::zero() {
                    return Err(self.capability("derivatives at r = 0".into()));
                }
                (-c * t.signum()).powi(k as i32) * (-c * t.abs()).exp()
            }
            KernelFamily::Tps | KernelFamily::Conical => {
                if k > 2 {
                    return Err(self.capability(format!("derivative order {k}")));
                }
                if t == T::zero() {
                    return Err(self.capability("derivatives at r = 0".into()));
                }
                self.spline_derivative(k, t)
            }
        };
        Ok(value)
    }

    fn spline_derivative(&self, k: usize, t: T) -> T {
        let m = T::from_count(self.order as usize);
        let two = T::lit(2.0);
        let r = t.abs();
        match (self.family, k) {
            (KernelFamily::Tps, 1) => {
                let p = 2 * self.order as i32 - 1;
                self.tps_sign() * t.powi(p) * (two * m * r.ln() + T::one())
            }
            (KernelFamily::Tps, _) => {
                let p = 2 * self.order as i32 - 2;
                self.tps_sign()
                    * t.powi(p)
                    * (two * m * (two * m - T::one()) * r.ln() + T::lit(4.0) * m - T::one())
            }
            (_, 1) => (two * m + T::one()) * r.powi(2 * self.order as i32) * t.signum(),
            (_, _) => (two * m + T::one()) * two * m * r.powi(2 * self.order as i32 - 1),
        }
    }

    /// Antiderivative chain value. `stage = 2` is `∫φ`, `1` is `∫∫φ`, `0` is `∫∫∫φ`.
    ///
    /// For MQ, with `s = sqrt(t^2 + c^2)` and `L = ln(t + s)`:
    ///
    /// ```text
    /// F2 = t s / 2 + c^2 L / 2
    /// F1 = s^3 / 6 + c^2 (t L - s) / 2
    /// F0 = t s^3 / 24 - 5 c^2 t s / 16 + c^2 t^2 L / 4 - c^4 L / 16
    /// ```
    ///
    /// Other families integrate numerically from `t = 0`. The two conventions
    /// differ by a polynomial of degree `2 - stage`, which the integration
    /// constants of the collocation expansion absorb.
    pub fn eval_antiderivative(&self, stage: usize, t: T) -> Result<T> {
        if stage >= ANTIDERIVATIVE_STAGES {
            return Err(self.capability(format!("antiderivative stage {stage}")));
        }
        match self.family {
            KernelFamily::Mq => Ok(self.mq_antiderivative(stage, t)),
            _ => antiderivative_by_quadrature(self, stage, t),
        }
    }

    fn mq_antiderivative(&self, stage: usize, t: T) -> T {
        let lit = T::lit;
        let c = self.shape;
        let c2 = c * c;
        let s = t.hypot(c);
        // ln(t + s) without cancellation for negative t
        let l = (t / c).asinh() + c.ln();
        match stage {
            2 => t * s / lit(2.0) + c2 * l / lit(2.0),
            1 => s * s * s / lit(6.0) + c2 * (t * l - s) / lit(2.0),
            _ => {
                t * s * s * s / lit(24.0) - lit(5.0) * c2 * t * s / lit(16.0)
                    + c2 * t * t * l / lit(4.0)
                    - c2 * c2 * l / lit(16.0)
            }
        }
    }
}

/// Absolute tolerance used by the quadrature fallback.
pub fn quadrature_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

/// Antiderivative stage computed by adaptive quadrature from base point `0`,
/// for any family. Used as the fallback for non-MQ kernels and as an
/// independent check on the closed forms.
pub fn antiderivative_by_quadrature<T: Real>(
    spec: &KernelSpec<T>,
    stage: usize,
    t: T,
) -> Result<T> {
    if stage >= ANTIDERIVATIVE_STAGES {
        return Err(spec.capability(format!("antiderivative stage {stage}")));
    }
    // repeated integration: ∫_0^t (t-u)^m / m! φ(u) du with m = 2 - stage
    let m = 2 - stage;
    let factorial = T::from_count([1, 1, 2][m]);
    let integrand = |u: T| (t - u).powi(m as i32) / factorial * spec.eval(u);
    let tol = quadrature_tolerance::<T>();
    quadrature::integrate(integrand, T::zero(), t, tol).map(|i| i.value)
}
