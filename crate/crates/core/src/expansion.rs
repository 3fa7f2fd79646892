//! Fitted RBF representations of the similarity profile `f`.

use serde::Serialize;

use crate::error::{RbfError, Result};
use crate::interpolation::CenterSet;
use crate::kernels::KernelSpec;
use crate::scalar::Real;

/// Anything that can report `(f, f', f'', f''')` at a point.
pub trait Expansion<T: Real> {
    fn state(&self, eta: T) -> Result<[T; 4]>;

    fn f_prime_at_0(&self) -> Result<T> {
        self.state(T::zero()).map(|s| s[1])
    }
}

/// `s(η) = Σ λ_i φ(η - x_i)`, differentiated analytically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectExpansion<T> {
    kernel: KernelSpec<T>,
    centers: CenterSet<T>,
    weights: Vec<T>,
}

impl<T: Real> DirectExpansion<T> {
    pub fn new(kernel: KernelSpec<T>, centers: CenterSet<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != centers.len() {
            return Err(RbfError::DimensionMismatch {
                expected: centers.len(),
                actual: weights.len(),
            });
        }
        Ok(Self {
            kernel,
            centers,
            weights,
        })
    }

    pub fn kernel(&self) -> &KernelSpec<T> {
        &self.kernel
    }

    pub fn centers(&self) -> &CenterSet<T> {
        &self.centers
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `s^(k)(η)` for `k` in `0..=3`.
    pub fn derivative(&self, k: usize, eta: T) -> Result<T> {
        let mut acc = T::zero();
        for (&x, &w) in self.centers.points().iter().zip(&self.weights) {
            acc = acc + w * self.kernel.eval_derivative(k, eta - x)?;
        }
        Ok(acc)
    }
}

impl<T: Real> Expansion<T> for DirectExpansion<T> {
    fn state(&self, eta: T) -> Result<[T; 4]> {
        let mut out = [T::zero(); 4];
        for (&x, &w) in self.centers.points().iter().zip(&self.weights) {
            let t = eta - x;
            for (k, o) in out.iter_mut().enumerate() {
                *o = *o + w * self.kernel.eval_derivative(k, t)?;
            }
        }
        Ok(out)
    }
}

/// `ŝ''' = Σ λ_i φ_i`, integrated three times with constants `d1, d2, d3`:
///
/// ```text
/// ŝ''(η) = Σ λ_i h2_i(η) + d1
/// ŝ'(η)  = Σ λ_i h1_i(η) + d1 η + d2
/// ŝ(η)   = Σ λ_i h0_i(η) + d1 η²/2 + d2 η + d3
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndirectExpansion<T> {
    kernel: KernelSpec<T>,
    centers: CenterSet<T>,
    weights: Vec<T>,
    constants: [T; 3],
}

impl<T: Real> IndirectExpansion<T> {
    pub fn new(
        kernel: KernelSpec<T>,
        centers: CenterSet<T>,
        weights: Vec<T>,
        constants: [T; 3],
    ) -> Result<Self> {
        if weights.len() != centers.len() {
            return Err(RbfError::DimensionMismatch {
                expected: centers.len(),
                actual: weights.len(),
            });
        }
        Ok(Self {
            kernel,
            centers,
            weights,
            constants,
        })
    }

    /// Splits a solver vector `[λ_1..λ_N, d1, d2, d3]`.
    pub fn from_unknowns(kernel: KernelSpec<T>, centers: CenterSet<T>, x: &[T]) -> Result<Self> {
        let n = centers.len();
        if x.len() != n + 3 {
            return Err(RbfError::DimensionMismatch {
                expected: n + 3,
                actual: x.len(),
            });
        }
        Self::new(kernel, centers, x[..n].to_vec(), [x[n], x[n + 1], x[n + 2]])
    }

    pub fn kernel(&self) -> &KernelSpec<T> {
        &self.kernel
    }

    pub fn centers(&self) -> &CenterSet<T> {
        &self.centers
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn constants(&self) -> [T; 3] {
        self.constants
    }
}

impl<T: Real> Expansion<T> for IndirectExpansion<T> {
    fn state(&self, eta: T) -> Result<[T; 4]> {
        let [d1, d2, d3] = self.constants;
        let half = T::lit(0.5);
        let mut out = [
            d1 * half * eta * eta + d2 * eta + d3,
            d1 * eta + d2,
            d1,
            T::zero(),
        ];
        for (&x, &w) in self.centers.points().iter().zip(&self.weights) {
            let t = eta - x;
            out[0] = out[0] + w * self.kernel.eval_antiderivative(0, t)?;
            out[1] = out[1] + w * self.kernel.eval_antiderivative(1, t)?;
            out[2] = out[2] + w * self.kernel.eval_antiderivative(2, t)?;
            out[3] = out[3] + w * self.kernel.eval(t);
        }
        Ok(out)
    }
}
