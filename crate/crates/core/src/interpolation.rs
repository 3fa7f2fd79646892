//! RBF interpolation: centers, the interpolation matrix `A_ij = φ(x_j - x_i)`
//! and the dense solve `AΛ = U`.

use serde::{Deserialize, Serialize};

use crate::error::{RbfError, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// How `N` uniform nodes are laid out on `[0, η∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeLayout {
    /// `x_i = (i-1) L / N`: step `L/N`, right end excluded.
    #[default]
    HalfOpen,
    /// `x_i = (i-1) L / (N-1)`: both ends included.
    Closed,
}

/// Sorted, pairwise-distinct abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterSet<T> {
    points: Vec<T>,
}

impl<T: Real> CenterSet<T> {
    pub fn new(points: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return Err(RbfError::InvalidInput("center set must not be empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(RbfError::InvalidInput("centers must be finite".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(RbfError::InvalidInput(
                "centers must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `n` uniform nodes on `[0, length]` in the given layout.
    pub fn uniform(n: usize, length: T, layout: NodeLayout) -> Result<Self> {
        if n == 0 {
            return Err(RbfError::InvalidInput("need at least one center".into()));
        }
        if !(length > T::zero()) {
            return Err(RbfError::InvalidInput("interval length must be positive".into()));
        }
        let divisor = match layout {
            NodeLayout::HalfOpen => n,
            NodeLayout::Closed if n == 1 => 1,
            NodeLayout::Closed => n - 1,
        };
        let h = length / T::from_count(divisor);
        Self::new((0..n).map(|i| T::from_count(i) * h).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }
}

/// Dense square system with optional row labels for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseSystem<T> {
    pub matrix: Matrix<T>,
    pub rhs: Vec<T>,
    pub row_labels: Vec<String>,
}

impl<T: Real> DenseSystem<T> {
    pub fn new(matrix: Matrix<T>, rhs: Vec<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(RbfError::DimensionMismatch {
                expected: matrix.rows(),
                actual: matrix.cols(),
            });
        }
        if rhs.len() != matrix.rows() {
            return Err(RbfError::DimensionMismatch {
                expected: matrix.rows(),
                actual: rhs.len(),
            });
        }
        let row_labels = (0..rhs.len()).map(|i| format!("row{i}")).collect();
        Ok(Self {
            matrix,
            rhs,
            row_labels,
        })
    }
}

/// `A_ij = φ(x_j - x_i)`.
pub fn build_interpolation_matrix<T: Real>(
    kernel: &KernelSpec<T>,
    centers: &CenterSet<T>,
) -> Matrix<T> {
    let x = centers.points();
    Matrix::from_fn(x.len(), x.len(), |i, j| kernel.eval(x[j] - x[i]))
}

pub fn solve_dense<T: Real>(system: &DenseSystem<T>) -> Result<Vec<T>> {
    linalg::solve_linear(&system.matrix, &system.rhs)
}

/// A fitted interpolant `s(x) = Σ λ_i φ(x - x_i)`.
#[derive(Debug, Clone)]
pub struct Interpolant<T> {
    kernel: KernelSpec<T>,
    centers: CenterSet<T>,
    weights: Vec<T>,
}

impl<T: Real> Interpolant<T> {
    pub fn fit(kernel: KernelSpec<T>, centers: CenterSet<T>, values: &[T]) -> Result<Self> {
        let system = DenseSystem::new(
            build_interpolation_matrix(&kernel, &centers),
            values.to_vec(),
        )?;
        let weights = solve_dense(&system)?;
        Ok(Self {
            kernel,
            centers,
            weights,
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn eval(&self, x: T) -> T {
        self.centers
            .points()
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&c, &w)| acc + w * self.kernel.eval(x - c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::condition_number;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_center_matrix() {
        let c = CenterSet::new(vec![1.0]).unwrap();
        let a = build_interpolation_matrix(&KernelSpec::imq(2.0).unwrap(), &c);
        assert_eq!(a.to_rows(), vec![vec![0.5]]);
        let sys = DenseSystem::new(a, vec![3.0]).unwrap();
        assert_eq!(solve_dense(&sys).unwrap(), vec![6.0]);
    }

    #[test]
    fn two_center_mq_matrix() {
        let c = CenterSet::new(vec![0.0, 1.0]).unwrap();
        let a = build_interpolation_matrix(&KernelSpec::mq(1.0).unwrap(), &c);
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(a[(0, 0)], 1.0);
        assert_abs_diff_eq!(a[(0, 1)], s2, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 0)], s2, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 1)], 1.0);
    }

    #[test]
    fn uniform_layouts() {
        let h = CenterSet::uniform(10, 4.5, NodeLayout::HalfOpen).unwrap();
        assert_abs_diff_eq!(h.points()[1], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(h.points()[9], 4.05, epsilon = 1e-14);
        let c = CenterSet::uniform(10, 4.5, NodeLayout::Closed).unwrap();
        assert_abs_diff_eq!(c.points()[9], 4.5, epsilon = 1e-14);
        assert_eq!(CenterSet::uniform(1, 4.5, NodeLayout::Closed).unwrap().len(), 1);
    }

    #[test]
    fn invalid_centers_are_rejected() {
        assert!(CenterSet::<f64>::new(vec![]).is_err());
        assert!(CenterSet::new(vec![0.0, 0.0]).is_err());
        assert!(CenterSet::new(vec![1.0, 0.5]).is_err());
        assert!(CenterSet::uniform(0, 1.0, NodeLayout::Closed).is_err());
    }

    #[test]
    fn condition_grows_with_n_for_mq() {
        let mq = KernelSpec::mq(1.0).unwrap();
        let conds: Vec<f64> = [5, 10, 15]
            .iter()
            .map(|&n| {
                let c = CenterSet::uniform(n, 4.5, NodeLayout::Closed).unwrap();
                condition_number(&build_interpolation_matrix(&mq, &c)).unwrap()
            })
            .collect();
        assert!(conds[0] < conds[1] && conds[1] < conds[2], "{conds:?}");
    }

    #[test]
    fn interpolant_reproduces_data() {
        let centers = CenterSet::uniform(8, 2.0, NodeLayout::Closed).unwrap();
        let values: Vec<f64> = centers.points().iter().map(|x: &f64| x.sin()).collect();
        let s = Interpolant::fit(KernelSpec::ga(1.0).unwrap(), centers.clone(), &values).unwrap();
        for (x, u) in centers.points().iter().zip(&values) {
            assert_abs_diff_eq!(s.eval(*x), *u, epsilon = 1e-9);
        }
    }
}
