//! Damped Newton iteration for square nonlinear systems `F(x) = 0` with a
//! finite-difference Jacobian.
//!
//! Each Newton direction is backtracked by halving until the infinity norm of
//! the residual strictly decreases, so accepted iterates have monotonically
//! decreasing residual norms.

use serde::Serialize;

use crate::error::{RbfError, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{inf_norm, Real};

/// A map `R^n → R^n`.
pub trait ResidualMap<T> {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[T]) -> Vec<T>;
}

/// Adapts a closure of known dimension into a [`ResidualMap`].
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F: Fn(&[T]) -> Vec<T>> ResidualMap<T> for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[T]) -> Vec<T> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    /// `(F(x + h e_j) - F(x)) / h`
    Forward,
    /// `(F(x + h e_j) - F(x - h e_j)) / 2h`, exact for quadratic maps.
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonConfig<T> {
    /// Convergence threshold on `||F||_∞`.
    pub residual_tolerance: T,
    /// Relative step size below which the iteration is declared stagnant.
    pub step_tolerance: T,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Column `j` uses `h_j = fd_step_scale * max(1, |x_j|)`.
    pub fd_step_scale: T,
    pub fd_scheme: FdScheme,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            residual_tolerance: T::lit(1e-10),
            step_tolerance: T::lit(1e-14),
            max_iterations: 200,
            max_halvings: 30,
            fd_step_scale: T::epsilon().cbrt(),
            fd_scheme: FdScheme::Central,
        }
    }
}

impl<T: Real> NewtonConfig<T> {
    /// Forward differences with the classic `sqrt(eps)` step.
    pub fn forward() -> Self {
        Self {
            fd_step_scale: T::epsilon().sqrt(),
            fd_scheme: FdScheme::Forward,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.residual_tolerance)
            || !positive(self.step_tolerance)
            || !positive(self.fd_step_scale)
            || self.max_iterations == 0
            || self.max_halvings == 0
        {
            return Err(RbfError::InvalidInput(
                "Newton tolerances, step scale and iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// No halving of the Newton step reduced the residual.
    DampingExhausted,
    /// Accepted step fell below the step tolerance.
    Stagnated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    pub final_residual_norm: T,
    pub converged: bool,
    pub termination: Termination,
    /// `||F||_∞` at the initial guess and after every accepted step.
    pub residual_history: Vec<T>,
}

/// Forward-difference Jacobian with `h_j = fd_step_scale * max(1, |x_j|)`.
pub fn finite_difference_jacobian<T: Real, M: ResidualMap<T> + ?Sized>(
    map: &M,
    point: &[T],
    fd_step_scale: T,
) -> Matrix<T> {
    jacobian_with(map, point, None, fd_step_scale, FdScheme::Forward)
}

/// Finite-difference Jacobian using either scheme. `base` may carry `F(point)`
/// to save one evaluation in the forward scheme.
pub fn jacobian_with<T: Real, M: ResidualMap<T> + ?Sized>(
    map: &M,
    point: &[T],
    base: Option<&[T]>,
    fd_step_scale: T,
    scheme: FdScheme,
) -> Matrix<T> {
    let n = point.len();
    let m = map.dim();
    let mut jac = Matrix::zeros(m, n);
    let owned;
    let f0 = match (scheme, base) {
        (FdScheme::Forward, Some(b)) => b,
        (FdScheme::Forward, None) => {
            owned = map.eval(point);
            &owned[..]
        }
        (FdScheme::Central, _) => &[][..],
    };
    let mut probe = point.to_vec();
    for j in 0..n {
        let h = fd_step_scale * T::one().max(point[j].abs());
        let column: Vec<T> = match scheme {
            FdScheme::Forward => {
                probe[j] = point[j] + h;
                let step = probe[j] - point[j];
                let f1 = map.eval(&probe);
                f1.iter().zip(f0).map(|(&a, &b)| (a - b) / step).collect()
            }
            FdScheme::Central => {
                probe[j] = point[j] + h;
                let hi = probe[j];
                let fp = map.eval(&probe);
                probe[j] = point[j] - h;
                let lo = probe[j];
                let fm = map.eval(&probe);
                fp.iter().zip(&fm).map(|(&a, &b)| (a - b) / (hi - lo)).collect()
            }
        };
        probe[j] = point[j];
        for (i, v) in column.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    jac
}

fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Damped Newton iteration from `initial_guess`.
///
/// Non-convergence is reported through `converged = false`; a singular
/// Jacobian or a non-finite residual at the initial guess is an error.
pub fn solve_newton<T: Real, M: ResidualMap<T> + ?Sized>(
    map: &M,
    initial_guess: &[T],
    config: &NewtonConfig<T>,
) -> Result<NewtonReport<T>> {
    config.validate()?;
    let n = map.dim();
    if n == 0 {
        return Err(RbfError::InvalidInput("system dimension must be at least 1".into()));
    }
    if initial_guess.len() != n {
        return Err(RbfError::DimensionMismatch {
            expected: n,
            actual: initial_guess.len(),
        });
    }
    let mut x = initial_guess.to_vec();
    let mut f = map.eval(&x);
    if f.len() != n {
        return Err(RbfError::DimensionMismatch {
            expected: n,
            actual: f.len(),
        });
    }
    if !all_finite(&f) {
        return Err(RbfError::NonFinite("residual at initial guess".into()));
    }
    let mut norm = inf_norm(&f);
    let mut history = vec![norm];
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        if norm <= config.residual_tolerance {
            termination = Termination::Converged;
            break;
        }
        let jac = jacobian_with(map, &x, Some(&f), config.fd_step_scale, config.fd_scheme);
        let rhs: Vec<T> = f.iter().map(|&v| -v).collect();
        let dx = linalg::solve_linear(&jac, &rhs)?;

        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let trial: Vec<T> = x.iter().zip(&dx).map(|(&xi, &di)| xi + t * di).collect();
            let ft = map.eval(&trial);
            let nt = inf_norm(&ft);
            if nt.is_finite() && nt < norm {
                accepted = Some((trial, ft, nt));
                break;
            }
            t = t * T::lit(0.5);
        }
        let Some((trial, ft, nt)) = accepted else {
            termination = Termination::DampingExhausted;
            break;
        };
        iterations += 1;
        let step = t * inf_norm(&dx);
        x = trial;
        f = ft;
        norm = nt;
        history.push(norm);
        if norm <= config.residual_tolerance {
            termination = Termination::Converged;
            break;
        }
        if step <= config.step_tolerance * T::one().max(inf_norm(&x)) {
            termination = Termination::Stagnated;
            break;
        }
    }

    Ok(NewtonReport {
        solution: x,
        iterations,
        final_residual_norm: norm,
        converged: termination == Termination::Converged,
        termination,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_map_converges_in_one_step() {
        let map = FnMap::new(1, |x: &[f64]| vec![x[0] - 3.0]);
        let rep = solve_newton(&map, &[0.0], &NewtonConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_abs_diff_eq!(rep.solution[0], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn scalar_quadratic() {
        let map = FnMap::new(1, |x: &[f64]| vec![x[0] * x[0] - 4.0]);
        let cfg = NewtonConfig {
            residual_tolerance: 1e-12,
            ..NewtonConfig::default()
        };
        let rep = solve_newton(&map, &[3.0], &cfg).unwrap();
        assert!(rep.converged);
        assert_abs_diff_eq!(rep.solution[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_tail() {
        let map = FnMap::new(1, |x: &[f64]| vec![x[0] * x[0] - 4.0]);
        let cfg = NewtonConfig {
            residual_tolerance: 1e-14,
            ..NewtonConfig::forward()
        };
        let rep = solve_newton(&map, &[3.0], &cfg).unwrap();
        let h = &rep.residual_history;
        assert!(h.len() >= 4, "{h:?}");
        let tail = &h[h.len() - 3..];
        for w in tail.windows(2) {
            if w[1] > 0.0 {
                assert!(w[1] <= 10.0 * w[0] * w[0], "{h:?}");
            }
        }
    }

    #[test]
    fn two_dimensional_system() {
        let map = FnMap::new(2, |x: &[f64]| vec![x[0] + x[1] - 3.0, x[0] * x[1] - 2.0]);
        let cfg = NewtonConfig {
            residual_tolerance: 1e-12,
            ..NewtonConfig::default()
        };
        let rep = solve_newton(&map, &[3.0, 0.0], &cfg).unwrap();
        assert!(rep.converged);
        let (a, b) = (rep.solution[0], rep.solution[1]);
        let f = map.eval(&[a, b]);
        assert!(f.iter().all(|v| v.abs() <= 1e-12));
        let near = |p: f64, q: f64| (a - p).abs() < 1e-9 && (b - q).abs() < 1e-9;
        assert!(near(1.0, 2.0) || near(2.0, 1.0));
    }

    #[test]
    fn accepted_steps_are_monotone() {
        let map = FnMap::new(2, |x: &[f64]| {
            vec![(x[0] - 1.0).powi(3) + x[1], x[1].sinh() - 0.5 * x[0]]
        });
        let rep = solve_newton(&map, &[4.0, -2.0], &NewtonConfig::default()).unwrap();
        for w in rep.residual_history.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn singular_jacobian_is_an_error() {
        let map = FnMap::new(2, |x: &[f64]| vec![x[0] + x[1] - 1.0, 2.0 * (x[0] + x[1])]);
        assert!(matches!(
            solve_newton(&map, &[0.0, 0.0], &NewtonConfig::default()),
            Err(RbfError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn no_root_reports_non_convergence() {
        let map = FnMap::new(1, |x: &[f64]| vec![x[0] * x[0] + 1.0]);
        let rep = solve_newton(&map, &[0.3], &NewtonConfig::default()).unwrap();
        assert!(!rep.converged);
        assert!(rep.final_residual_norm >= 1.0);
    }

    #[test]
    fn jacobian_examples() {
        let m = [[2.0, -1.0, 0.5], [0.0, 3.0, 1.0], [4.0, 0.0, -2.0]];
        let lin = FnMap::new(3, move |x: &[f64]| {
            m.iter()
                .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        });
        let j = finite_difference_jacobian(&lin, &[1.0, -2.0, 0.5], f64::EPSILON.sqrt());
        for i in 0..3 {
            for k in 0..3 {
                assert_abs_diff_eq!(j[(i, k)], m[i][k], epsilon = 1e-6 * m[i][k].abs().max(1.0));
            }
        }

        let quad = FnMap::new(2, |x: &[f64]| vec![x[0] * x[0], x[0] * x[1]]);
        let j = finite_difference_jacobian(&quad, &[2.0, 3.0], f64::EPSILON.sqrt());
        let expect = [[4.0, 0.0], [3.0, 2.0]];
        for i in 0..2 {
            for k in 0..2 {
                assert_abs_diff_eq!(j[(i, k)], expect[i][k], epsilon = 1e-5);
            }
        }

        let constant = FnMap::new(2, |_: &[f64]| vec![1.5, -7.0]);
        let j = finite_difference_jacobian(&constant, &[0.3, 100.0], f64::EPSILON.sqrt());
        assert!(j.to_rows().iter().flatten().all(|v| v.abs() <= 1e-9));
    }

    #[test]
    fn central_scheme_is_exact_for_quadratics() {
        let quad = FnMap::new(2, |x: &[f64]| vec![x[0] * x[0] * 3.0e3, x[0] * x[1]]);
        let j = jacobian_with(&quad, &[2.0e3, -3.0e3], None, 6e-6, FdScheme::Central);
        assert_abs_diff_eq!(j[(0, 0)], 1.2e7, epsilon = 1e-3);
        assert_abs_diff_eq!(j[(1, 0)], -3.0e3, epsilon = 1e-6);
        assert_abs_diff_eq!(j[(1, 1)], 2.0e3, epsilon = 1e-6);
    }

    #[test]
    fn invalid_config_and_dimensions() {
        let map = FnMap::new(1, |x: &[f64]| vec![x[0]]);
        let bad = NewtonConfig {
            residual_tolerance: 0.0,
            ..NewtonConfig::default()
        };
        assert!(solve_newton(&map, &[1.0], &bad).is_err());
        assert!(matches!(
            solve_newton(&map, &[1.0, 2.0], &NewtonConfig::default()),
            Err(RbfError::DimensionMismatch { .. })
        ));
    }
}
