//! Integrated collocation: `f''' ≈ Σ λ_i φ(η - x_i)`, integrated three times.
//!
//! Unknowns are ordered `[λ_1..λ_N, d1, d2, d3]`. Rows are the ODE residual at
//! every center, then `ŝ(0) = 0`, `ŝ''(0) = -1` and `ŝ'(η∞) = 0`.

use crate::cone::ConeProblem;
use crate::error::{RbfError, Result};
use crate::expansion::IndirectExpansion;
use crate::interpolation::CenterSet;
use crate::kernels::KernelSpec;
use crate::linalg::Matrix;
use crate::newton::ResidualMap;
use crate::report::{self, Method, SolveReport, SolvedExpansion, SolverConfig};
use crate::scalar::Real;

pub const MIN_CENTERS: usize = 3;

/// Residual map over `[λ, d1, d2, d3]` with the antiderivative chain tabulated once.
#[derive(Debug, Clone)]
pub struct IrbfSystem<T> {
    problem: ConeProblem<T>,
    kernel: KernelSpec<T>,
    centers: CenterSet<T>,
    // basis[0..3] = h0, h1, h2 and basis[3] = φ, each at (node j, center i)
    basis: [Matrix<T>; 4],
    h0_at_zero: Vec<T>,
    h2_at_zero: Vec<T>,
    h1_at_far: Vec<T>,
}

fn tabulate<T: Real>(
    kernel: &KernelSpec<T>,
    stage: Option<usize>,
    etas: &[T],
    centers: &[T],
) -> Result<Matrix<T>> {
    let mut m = Matrix::zeros(etas.len(), centers.len());
    for (j, &eta) in etas.iter().enumerate() {
        for (i, &x) in centers.iter().enumerate() {
            m[(j, i)] = match stage {
                Some(s) => kernel.eval_antiderivative(s, eta - x)?,
                None => kernel.eval(eta - x),
            };
        }
    }
    Ok(m)
}

/// Tabulates the IRBF residual map. Needs `N ≥ 3`.
pub fn irbf_assemble_residual<T: Real>(
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    centers: &CenterSet<T>,
) -> Result<IrbfSystem<T>> {
    let n = centers.len();
    if n < MIN_CENTERS {
        return Err(RbfError::InvalidInput(format!(
            "integrated collocation needs at least {MIN_CENTERS} centers, got {n}"
        )));
    }
    let x = centers.points();
    let basis = [
        tabulate(kernel, Some(0), x, x)?,
        tabulate(kernel, Some(1), x, x)?,
        tabulate(kernel, Some(2), x, x)?,
        tabulate(kernel, None, x, x)?,
    ];
    let zero = [T::zero()];
    Ok(IrbfSystem {
        problem: *problem,
        kernel: *kernel,
        centers: centers.clone(),
        basis,
        h0_at_zero: tabulate(kernel, Some(0), &zero, x)?.row(0).to_vec(),
        h2_at_zero: tabulate(kernel, Some(2), &zero, x)?.row(0).to_vec(),
        h1_at_far: tabulate(kernel, Some(1), &[problem.eta_infinity()], x)?
            .row(0)
            .to_vec(),
    })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| acc + p * q)
}

impl<T: Real> IrbfSystem<T> {
    pub fn centers(&self) -> &CenterSet<T> {
        &self.centers
    }

    pub fn row_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = (0..self.centers.len()).map(|j| format!("res@{j}")).collect();
        labels.push("s(0)".into());
        labels.push("s''(0)+1".into());
        labels.push("s'(eta_inf)".into());
        labels
    }

    pub fn expansion(&self, unknowns: &[T]) -> Result<IndirectExpansion<T>> {
        IndirectExpansion::from_unknowns(self.kernel, self.centers.clone(), unknowns)
    }
}

impl<T: Real> ResidualMap<T> for IrbfSystem<T> {
    fn dim(&self) -> usize {
        self.centers.len() + 3
    }

    fn eval(&self, u: &[T]) -> Vec<T> {
        let n = self.centers.len();
        let (w, d) = u.split_at(n);
        let (d1, d2, d3) = (d[0], d[1], d[2]);
        let half = T::lit(0.5);
        let mut out = Vec::with_capacity(n + 3);
        for (j, &eta) in self.centers.points().iter().enumerate() {
            let f = dot(self.basis[0].row(j), w) + d1 * half * eta * eta + d2 * eta + d3;
            let f1 = dot(self.basis[1].row(j), w) + d1 * eta + d2;
            let f2 = dot(self.basis[2].row(j), w) + d1;
            let f3 = dot(self.basis[3].row(j), w);
            out.push(self.problem.ode_residual(f, f1, f2, f3));
        }
        out.push(dot(&self.h0_at_zero, w) + d3);
        out.push(dot(&self.h2_at_zero, w) + d1 + T::one());
        out.push(dot(&self.h1_at_far, w) + d1 * self.problem.eta_infinity() + d2);
        out
    }
}

/// Solves the cone problem by integrated collocation on `n` uniform centers.
pub fn irbf_solve<T: Real>(
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    n: usize,
    config: &SolverConfig<T>,
) -> Result<SolveReport<T>> {
    if n < MIN_CENTERS {
        return Err(RbfError::InvalidInput(format!(
            "integrated collocation needs at least {MIN_CENTERS} centers, got {n}"
        )));
    }
    let centers = CenterSet::uniform(n, problem.eta_infinity(), config.layout)?;
    let system = irbf_assemble_residual(problem, kernel, &centers)?;
    let newton = report::run_newton(&system, n + 3, config)?;
    let expansion = system.expansion(&newton.solution)?;
    report::finish(
        Method::Irbf,
        problem,
        &system,
        SolvedExpansion::Indirect(expansion),
        newton,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::Expansion;
    use crate::interpolation::NodeLayout;
    use approx::assert_abs_diff_eq;

    fn problem(lam: &str) -> ConeProblem<f64> {
        ConeProblem::with_lambda(lam.parse().unwrap())
    }

    #[test]
    fn zero_unknowns_give_bc_offsets() {
        let c = CenterSet::uniform(10, 4.5, NodeLayout::HalfOpen).unwrap();
        let sys = irbf_assemble_residual(&problem("0"), &KernelSpec::mq(1.86).unwrap(), &c)
            .unwrap();
        let r = sys.eval(&[0.0; 13]);
        assert!(r[..10].iter().all(|&v| v == 0.0));
        assert_eq!(&r[10..], &[0.0, 1.0, 0.0]);
        let mut u = [0.0; 13];
        u[10] = -1.0;
        assert_eq!(sys.eval(&u)[11], 0.0);
        assert_eq!(sys.row_labels().len(), 13);
    }

    #[test]
    fn too_few_centers() {
        let c = CenterSet::uniform(2, 4.5, NodeLayout::HalfOpen).unwrap();
        assert!(irbf_assemble_residual(&problem("0"), &KernelSpec::mq(1.0).unwrap(), &c).is_err());
    }

    #[test]
    fn converges_for_lambda_zero() {
        let cfg = SolverConfig::default();
        let rep = irbf_solve(&problem("0"), &KernelSpec::mq(1.860).unwrap(), 10, &cfg).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert!(rep.collocation_residual_inf_norm <= 1e-10);
        assert_abs_diff_eq!(rep.f_prime_at_0, 0.94758, epsilon = 2e-4);
        let s0 = rep.expansion.state(0.0).unwrap();
        assert!(s0[0].abs() <= 1e-10);
        assert!((s0[2] + 1.0).abs() <= 1e-10);
        assert!(rep.expansion.state(4.5).unwrap()[1].abs() <= 1e-10);
    }

    #[test]
    fn gaussian_kernel_uses_quadrature_chain() {
        let cfg = SolverConfig::default();
        let rep = irbf_solve(&problem("1/2"), &KernelSpec::ga(0.3).unwrap(), 6, &cfg).unwrap();
        assert!(rep.f_prime_at_0.is_finite());
    }
}
