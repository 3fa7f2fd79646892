//! Direct collocation: `f ≈ s(η) = Σ λ_i φ(η - x_i)` with analytic derivatives.
//!
//! The unknowns are the `N` weights. Rows are the ODE residual at interior
//! centers followed by `s(0) = 0` and `s''(0) = -1`. For kernels whose first
//! derivative decays the far-field condition is left implicit; otherwise the
//! last interior row is replaced by `s'(η∞) = 0`.

use crate::cone::ConeProblem;
use crate::error::{RbfError, Result};
use crate::expansion::DirectExpansion;
use crate::interpolation::CenterSet;
use crate::kernels::KernelSpec;
use crate::linalg::Matrix;
use crate::newton::ResidualMap;
use crate::report::{self, Method, SolveReport, SolvedExpansion, SolverConfig};
use crate::scalar::Real;

pub const MIN_CENTERS: usize = 4;

/// Residual map `Λ ↦ [Res(η_j); s(0); s''(0) + 1]` with the basis tabulated once.
#[derive(Debug, Clone)]
pub struct DrbfSystem<T> {
    problem: ConeProblem<T>,
    kernel: KernelSpec<T>,
    centers: CenterSet<T>,
    collocation: Vec<usize>,
    // g[k][(j, i)] = φ^(k)(η_j - x_i) at collocation node j
    g: [Matrix<T>; 4],
    at_zero: [Vec<T>; 2],
    far_field: Option<Vec<T>>,
}

fn tabulate<T: Real>(
    kernel: &KernelSpec<T>,
    k: usize,
    etas: &[T],
    centers: &[T],
) -> Result<Matrix<T>> {
    let mut m = Matrix::zeros(etas.len(), centers.len());
    for (j, &eta) in etas.iter().enumerate() {
        for (i, &x) in centers.iter().enumerate() {
            m[(j, i)] = kernel.eval_derivative(k, eta - x)?;
        }
    }
    Ok(m)
}

/// Tabulates the DRBF residual map. Needs `N ≥ 4` and a kernel with a third
/// derivative at every node offset.
pub fn drbf_assemble_residual<T: Real>(
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    centers: &CenterSet<T>,
) -> Result<DrbfSystem<T>> {
    let n = centers.len();
    if n < MIN_CENTERS {
        return Err(RbfError::InvalidInput(format!(
            "direct collocation needs at least {MIN_CENTERS} centers, got {n}"
        )));
    }
    let explicit_far = !kernel.family().derivative_decays();
    let last = if explicit_far { n - 2 } else { n - 1 };
    let collocation: Vec<usize> = (1..last).collect();
    let x = centers.points();
    let nodes: Vec<T> = collocation.iter().map(|&j| x[j]).collect();
    let g = [
        tabulate(kernel, 0, &nodes, x)?,
        tabulate(kernel, 1, &nodes, x)?,
        tabulate(kernel, 2, &nodes, x)?,
        tabulate(kernel, 3, &nodes, x)?,
    ];
    let zero = [T::zero()];
    let at_zero = [
        tabulate(kernel, 0, &zero, x)?.row(0).to_vec(),
        tabulate(kernel, 2, &zero, x)?.row(0).to_vec(),
    ];
    let far_field = if explicit_far {
        Some(tabulate(kernel, 1, &[problem.eta_infinity()], x)?.row(0).to_vec())
    } else {
        None
    };
    Ok(DrbfSystem {
        problem: *problem,
        kernel: *kernel,
        centers: centers.clone(),
        collocation,
        g,
        at_zero,
        far_field,
    })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| acc + p * q)
}

impl<T: Real> DrbfSystem<T> {
    /// Indices of the centers used as collocation nodes.
    pub fn collocation_indices(&self) -> &[usize] {
        &self.collocation
    }

    pub fn has_far_field_row(&self) -> bool {
        self.far_field.is_some()
    }

    pub fn centers(&self) -> &CenterSet<T> {
        &self.centers
    }

    pub fn row_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .collocation
            .iter()
            .map(|&j| format!("res@{j}"))
            .collect();
        if self.far_field.is_some() {
            labels.push("s'(eta_inf)".into());
        }
        labels.push("s(0)".into());
        labels.push("s''(0)+1".into());
        labels
    }

    pub fn expansion(&self, weights: &[T]) -> Result<DirectExpansion<T>> {
        DirectExpansion::new(self.kernel, self.centers.clone(), weights.to_vec())
    }
}

impl<T: Real> ResidualMap<T> for DrbfSystem<T> {
    fn dim(&self) -> usize {
        self.centers.len()
    }

    fn eval(&self, w: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.collocation.len() {
            let f = dot(self.g[0].row(j), w);
            let f1 = dot(self.g[1].row(j), w);
            let f2 = dot(self.g[2].row(j), w);
            let f3 = dot(self.g[3].row(j), w);
            out.push(self.problem.ode_residual(f, f1, f2, f3));
        }
        if let Some(far) = &self.far_field {
            out.push(dot(far, w));
        }
        out.push(dot(&self.at_zero[0], w));
        out.push(dot(&self.at_zero[1], w) + T::one());
        out
    }
}

/// Solves the cone problem by direct collocation on `n` uniform centers.
///
/// Newton non-convergence is reported through `converged = false` on the
/// returned report.
pub fn drbf_solve<T: Real>(
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    n: usize,
    config: &SolverConfig<T>,
) -> Result<SolveReport<T>> {
    if n < MIN_CENTERS {
        return Err(RbfError::InvalidInput(format!(
            "direct collocation needs at least {MIN_CENTERS} centers, got {n}"
        )));
    }
    let centers = CenterSet::uniform(n, problem.eta_infinity(), config.layout)?;
    let system = drbf_assemble_residual(problem, kernel, &centers)?;
    let newton = report::run_newton(&system, n, config)?;
    let expansion = system.expansion(&newton.solution)?;
    report::finish(
        Method::Drbf,
        problem,
        &system,
        SolvedExpansion::Direct(expansion),
        newton,
        config,
    )
}
