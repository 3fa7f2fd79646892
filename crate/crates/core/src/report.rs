//! Solver diagnostics shared by both collocation methods: the solve report,
//! the integrated residual norm, profile sampling and shape-parameter scans.

use serde::Serialize;

use crate::cone::ConeProblem;
use crate::drbf::drbf_solve;
use crate::error::{RbfError, Result};
use crate::expansion::{DirectExpansion, Expansion, IndirectExpansion};
use crate::interpolation::{build_interpolation_matrix, CenterSet, NodeLayout};
use crate::irbf::irbf_solve;
use crate::kernels::KernelSpec;
use crate::linalg::condition_number;
use crate::newton::{jacobian_with, solve_newton, NewtonConfig, NewtonReport, ResidualMap, Termination};
use crate::scalar::{inf_norm, Real};

/// Jacobian or interpolation-matrix condition numbers above this are flagged.
pub const ILL_CONDITIONED_THRESHOLD: f64 = 1e14;
pub const DEFAULT_GRID_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Drbf,
    Irbf,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Drbf => "DRBF",
            Self::Irbf => "IRBF",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    pub newton: NewtonConfig<T>,
    pub layout: NodeLayout,
    /// Points of the trapezoid grid behind `res_norm_sq`.
    pub grid_points: usize,
    /// Starting unknowns; all zeros when absent.
    pub initial_guess: Option<Vec<T>>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            layout: NodeLayout::default(),
            grid_points: DEFAULT_GRID_POINTS,
            initial_guess: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolvedExpansion<T> {
    Direct(DirectExpansion<T>),
    Indirect(IndirectExpansion<T>),
}

impl<T: Real> SolvedExpansion<T> {
    pub fn kernel(&self) -> &KernelSpec<T> {
        match self {
            Self::Direct(e) => e.kernel(),
            Self::Indirect(e) => e.kernel(),
        }
    }

    pub fn centers(&self) -> &CenterSet<T> {
        match self {
            Self::Direct(e) => e.centers(),
            Self::Indirect(e) => e.centers(),
        }
    }

    pub fn weights(&self) -> &[T] {
        match self {
            Self::Direct(e) => e.weights(),
            Self::Indirect(e) => e.weights(),
        }
    }

    /// Integration constants `d1, d2, d3` of the integrated form.
    pub fn constants(&self) -> Option<[T; 3]> {
        match self {
            Self::Direct(_) => None,
            Self::Indirect(e) => Some(e.constants()),
        }
    }
}

impl<T: Real> Expansion<T> for SolvedExpansion<T> {
    fn state(&self, eta: T) -> Result<[T; 4]> {
        match self {
            Self::Direct(e) => e.state(eta),
            Self::Indirect(e) => e.state(eta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport<T> {
    pub method: Method,
    pub problem: ConeProblem<T>,
    pub kernel: KernelSpec<T>,
    pub n: usize,
    pub layout: NodeLayout,
    pub f_prime_at_0: T,
    pub newton_iterations: usize,
    pub termination: Termination,
    pub converged: bool,
    pub collocation_residual_inf_norm: T,
    pub residual_history: Vec<T>,
    pub res_norm_sq: T,
    pub interp_matrix_condition: T,
    pub jacobian_condition: T,
    pub ill_conditioned: bool,
    pub warnings: Vec<String>,
    pub expansion: SolvedExpansion<T>,
}

pub(crate) fn run_newton<T: Real, M: ResidualMap<T>>(
    map: &M,
    dim: usize,
    config: &SolverConfig<T>,
) -> Result<NewtonReport<T>> {
    let guess = match &config.initial_guess {
        Some(g) if g.len() != dim => {
            return Err(RbfError::DimensionMismatch {
                expected: dim,
                actual: g.len(),
            })
        }
        Some(g) => g.clone(),
        None => vec![T::zero(); dim],
    };
    solve_newton(map, &guess, &config.newton)
}

pub(crate) fn finish<T: Real, M: ResidualMap<T>>(
    method: Method,
    problem: &ConeProblem<T>,
    map: &M,
    expansion: SolvedExpansion<T>,
    newton: NewtonReport<T>,
    config: &SolverConfig<T>,
) -> Result<SolveReport<T>> {
    let kernel = *expansion.kernel();
    let interp_matrix_condition =
        condition_number(&build_interpolation_matrix(&kernel, expansion.centers()))?;
    let jac = jacobian_with(
        map,
        &newton.solution,
        None,
        config.newton.fd_step_scale,
        config.newton.fd_scheme,
    );
    let jacobian_condition = condition_number(&jac)?;
    let limit = T::lit(ILL_CONDITIONED_THRESHOLD);
    let mut warnings = Vec::new();
    if !(jacobian_condition <= limit) {
        warnings.push(format!(
            "Jacobian condition number {jacobian_condition:e} exceeds {ILL_CONDITIONED_THRESHOLD:e}"
        ));
    }
    if !(interp_matrix_condition <= limit) {
        warnings.push(format!(
            "interpolation matrix condition number {interp_matrix_condition:e} exceeds {ILL_CONDITIONED_THRESHOLD:e}"
        ));
    }
    let ill_conditioned = !warnings.is_empty();
    if !newton.converged {
        warnings.push(format!(
            "Newton stopped ({:?}) with residual {:e} after {} iterations",
            newton.termination, newton.final_residual_norm, newton.iterations
        ));
    }
    let f_prime_at_0 = expansion.f_prime_at_0()?;
    let res_norm_sq = residual_norm_squared(&expansion, problem, config.grid_points)?;
    Ok(SolveReport {
        method,
        problem: *problem,
        kernel,
        n: expansion.centers().len(),
        layout: config.layout,
        f_prime_at_0,
        newton_iterations: newton.iterations,
        termination: newton.termination,
        converged: newton.converged,
        collocation_residual_inf_norm: inf_norm(&map.eval(&newton.solution)),
        residual_history: newton.residual_history,
        res_norm_sq,
        interp_matrix_condition,
        jacobian_condition,
        ill_conditioned,
        warnings,
        expansion,
    })
}

/// Runs either collocation method.
pub fn solve<T: Real>(
    method: Method,
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    n: usize,
    config: &SolverConfig<T>,
) -> Result<SolveReport<T>> {
    match method {
        Method::Drbf => drbf_solve(problem, kernel, n, config),
        Method::Irbf => irbf_solve(problem, kernel, n, config),
    }
}

/// Composite trapezoid approximation of `∫_0^{η∞} Res(η)² dη` on
/// `grid_points` equispaced points.
pub fn residual_norm_squared<T: Real, E: Expansion<T> + ?Sized>(
    expansion: &E,
    problem: &ConeProblem<T>,
    grid_points: usize,
) -> Result<T> {
    if grid_points < 2 {
        return Err(RbfError::InvalidInput(format!(
            "residual grid needs at least 2 points, got {grid_points}"
        )));
    }
    let h = problem.eta_infinity() / T::from_count(grid_points - 1);
    let mut acc = T::zero();
    for i in 0..grid_points {
        let eta = T::from_count(i) * h;
        let [f, f1, f2, f3] = expansion.state(eta)?;
        let r = problem.ode_residual(f, f1, f2, f3);
        let w = if i == 0 || i + 1 == grid_points {
            T::lit(0.5)
        } else {
            T::one()
        };
        acc = acc + w * r * r;
    }
    Ok(acc * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample<T> {
    pub eta: T,
    pub f: T,
    pub f1: T,
    pub f2: T,
}

/// Evaluates `f, f', f''` at each `η` in `[0, η∞]`.
pub fn sample_profile<T: Real, E: Expansion<T> + ?Sized>(
    expansion: &E,
    problem: &ConeProblem<T>,
    etas: &[T],
) -> Result<Vec<ProfileSample<T>>> {
    let end = problem.eta_infinity();
    let slack = end * T::epsilon() * T::lit(16.0);
    etas.iter()
        .map(|&eta| {
            if !(eta >= -slack && eta <= end + slack) {
                return Err(RbfError::Domain(format!(
                    "profile point {eta} outside [0, {end}]"
                )));
            }
            let [f, f1, f2, _] = expansion.state(eta)?;
            Ok(ProfileSample { eta, f, f1, f2 })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry<T> {
    pub c: T,
    pub converged: bool,
    pub ill_conditioned: bool,
    pub best: bool,
    /// Present unless the solve itself failed.
    pub report: Option<SolveReport<T>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeScan<T> {
    pub method: Method,
    pub entries: Vec<ScanEntry<T>>,
    /// Index of the converged entry with the smallest `res_norm_sq`.
    pub best: usize,
}

impl<T: Real> ShapeScan<T> {
    pub fn best_entry(&self) -> &ScanEntry<T> {
        &self.entries[self.best]
    }
}

/// Solves once per `c` on an equispaced grid over `[c_min, c_max]`.
///
/// Failed and non-converged entries are kept and flagged. The entry with the
/// smallest `res_norm_sq` among converged, well-conditioned solves is marked;
/// if every converged solve is ill-conditioned the smallest among those is used.
#[allow(clippy::too_many_arguments)]
pub fn scan_shape_parameter<T: Real>(
    method: Method,
    problem: &ConeProblem<T>,
    kernel: &KernelSpec<T>,
    n: usize,
    c_min: T,
    c_max: T,
    steps: usize,
    config: &SolverConfig<T>,
) -> Result<ShapeScan<T>> {
    if !(c_min > T::zero() && c_min < c_max && c_max.is_finite()) {
        return Err(RbfError::InvalidInput(format!(
            "shape scan needs 0 < c_min < c_max, got [{c_min}, {c_max}]"
        )));
    }
    if steps < 2 {
        return Err(RbfError::InvalidInput(format!("shape scan needs at least 2 steps, got {steps}")));
    }
    let dc = (c_max - c_min) / T::from_count(steps - 1);
    let mut entries = Vec::with_capacity(steps);
    for i in 0..steps {
        let c = if i + 1 == steps {
            c_max
        } else {
            c_min + T::from_count(i) * dc
        };
        let outcome = kernel
            .with_shape(c)
            .and_then(|k| solve(method, problem, &k, n, config));
        entries.push(match outcome {
            Ok(rep) => ScanEntry {
                c,
                converged: rep.converged,
                ill_conditioned: rep.ill_conditioned,
                best: false,
                report: Some(rep),
                error: None,
            },
            Err(e) => ScanEntry {
                c,
                converged: false,
                ill_conditioned: matches!(e, RbfError::SingularMatrix { .. }),
                best: false,
                report: None,
                error: Some(e.to_string()),
            },
        });
    }
    let score = |e: &ScanEntry<T>| e.report.as_ref().map(|r| r.res_norm_sq).filter(|v| v.is_finite());
    let pick = |well_conditioned: bool| {
        entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.converged && (!well_conditioned || !e.ill_conditioned))
            .filter_map(|(i, e)| score(e).map(|s| (i, s)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite scores"))
            .map(|(i, _)| i)
    };
    let best = pick(true)
        .or_else(|| pick(false))
        .ok_or(RbfError::ScanFailure { steps })?;
    entries[best].best = true;
    Ok(ShapeScan {
        method,
        entries,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Cubic;

    // f = -η²/2 solves f''' = 0 but not the full ODE
    impl Expansion<f64> for Cubic {
        fn state(&self, eta: f64) -> Result<[f64; 4]> {
            Ok([-0.5 * eta * eta, -eta, -1.0, 0.0])
        }
    }

    struct Zero;

    impl Expansion<f64> for Zero {
        fn state(&self, _: f64) -> Result<[f64; 4]> {
            Ok([0.0; 4])
        }
    }

    fn problem(lam: &str) -> ConeProblem<f64> {
        ConeProblem::with_lambda(lam.parse().unwrap())
    }

    #[test]
    fn zero_residual_has_zero_norm() {
        assert_eq!(residual_norm_squared(&Zero, &problem("0"), 1001).unwrap(), 0.0);
        assert!(residual_norm_squared(&Zero, &problem("0"), 1).is_err());
    }

    #[test]
    fn trapezoid_matches_closed_form() {
        // λ = 1: Res = 3 f f'' - f'^2 = 1.5 η² - η² = η²/2, ∫_0^4.5 η⁴/4 = 4.5⁵/20
        let exact = 4.5f64.powi(5) / 20.0;
        let approx = residual_norm_squared(&Cubic, &problem("1"), 20001).unwrap();
        assert_abs_diff_eq!(approx, exact, epsilon = 1e-5 * exact);
    }

    #[test]
    fn profile_rejects_points_outside_domain() {
        let p = problem("0");
        assert!(matches!(
            sample_profile(&Cubic, &p, &[5.0]),
            Err(RbfError::Domain(_))
        ));
        let s = sample_profile(&Cubic, &p, &[0.0, 4.5]).unwrap();
        assert_eq!(s[1].f1, -4.5);
    }

    #[test]
    fn two_step_scan_hits_both_ends() {
        let scan = scan_shape_parameter(
            Method::Irbf,
            &problem("0"),
            &KernelSpec::mq(1.0).unwrap(),
            8,
            1.5,
            2.5,
            2,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(scan.entries.len(), 2);
        assert_eq!(scan.entries[0].c, 1.5);
        assert_eq!(scan.entries[1].c, 2.5);
        assert_eq!(scan.entries.iter().filter(|e| e.best).count(), 1);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let k = KernelSpec::mq(1.0).unwrap();
        let cfg = SolverConfig::default();
        assert!(scan_shape_parameter(Method::Irbf, &problem("0"), &k, 8, 2.0, 1.0, 5, &cfg).is_err());
        assert!(scan_shape_parameter(Method::Irbf, &problem("0"), &k, 8, 1.0, 2.0, 1, &cfg).is_err());
    }
}
