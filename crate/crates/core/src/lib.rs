//! Meshless radial-basis-function collocation for nonlinear boundary-value
//! ODEs, applied to free convection about a cone in a porous medium.
//!
//! Two discretizations are provided: direct collocation ([`drbf`]), which
//! differentiates an RBF expansion of `f`, and integrated collocation
//! ([`irbf`]), which integrates an RBF expansion of `f'''` three times. The
//! [`shooting`] module supplies an independent Runge–Kutta reference.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.
//!
//! ```
//! use rbfbvp::{irbf_solve, ConeProblem64, KernelSpec, SolverConfig};
//!
//! let problem = ConeProblem64::with_lambda("1/3".parse().unwrap());
//! let kernel = KernelSpec::mq(2.05).unwrap();
//! let report = irbf_solve(&problem, &kernel, 10, &SolverConfig::default()).unwrap();
//! assert!(report.converged);
//! assert!((report.f_prime_at_0 - 0.9003).abs() < 5e-4);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cone;
pub mod drbf;
pub mod error;
pub mod expansion;
pub mod interpolation;
pub mod irbf;
pub mod kernels;
pub mod linalg;
pub mod newton;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod shooting;

pub use cone::{nusselt_ratio, ConeProblem, FluxExponent, PhysicalParams, DEFAULT_ETA_INFINITY};
pub use drbf::{drbf_assemble_residual, drbf_solve, DrbfSystem};
pub use error::{RbfError, Result};
pub use expansion::{DirectExpansion, Expansion, IndirectExpansion};
pub use interpolation::{
    build_interpolation_matrix, solve_dense, CenterSet, DenseSystem, Interpolant, NodeLayout,
};
pub use irbf::{irbf_assemble_residual, irbf_solve, IrbfSystem};
pub use kernels::{KernelFamily, KernelSpec};
pub use linalg::{condition_number, Matrix};
pub use newton::{
    finite_difference_jacobian, solve_newton, FdScheme, FnMap, NewtonConfig, NewtonReport,
    ResidualMap, Termination,
};
pub use report::{
    residual_norm_squared, sample_profile, scan_shape_parameter, solve, Method, ProfileSample,
    ScanEntry, ShapeScan, SolveReport, SolvedExpansion, SolverConfig,
};
pub use scalar::Real;
pub use shooting::{integrate_ivp, shoot, ShootResult, ShootingConfig, Trajectory, TrajectoryPoint};

pub type ConeProblem64 = ConeProblem<f64>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type ShootingConfig64 = ShootingConfig<f64>;
pub type Matrix64 = Matrix<f64>;
