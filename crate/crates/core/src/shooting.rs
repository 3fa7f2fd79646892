//! Reference solution by shooting on `f'(0)` with an adaptive Dormand–Prince
//! 5(4) integrator and Hairer's continuous extension.
//!
//! The system is `y = (f, f', f'')`, `y' = (f', f'', -a f f'' + b f'^2)`.

use serde::Serialize;

use crate::cone::ConeProblem;
use crate::error::{RbfError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig<T> {
    pub eta_max: T,
    /// Absolute and relative local error tolerance.
    pub integration_tolerance: T,
    /// Target for `|f'(η_max)|`.
    pub root_tolerance: T,
    pub bracket: (T, T),
    pub max_steps: usize,
}

impl<T: Real> Default for ShootingConfig<T> {
    fn default() -> Self {
        Self {
            eta_max: T::lit(15.0),
            integration_tolerance: T::lit(1e-10),
            root_tolerance: T::lit(1e-10),
            bracket: (T::lit(0.5), T::lit(1.5)),
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> ShootingConfig<T> {
    pub fn validate(&self, problem: &ConeProblem<T>) -> Result<()> {
        if !(self.eta_max > problem.eta_infinity() && self.eta_max.is_finite()) {
            return Err(RbfError::InvalidInput(format!(
                "eta_max {} must exceed eta_infinity {}",
                self.eta_max,
                problem.eta_infinity()
            )));
        }
        if !(self.integration_tolerance > T::zero() && self.root_tolerance > T::zero()) {
            return Err(RbfError::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.bracket.0 < self.bracket.1) {
            return Err(RbfError::InvalidInput(format!(
                "bracket [{}, {}] is not ordered",
                self.bracket.0, self.bracket.1
            )));
        }
        if self.max_steps == 0 {
            return Err(RbfError::InvalidInput("max_steps must be positive".into()));
        }
        Ok(())
    }
}

type State<T> = [T; 3];

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Segment<T> {
    start: T,
    h: T,
    r: [State<T>; 5],
}

impl<T: Real> Segment<T> {
    fn eval(&self, eta: T) -> (State<T>, State<T>) {
        let th = (eta - self.start) / self.h;
        let one = T::one();
        let two = T::lit(2.0);
        let u = one - th;
        let r = &self.r;
        let y = std::array::from_fn(|i| {
            r[0][i] + th * (r[1][i] + u * (r[2][i] + th * (r[3][i] + u * r[4][i])))
        });
        let dy = std::array::from_fn(|i| {
            (r[1][i]
                + (one - two * th) * r[2][i]
                + th * (two - T::lit(3.0) * th) * r[3][i]
                + two * th * u * (one - two * th) * r[4][i])
                / self.h
        });
        (y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint<T> {
    pub eta: T,
    pub f: T,
    pub f1: T,
    pub f2: T,
    /// `f'''` from differentiating the continuous extension, not from the ODE.
    pub f3: T,
}

/// Dense-output solution on `[0, end]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    initial: State<T>,
    segments: Vec<Segment<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn initial_state(&self) -> [T; 3] {
        self.initial
    }

    pub fn end(&self) -> T {
        self.segments
            .last()
            .map_or(T::zero(), |s| s.start + s.h)
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    pub fn final_state(&self) -> [T; 3] {
        self.segments.last().map_or(self.initial, |s| {
            std::array::from_fn(|i| s.r[0][i] + s.r[1][i])
        })
    }

    /// Interpolated `(f, f', f'', f''')`; `None` outside `[0, end]`.
    pub fn at(&self, eta: T) -> Option<TrajectoryPoint<T>> {
        if !(eta >= T::zero() && eta <= self.end()) || self.segments.is_empty() {
            return None;
        }
        let idx = self
            .segments
            .partition_point(|s| s.start + s.h < eta)
            .min(self.segments.len() - 1);
        let (y, dy) = self.segments[idx].eval(eta);
        Some(TrajectoryPoint {
            eta,
            f: y[0],
            f1: y[1],
            f2: y[2],
            f3: dy[2],
        })
    }

    /// Smallest `f'` over the accepted step endpoints.
    pub fn min_f_prime(&self) -> T {
        self.segments
            .iter()
            .map(|s| s.r[0][1] + s.r[1][1])
            .fold(self.initial[1], T::min)
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are unused
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// State magnitude treated as finite-time blow-up.
const BLOW_UP: f64 = 1e8;

enum Outcome<T> {
    Completed(Trajectory<T>),
    Diverged {
        eta: T,
        f_prime: T,
    },
}

fn rhs<T: Real>(a: T, b: T, y: &State<T>) -> State<T> {
    [y[1], y[2], -a * y[0] * y[2] + b * y[1] * y[1]]
}

fn integrate<T: Real>(
    problem: &ConeProblem<T>,
    f_prime_at_0: T,
    end: T,
    config: &ShootingConfig<T>,
) -> Outcome<T> {
    let (a, b) = problem.coefficients();
    let tol = config.integration_tolerance;
    let lit = T::lit;
    let mut y: State<T> = [T::zero(), f_prime_at_0, -T::one()];
    let mut trajectory = Trajectory {
        initial: y,
        segments: Vec::new(),
    };
    let mut eta = T::zero();
    let mut h = lit(1e-3).min(end);
    let mut k1 = rhs(a, b, &y);
    let mut err_prev = lit(1e-4);
    let mut rejected = false;
    let beta = lit(0.04);
    let alpha = lit(0.2) - beta * lit(0.75);

    let diverged = |eta: T, y: &State<T>| Outcome::Diverged { eta, f_prime: y[1] };

    for _ in 0..config.max_steps {
        if eta >= end {
            return Outcome::Completed(trajectory);
        }
        if eta + h > end {
            h = end - eta;
        }
        if h <= T::epsilon() * lit(16.0) * T::one().max(eta.abs()) {
            return diverged(eta, &y);
        }
        let mut k: [State<T>; 7] = [k1; 7];
        for s in 1..7 {
            let ys: State<T> = std::array::from_fn(|i| {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + h * lit(A[s][j]) * kj[i];
                }
                acc
            });
            k[s] = rhs(a, b, &ys);
        }
        let y_new: State<T> = std::array::from_fn(|i| {
            let mut acc = y[i];
            for (j, kj) in k.iter().enumerate().take(6) {
                acc = acc + h * lit(A[6][j]) * kj[i];
            }
            acc
        });
        let mut err = T::zero();
        for i in 0..3 {
            let mut e = T::zero();
            for (j, kj) in k.iter().enumerate() {
                e = e + h * lit(E[j]) * kj[i];
            }
            let scale = tol + tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h = h * lit(0.2);
            rejected = true;
            continue;
        }
        if err <= T::one() {
            let ydiff: State<T> = std::array::from_fn(|i| y_new[i] - y[i]);
            let r3: State<T> = std::array::from_fn(|i| h * k[0][i] - ydiff[i]);
            let r4: State<T> = std::array::from_fn(|i| ydiff[i] - h * k[6][i] - r3[i]);
            let r5: State<T> = std::array::from_fn(|i| {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    acc = acc + lit(D[j]) * kj[i];
                }
                h * acc
            });
            trajectory.segments.push(Segment {
                start: eta,
                h,
                r: [y, ydiff, r3, r4, r5],
            });
            eta = if eta + h >= end { end } else { eta + h };
            y = y_new;
            k1 = k[6];
            if y.iter().any(|v| v.abs() > lit(BLOW_UP)) {
                return diverged(eta, &y);
            }
            let e = err.max(lit(1e-10));
            let mut fac = lit(0.9) * e.powf(-alpha) * err_prev.powf(beta);
            fac = fac.max(lit(0.2)).min(lit(10.0));
            if rejected {
                fac = fac.min(T::one());
            }
            h = h * fac;
            err_prev = e;
            rejected = false;
        } else {
            let fac = (lit(0.9) * err.powf(-lit(0.2))).max(lit(0.2));
            h = h * fac;
            rejected = true;
        }
    }
    diverged(eta, &y)
}

fn direction<T: Real>(f_prime: T) -> String {
    if f_prime < T::zero() {
        "f' -> -inf".into()
    } else {
        "f' -> +inf".into()
    }
}

/// Integrates the initial-value problem `(f, f', f'')(0) = (0, s, -1)` to `eta_max`.
pub fn integrate_ivp<T: Real>(
    problem: &ConeProblem<T>,
    f_prime_at_0: T,
    config: &ShootingConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate(problem)?;
    match integrate(problem, f_prime_at_0, config.eta_max, config) {
        Outcome::Completed(t) => Ok(t),
        Outcome::Diverged { eta, f_prime, .. } => Err(RbfError::Divergence {
            eta: eta.as_f64(),
            direction: direction(f_prime),
        }),
    }
}

/// Shooting residual: the most negative `f'` if the slope undershoots zero
/// (`-∞` on blow-up), otherwise `f'(η_max)`. Monotone increasing in `s`.
fn shooting_residual<T: Real>(
    problem: &ConeProblem<T>,
    s: T,
    config: &ShootingConfig<T>,
) -> (T, Option<Trajectory<T>>) {
    match integrate(problem, s, config.eta_max, config) {
        Outcome::Completed(t) => {
            let min = t.min_f_prime();
            let g = if min < T::zero() { min } else { t.final_state()[1] };
            (g, Some(t))
        }
        Outcome::Diverged { f_prime, .. } if f_prime < T::zero() => (T::neg_infinity(), None),
        Outcome::Diverged { .. } => (T::infinity(), None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootResult<T> {
    pub f_prime_at_0: T,
    /// Final shooting residual.
    pub residual: T,
    pub evaluations: usize,
    pub trajectory: Trajectory<T>,
}

/// Width at which bisection hands over to the secant polish.
pub const BISECTION_WIDTH: f64 = 1e-4;

/// Finds `f'(0)` such that `f'(η_max) = 0` by bisection then secant steps
/// safeguarded by the bracket.
pub fn shoot<T: Real>(problem: &ConeProblem<T>, config: &ShootingConfig<T>) -> Result<ShootResult<T>> {
    config.validate(problem)?;
    let (mut lo, mut hi) = config.bracket;
    let (mut g_lo, _) = shooting_residual(problem, lo, config);
    let (mut g_hi, _) = shooting_residual(problem, hi, config);
    let mut evaluations = 2;
    if !(g_lo < T::zero() && g_hi > T::zero()) {
        return Err(RbfError::Bracketing {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            g_lo: g_lo.as_f64(),
            g_hi: g_hi.as_f64(),
        });
    }
    let half = T::lit(0.5);
    while hi - lo > T::lit(BISECTION_WIDTH) {
        let mid = half * (lo + hi);
        let (g, _) = shooting_residual(problem, mid, config);
        evaluations += 1;
        if g < T::zero() {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    let mut best: Option<(T, T, Trajectory<T>)> = None;
    for _ in 0..200 {
        let secant = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        let s = if g_lo.is_finite() && g_hi.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            half * (lo + hi)
        };
        let (g, traj) = shooting_residual(problem, s, config);
        evaluations += 1;
        if let Some(t) = traj {
            if best.as_ref().is_none_or(|b| g.abs() < b.1.abs()) {
                best = Some((s, g, t));
            }
        }
        if g.abs() <= config.root_tolerance {
            break;
        }
        if g < T::zero() {
            lo = s;
            g_lo = g;
        } else {
            hi = s;
            g_hi = g;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) * hi.abs() {
            break;
        }
    }
    let (s, g, trajectory) = best.ok_or(RbfError::Divergence {
        eta: config.eta_max.as_f64(),
        direction: "no completed trajectory near the root".into(),
    })?;
    Ok(ShootResult {
        f_prime_at_0: s,
        residual: g,
        evaluations,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn problem(lam: &str) -> ConeProblem<f64> {
        ConeProblem::with_lambda(lam.parse().unwrap())
    }

    #[test]
    fn trajectory_starts_at_initial_state() {
        let t = integrate_ivp(&problem("1/2"), 0.9, &ShootingConfig::default()).unwrap();
        assert_eq!(t.initial_state(), [0.0, 0.9, -1.0]);
        let p = t.at(0.0).unwrap();
        assert_eq!((p.f, p.f1, p.f2), (0.0, 0.9, -1.0));
        assert_eq!(t.end(), 15.0);
    }

    #[test]
    fn dense_output_satisfies_ode() {
        let cfg = ShootingConfig::default();
        let t = integrate_ivp(&problem("0"), 0.9476, &cfg).unwrap();
        let p = problem("0");
        for i in 0..=100 {
            let eta = 0.1 * i as f64;
            let s = t.at(eta).unwrap();
            assert!(p.ode_residual(s.f, s.f1, s.f2, s.f3).abs() <= 1e-6, "eta {eta}");
        }
    }

    #[test]
    fn root_is_near_table_value() {
        let cfg = ShootingConfig::default();
        let t = integrate_ivp(&problem("0"), 0.94760, &cfg).unwrap();
        assert!(t.final_state()[1].abs() < 1e-3);
        let r = shoot(&problem("0"), &cfg).unwrap();
        assert_abs_diff_eq!(r.f_prime_at_0, 0.94760, epsilon = 1e-4);
    }

    #[test]
    fn steep_initial_slope_does_not_decay() {
        let cfg = ShootingConfig::default();
        match integrate_ivp(&problem("0"), 2.0, &cfg) {
            Ok(t) => assert!(t.final_state()[1] > 0.05),
            Err(e) => assert!(matches!(e, RbfError::Divergence { .. })),
        }
    }

    #[test]
    fn shallow_initial_slope_diverges_downward() {
        let cfg = ShootingConfig::default();
        match integrate_ivp(&problem("0"), 0.5, &cfg) {
            Err(RbfError::Divergence { direction, .. }) => assert!(direction.contains("-inf")),
            Ok(t) => assert!(t.min_f_prime() < 0.0),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn bad_bracket_is_reported() {
        let cfg = ShootingConfig {
            bracket: (1.2, 1.5),
            ..ShootingConfig::default()
        };
        assert!(matches!(
            shoot(&problem("0"), &cfg),
            Err(RbfError::Bracketing { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let p = problem("0");
        let short = ShootingConfig {
            eta_max: 4.0,
            ..ShootingConfig::default()
        };
        assert!(short.validate(&p).is_err());
        let flipped = ShootingConfig {
            bracket: (1.5, 0.5),
            ..ShootingConfig::default()
        };
        assert!(flipped.validate(&p).is_err());
    }
}
