use approx::assert_abs_diff_eq;
use rbfbvp::*;

fn problem(lam: &str) -> ConeProblem64 {
    ConeProblem::with_lambda(lam.parse().unwrap())
}

#[test]
fn unit_flux_exponent_slope() {
    let r = shoot(&problem("1"), &ShootingConfig::default()).unwrap();
    assert_abs_diff_eq!(r.f_prime_at_0, 0.82760, epsilon = 1e-4);
    assert!(r.residual.abs() <= 1e-9, "{}", r.residual);
}

#[test]
fn profile_values_along_trajectory() {
    let r = shoot(&problem("3/4"), &ShootingConfig::default()).unwrap();
    assert_abs_diff_eq!(r.trajectory.at(1.5).unwrap().f1, 0.091196, epsilon = 1e-4);
    let q = shoot(&problem("1/4"), &ShootingConfig::default()).unwrap();
    assert_abs_diff_eq!(q.trajectory.at(0.2).unwrap().f1, 0.721351, epsilon = 1e-4);
}

#[test]
fn tolerance_refinement_is_stable() {
    for lam in ["0", "1"] {
        let p = problem(lam);
        let base = ShootingConfig::default();
        let fine = ShootingConfig {
            integration_tolerance: base.integration_tolerance / 2.0,
            ..base
        };
        let a = shoot(&p, &base).unwrap().f_prime_at_0;
        let b = shoot(&p, &fine).unwrap().f_prime_at_0;
        assert!((a - b).abs() < 1e-8, "lambda {lam}: {a} vs {b}");
    }
}

#[test]
fn truncation_radius_is_converged() {
    let p = problem("0");
    let a = shoot(&p, &ShootingConfig::default()).unwrap().f_prime_at_0;
    let far = ShootingConfig {
        eta_max: 20.0,
        ..ShootingConfig::default()
    };
    let b = shoot(&p, &far).unwrap().f_prime_at_0;
    assert!((a - b).abs() < 1e-7, "{a} vs {b}");
}

#[test]
fn dense_output_satisfies_the_ode() {
    for lam in ["0", "1/3", "1"] {
        let p = problem(lam);
        let r = shoot(&p, &ShootingConfig::default()).unwrap();
        for i in 0..=1000 {
            let eta = i as f64 / 100.0;
            let s = r.trajectory.at(eta).unwrap();
            let res = p.ode_residual(s.f, s.f1, s.f2, s.f3);
            assert!(res.abs() <= 1e-6, "lambda {lam} eta {eta}: {res:e}");
        }
    }
}

#[test]
fn shooting_map_is_monotone_on_bracket() {
    // the far-field slope grows with the initial slope for completed trajectories
    let p = problem("1/2");
    let cfg = ShootingConfig::default();
    let mut last = f64::NEG_INFINITY;
    for s in [0.87, 0.875, 0.8798, 0.885, 0.9, 1.0] {
        if let Ok(t) = integrate_ivp(&p, s, &cfg) {
            let g = if t.min_f_prime() < 0.0 {
                t.min_f_prime()
            } else {
                t.final_state()[1]
            };
            assert!(g > last, "s = {s}");
            last = g;
        }
    }
}

#[test]
fn trajectory_outside_range_is_none() {
    let t = integrate_ivp(&problem("0"), 0.9476, &ShootingConfig::default()).unwrap();
    assert!(t.at(-0.1).is_none());
    assert!(t.at(15.5).is_none());
    assert!(t.steps() > 10);
}

#[test]
fn single_precision_shooting() {
    let p = ConeProblem::<f32>::with_lambda("0".parse().unwrap());
    let cfg = ShootingConfig::<f32> {
        integration_tolerance: 1e-6,
        root_tolerance: 1e-5,
        eta_max: 10.0,
        ..ShootingConfig::default()
    };
    let r = shoot(&p, &cfg).unwrap();
    assert!((r.f_prime_at_0 - 0.9476).abs() < 2e-3, "{}", r.f_prime_at_0);
}
