use approx::assert_abs_diff_eq;
use rbfbvp::*;

fn problem(lam: &str) -> ConeProblem64 {
    ConeProblem::with_lambda(lam.parse().unwrap())
}

fn irbf(lam: &str, n: usize, c: f64) -> SolveReport64 {
    irbf_solve(&problem(lam), &KernelSpec::mq(c).unwrap(), n, &SolverConfig::default()).unwrap()
}

fn rk(lam: &str) -> f64 {
    shoot(&problem(lam), &ShootingConfig::default()).unwrap().f_prime_at_0
}

#[test]
fn irbf_map_vanishes_at_converged_solution() {
    let p = problem("0");
    let k = KernelSpec::mq(1.860).unwrap();
    let centers = CenterSet::uniform(10, 4.5, NodeLayout::default()).unwrap();
    let system = irbf_assemble_residual(&p, &k, &centers).unwrap();
    let rep = irbf_solve(&p, &k, 10, &SolverConfig::default()).unwrap();
    let SolvedExpansion::Indirect(e) = &rep.expansion else {
        panic!("expected integrated expansion");
    };
    let mut unknowns = e.weights().to_vec();
    unknowns.extend(e.constants());
    let r = system.eval(&unknowns);
    assert!(r.iter().all(|v| v.abs() <= 1e-10), "{r:?}");
    assert!(rep.newton_iterations <= 20);
}

#[test]
fn irbf_slope_and_profile_points() {
    assert_abs_diff_eq!(irbf("1/3", 10, 2.050).f_prime_at_0, 0.90030, epsilon = 2e-4);
    let rep = irbf("1/4", 10, 2.005);
    let s = sample_profile(&rep.expansion, &rep.problem, &[0.5, 1.0, 4.5]).unwrap();
    assert_abs_diff_eq!(s[0].f1, 0.484753, epsilon = 1e-3);
    assert_abs_diff_eq!(s[1].f1, 0.229197, epsilon = 1e-3);
    assert_abs_diff_eq!(s[2].f1, 0.000010, epsilon = 1e-3);
}

#[test]
fn integrated_chain_matches_finite_differences() {
    let rep = irbf("1/2", 10, 2.150);
    let h = 2e-4;
    for i in 1..=20 {
        let eta = 4.5 * i as f64 / 21.0;
        let s = rep.expansion.state(eta).unwrap();
        let plus = rep.expansion.state(eta + h).unwrap();
        let minus = rep.expansion.state(eta - h).unwrap();
        for k in 0..3 {
            let fd = (plus[k] - minus[k]) / (2.0 * h);
            assert!((fd - s[k + 1]).abs() <= 1e-7, "eta {eta} order {k}: {fd} vs {}", s[k + 1]);
        }
    }
}

#[test]
fn boundary_conditions_hold_at_origin() {
    let rep = irbf("3/4", 10, 2.418);
    let s = sample_profile(&rep.expansion, &rep.problem, &[0.0]).unwrap()[0];
    assert!(s.f.abs() <= 1e-10);
    assert!((s.f2 + 1.0).abs() <= 1e-10);
}

#[test]
fn profile_at_nodes_reproduces_collocation() {
    let rep = irbf("1", 10, 2.380);
    for &x in rep.expansion.centers().points() {
        let [f, f1, f2, f3] = rep.expansion.state(x).unwrap();
        assert!(rep.problem.ode_residual(f, f1, f2, f3).abs() <= 1e-10);
    }
}

#[test]
fn integrated_beats_direct_at_equal_size() {
    for (lam, ci, cd) in [("0", 1.860, 3.46543), ("1/4", 2.005, 3.943), ("1/2", 2.150, 5.36)] {
        let oracle = rk(lam);
        let ir = irbf(lam, 10, ci);
        let dr = drbf_solve(&problem(lam), &KernelSpec::imq(cd).unwrap(), 10, &SolverConfig::default())
            .unwrap();
        assert!(
            (ir.f_prime_at_0 - oracle).abs() <= (dr.f_prime_at_0 - oracle).abs(),
            "lambda {lam}"
        );
    }
}

#[test]
fn residual_norm_decays_for_every_flux_exponent() {
    for lam in ["0", "1/4", "1/3", "1/2", "2/3", "3/4", "1"] {
        let norms: Vec<f64> = [5, 6, 8, 10, 12, 15]
            .iter()
            .map(|&n| irbf(lam, n, 1.6).res_norm_sq)
            .collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "lambda {lam}: {norms:?}");
    }
}

#[test]
fn residual_norm_is_second_order_in_grid() {
    let rep = irbf("0", 10, 1.860);
    let v: Vec<f64> = [2001, 4001, 8001]
        .iter()
        .map(|&g| residual_norm_squared(&rep.expansion, &rep.problem, g).unwrap())
        .collect();
    let (d1, d2) = ((v[0] - v[1]).abs(), (v[1] - v[2]).abs());
    assert!(d1 / v[1] <= 1e-5 && d2 / v[2] <= 1e-5, "{v:?}");
    let ratio = d1 / d2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn shape_scan_marks_a_good_minimizer() {
    let scan = scan_shape_parameter(
        Method::Irbf,
        &problem("0"),
        &KernelSpec::mq(1.0).unwrap(),
        10,
        1.0,
        3.0,
        21,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(scan.entries.len(), 21);
    let best = scan.best_entry();
    assert!(best.best && best.converged);
    let fp = best.report.as_ref().unwrap().f_prime_at_0;
    assert_abs_diff_eq!(fp, 0.94758, epsilon = 5e-4);
}

#[test]
fn shape_scan_flags_ill_conditioning() {
    let scan = scan_shape_parameter(
        Method::Irbf,
        &problem("0"),
        &KernelSpec::mq(1.0).unwrap(),
        15,
        2.0,
        16.0,
        5,
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(scan.entries.iter().any(|e| e.ill_conditioned));
    let last = scan.entries.last().unwrap();
    assert!(last.ill_conditioned);
    assert!(!last.report.as_ref().unwrap().warnings.is_empty());
    assert!(!scan.best_entry().ill_conditioned);
}

#[test]
fn closed_layout_is_selectable() {
    let cfg = SolverConfig {
        layout: NodeLayout::Closed,
        ..SolverConfig::default()
    };
    let rep = irbf_solve(&problem("0"), &KernelSpec::mq(1.860).unwrap(), 10, &cfg).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.expansion.centers().points()[9], 4.5);
    assert!((rep.f_prime_at_0 - 0.9476).abs() < 2e-3);
}

#[test]
fn direct_solver_reports_without_panicking() {
    // non-decaying kernel exercises the explicit far-field row
    let rep = drbf_solve(&problem("1/2"), &KernelSpec::mq(1.5).unwrap(), 8, &SolverConfig::default())
        .unwrap();
    assert_eq!(rep.method, Method::Drbf);
    assert!(rep.interp_matrix_condition.is_finite());
    if rep.converged {
        assert!(rep.expansion.state(4.5).unwrap()[1].abs() <= 1e-10);
    } else {
        assert!(!rep.warnings.is_empty());
    }
}

#[test]
fn initial_guess_length_is_checked() {
    let cfg = SolverConfig {
        initial_guess: Some(vec![0.0; 4]),
        ..SolverConfig::default()
    };
    assert!(matches!(
        irbf_solve(&problem("0"), &KernelSpec::mq(2.0).unwrap(), 10, &cfg),
        Err(RbfError::DimensionMismatch { .. })
    ));
}

#[test]
fn single_precision_integrated_solve() {
    let p = ConeProblem::<f32>::with_lambda("0".parse().unwrap());
    let cfg = SolverConfig::<f32> {
        newton: NewtonConfig {
            residual_tolerance: 1e-3,
            ..NewtonConfig::default()
        },
        ..SolverConfig::default()
    };
    let rep = irbf_solve(&p, &KernelSpec::mq(2.0).unwrap(), 6, &cfg).unwrap();
    assert!(rep.converged, "{:?}", rep.warnings);
    assert!((rep.f_prime_at_0 - 0.9476).abs() < 2e-2, "{}", rep.f_prime_at_0);
}

#[test]
fn constants_enforce_curvature_at_origin() {
    let rep = irbf("0", 6, 1.6);
    assert_eq!(rep.expansion.weights().len(), 6);
    assert!(rep.expansion.constants().is_some());
    let mq = KernelSpec::mq(1.6).unwrap();
    let d = rep.expansion.constants().unwrap();
    let h2: f64 = rep
        .expansion
        .weights()
        .iter()
        .zip(rep.expansion.centers().points())
        .map(|(w, x)| w * mq.eval_antiderivative(2, -x).unwrap())
        .sum();
    assert_abs_diff_eq!(h2 + d[0], -1.0, epsilon = 1e-10);
}
