use std::path::PathBuf;

use rbfbvp::{
    drbf, irbf, nusselt_ratio, sample_profile, scan_shape_parameter, shoot, ConeProblem64,
    FluxExponent, Method, ShootResult, ShootingConfig64, SolveReport64, SolverConfig64,
};
use serde::Serialize;

use crate::args::{
    Cli, Command, Format, KernelArg, MethodArg, OracleArgs, OutputArgs, ScanArgs, SolveArgs,
    TableArgs, TableId,
};
use crate::error::CliError;
use crate::manifest::{CommandKind, RunManifest};
use crate::output::{fixed, sci, to_json_bytes, Table};
use crate::reference::{self, SlopeRow};

/// Bytes to write plus the failure to report after writing, if any.
#[derive(Debug)]
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub out: Option<PathBuf>,
    pub failure: Option<CliError>,
}

pub fn run(cli: Cli) -> Result<Artifact, CliError> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Table(a) => table(a),
        Command::ScanC(a) => scan_c(a),
        Command::Oracle(a) => oracle(a),
    }
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Drbf => "drbf",
        MethodArg::Irbf => "irbf",
    }
}

fn kernel_name(k: KernelArg) -> &'static str {
    match k {
        KernelArg::Imq => "imq",
        KernelArg::Mq => "mq",
        KernelArg::Ga => "ga",
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn with_output(mut m: RunManifest, out: &OutputArgs, format: Format) -> RunManifest {
    m = m.with("format", format_name(format));
    if let Some(p) = &out.out {
        m = m.with("out", p.display());
    }
    m
}

fn check_size(method: MethodArg, n: usize, grid_points: usize) -> Result<(), CliError> {
    let min = match method {
        MethodArg::Drbf => drbf::MIN_CENTERS,
        MethodArg::Irbf => irbf::MIN_CENTERS,
    };
    if n < min {
        return Err(CliError::Usage(format!(
            "--n must be at least {min} for {}, got {n}",
            method_name(method)
        )));
    }
    if grid_points < 2 {
        return Err(CliError::Usage(format!("--grid-points must be at least 2, got {grid_points}")));
    }
    Ok(())
}

fn problem(lam: &str) -> ConeProblem64 {
    ConeProblem64::with_lambda(lam.parse().expect("reference lambda"))
}

fn shooting(eta_max: f64) -> ShootingConfig64 {
    ShootingConfig64 {
        eta_max,
        ..ShootingConfig64::default()
    }
}

fn solver(grid_points: usize) -> SolverConfig64 {
    SolverConfig64 {
        grid_points,
        ..SolverConfig64::default()
    }
}

fn non_convergence(report: &SolveReport64) -> CliError {
    CliError::NonConvergence(format!(
        "{} Newton iteration stopped ({:?}) after {} iterations with residual {:e}",
        report.method,
        report.termination,
        report.newton_iterations,
        report.collocation_residual_inf_norm
    ))
}

/// Preserves input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(|| f(x))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn grid(end: f64, step: f64) -> Vec<f64> {
    let count = (end / step + 1e-9).floor() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

const PROFILE_HEADER: [&str; 4] = ["eta", "fprime_method", "fprime_rk", "abs_error"];

fn profile_cells(
    report: &SolveReport64,
    rk: &ShootResult<f64>,
    etas: &[f64],
) -> Result<Vec<Vec<String>>, CliError> {
    let samples = sample_profile(&report.expansion, &report.problem, etas)?;
    let mut rows = Vec::with_capacity(etas.len());
    for s in samples {
        let oracle = rk.trajectory.at(s.eta).map_or(f64::NAN, |p| p.f1);
        rows.push(vec![
            fixed(s.eta),
            fixed(s.f1),
            fixed(oracle),
            fixed((s.f1 - oracle).abs()),
        ]);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    manifest: &'a RunManifest,
    f_prime_at_0: f64,
    converged: bool,
    weights: &'a [f64],
    d_constants: Option<[f64; 3]>,
    report: &'a SolveReport64,
}

fn solve(a: SolveArgs) -> Result<Artifact, CliError> {
    check_size(a.method, a.n, a.grid_points)?;
    let kernel_arg = a.kernel.unwrap_or(KernelArg::default_for(a.method));
    let kernel = kernel_arg.build(a.c)?;
    let problem = ConeProblem64::new(a.problem.lam, a.problem.eta_inf)?;
    let format = a.output.format.unwrap_or(Format::Json);
    let manifest = with_output(
        RunManifest::new(CommandKind::Solve)
            .with("method", method_name(a.method))
            .with("lam", a.problem.lam)
            .with("n", a.n)
            .with("c", a.c)
            .with("kernel", kernel_name(kernel_arg))
            .with("eta-inf", a.problem.eta_inf)
            .with("grid-points", a.grid_points),
        &a.output,
        format,
    );
    let report = rbfbvp::solve(a.method.into(), &problem, &kernel, a.n, &solver(a.grid_points))?;
    let bytes = match format {
        Format::Json => to_json_bytes(&SolveDocument {
            manifest: &manifest,
            f_prime_at_0: report.f_prime_at_0,
            converged: report.converged,
            weights: report.expansion.weights(),
            d_constants: report.expansion.constants(),
            report: &report,
        })?,
        Format::Csv => {
            let rk = shoot(&problem, &shooting(a.problem.eta_inf.max(15.0)))?;
            let mut t = Table::new(&PROFILE_HEADER);
            t.note(format!("fprime_at_0_method: {}", fixed(report.f_prime_at_0)));
            t.note(format!("res_norm_sq: {}", sci(report.res_norm_sq)));
            t.note(format!("converged: {}", report.converged));
            for row in profile_cells(&report, &rk, &grid(a.problem.eta_inf, 0.1))? {
                t.push(row);
            }
            t.to_csv(&manifest)?
        }
    };
    let failure = (!report.converged).then(|| non_convergence(&report));
    Ok(Artifact {
        bytes,
        out: a.output.out,
        failure,
    })
}

fn render(t: &Table, manifest: &RunManifest, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => t.to_csv(manifest),
        Format::Json => t.to_json(manifest),
    }
}

fn table(a: TableArgs) -> Result<Artifact, CliError> {
    if a.grid_points < 2 {
        return Err(CliError::Usage(format!("--grid-points must be at least 2, got {}", a.grid_points)));
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    let id = format!("{:?}", a.id).to_lowercase();
    let manifest = with_output(
        RunManifest::new(CommandKind::Table)
            .with("id", &id)
            .with("grid-points", a.grid_points)
            .with("eta-max", a.eta_max),
        &a.output,
        format,
    );
    let sc = shooting(a.eta_max);
    sc.validate(&problem("0"))?;
    let cfg = solver(a.grid_points);
    let t = match a.id {
        TableId::T3 => slope_table(Method::Drbf, &reference::DRBF_ROWS, &sc, &cfg)?,
        TableId::T5 => slope_table(Method::Irbf, &reference::IRBF_ROWS, &sc, &cfg)?,
        TableId::T4 => {
            let rows = reference::PROFILE_LAMBDAS.map(|l| SlopeRow {
                n: reference::DRBF_PROFILE_N,
                ..reference::slope_row(&reference::DRBF_ROWS, l)
            });
            profile_table(Method::Drbf, &rows, &reference::drbf_profile_etas(), &sc, &cfg)?
        }
        TableId::T6 => {
            let rows = reference::PROFILE_LAMBDAS.map(|l| SlopeRow {
                n: reference::IRBF_PROFILE_N,
                ..reference::slope_row(&reference::IRBF_ROWS, l)
            });
            profile_table(Method::Irbf, &rows, &reference::irbf_profile_etas(), &sc, &cfg)?
        }
        TableId::Fig2 => {
            let etas = grid(rbfbvp::DEFAULT_ETA_INFINITY, reference::FIGURE_STEP);
            profile_table(Method::Drbf, &reference::DRBF_ROWS, &etas, &sc, &cfg)?
        }
        TableId::Fig3 => {
            let etas = grid(rbfbvp::DEFAULT_ETA_INFINITY, reference::FIGURE_STEP);
            profile_table(Method::Irbf, &reference::IRBF_ROWS, &etas, &sc, &cfg)?
        }
        TableId::T7 => residual_table(&reference::RESIDUAL_LAMBDAS, true, &cfg)?,
        TableId::Fig4 => residual_table(&[reference::FIG4_LAMBDA], false, &cfg)?,
    };
    Ok(Artifact {
        bytes: render(&t, &manifest, format)?,
        out: a.output.out,
        failure: None,
    })
}

fn kernel_for(method: Method, c: f64) -> rbfbvp::Result<rbfbvp::KernelSpec64> {
    match method {
        Method::Drbf => rbfbvp::KernelSpec64::imq(c),
        Method::Irbf => rbfbvp::KernelSpec64::mq(c),
    }
}

fn method_note(method: Method) -> String {
    let kernel = match method {
        Method::Drbf => "imq",
        Method::Irbf => "mq",
    };
    format!("method: {method}, kernel: {kernel}, eta_inf: {}", rbfbvp::DEFAULT_ETA_INFINITY)
}

fn row_note(t: &mut Table, lam: &str, n: usize, outcome: &rbfbvp::Result<SolveReport64>) {
    match outcome {
        Ok(r) if !r.converged => t.note(format!(
            "lambda={lam} n={n}: not converged ({:?}, residual {:e})",
            r.termination, r.collocation_residual_inf_norm
        )),
        Ok(r) if r.ill_conditioned => t.note(format!("lambda={lam} n={n}: ill-conditioned")),
        Err(e) => t.note(format!("lambda={lam} n={n}: {e}")),
        _ => {}
    }
}

fn slope_table(
    method: Method,
    rows: &[SlopeRow],
    sc: &ShootingConfig64,
    cfg: &SolverConfig64,
) -> Result<Table, CliError> {
    let results = par_map(rows, |r| {
        let p = problem(r.lam);
        let rk = shoot(&p, sc).map(|s| s.f_prime_at_0);
        let rep = kernel_for(method, r.c).and_then(|k| rbfbvp::solve(method, &p, &k, r.n, cfg));
        (rk, rep)
    });
    let mut t = Table::new(&[
        "lambda",
        "n",
        "c",
        "fprime_rk",
        "fprime_method",
        "abs_error",
        "converged",
        "ham_quoted",
    ]);
    t.note(method_note(method));
    t.note("ham_quoted: homotopy analysis values copied verbatim (quoted), never computed");
    for (r, (rk, rep)) in rows.iter().zip(results) {
        let rk = rk?;
        row_note(&mut t, r.lam, r.n, &rep);
        let (fp, converged) = rep.as_ref().map_or((f64::NAN, false), |x| (x.f_prime_at_0, x.converged));
        t.push(vec![
            r.lam.to_string(),
            r.n.to_string(),
            r.c.to_string(),
            fixed(rk),
            fixed(fp),
            fixed((fp - rk).abs()),
            converged.to_string(),
            r.ham.to_string(),
        ]);
    }
    Ok(t)
}

fn profile_table(
    method: Method,
    rows: &[SlopeRow],
    etas: &[f64],
    sc: &ShootingConfig64,
    cfg: &SolverConfig64,
) -> Result<Table, CliError> {
    let results = par_map(rows, |r| {
        let p = problem(r.lam);
        let rk = shoot(&p, sc);
        let rep = kernel_for(method, r.c).and_then(|k| rbfbvp::solve(method, &p, &k, r.n, cfg));
        (rk, rep)
    });
    let mut header = vec!["lambda", "n", "c"];
    header.extend(PROFILE_HEADER);
    let mut t = Table::new(&header);
    t.note(method_note(method));
    for (r, (rk, rep)) in rows.iter().zip(results) {
        let rk = rk?;
        row_note(&mut t, r.lam, r.n, &rep);
        let cells = match &rep {
            Ok(rep) => profile_cells(rep, &rk, etas)?,
            Err(_) => etas
                .iter()
                .map(|&e| {
                    let oracle = rk.trajectory.at(e).map_or(f64::NAN, |p| p.f1);
                    vec![fixed(e), fixed(f64::NAN), fixed(oracle), fixed(f64::NAN)]
                })
                .collect(),
        };
        for cells in cells {
            let mut row = vec![r.lam.to_string(), r.n.to_string(), r.c.to_string()];
            row.extend(cells);
            t.push(row);
        }
    }
    Ok(t)
}

fn residual_table(lambdas: &[&str], with_lambda: bool, cfg: &SolverConfig64) -> Result<Table, CliError> {
    let c = reference::RESIDUAL_SHAPE;
    let jobs: Vec<(&str, usize)> = lambdas
        .iter()
        .flat_map(|&l| reference::RESIDUAL_SIZES.map(|n| (l, n)))
        .collect();
    let results = par_map(&jobs, |&(l, n)| {
        kernel_for(Method::Irbf, c).and_then(|k| rbfbvp::solve(Method::Irbf, &problem(l), &k, n, cfg))
    });
    let mut t = if with_lambda {
        Table::new(&["lambda", "n", "c", "res_norm_sq", "converged"])
    } else {
        Table::new(&["n", "res_norm_sq", "converged"])
    };
    t.note(method_note(Method::Irbf));
    if !with_lambda {
        t.note(format!("lambda: {}, c: {c}", lambdas[0]));
    }
    t.note(format!("res_norm_sq: trapezoid rule on {} points over [0, eta_inf]", cfg.grid_points));
    for (&(l, n), rep) in jobs.iter().zip(results) {
        row_note(&mut t, l, n, &rep);
        let (norm, converged) = rep.as_ref().map_or((f64::NAN, false), |r| (r.res_norm_sq, r.converged));
        let mut row = Vec::new();
        if with_lambda {
            row.extend([l.to_string(), n.to_string(), c.to_string()]);
        } else {
            row.push(n.to_string());
        }
        row.extend([sci(norm), converged.to_string()]);
        t.push(row);
    }
    Ok(t)
}

fn scan_c(a: ScanArgs) -> Result<Artifact, CliError> {
    check_size(a.method, a.n, a.grid_points)?;
    let kernel_arg = a.kernel.unwrap_or(KernelArg::default_for(a.method));
    let kernel = kernel_arg.build(a.c_min)?;
    let problem = ConeProblem64::new(a.problem.lam, a.problem.eta_inf)?;
    let format = a.output.format.unwrap_or(Format::Csv);
    let manifest = with_output(
        RunManifest::new(CommandKind::ScanC)
            .with("method", method_name(a.method))
            .with("lam", a.problem.lam)
            .with("n", a.n)
            .with("c-min", a.c_min)
            .with("c-max", a.c_max)
            .with("steps", a.steps)
            .with("kernel", kernel_name(kernel_arg))
            .with("eta-inf", a.problem.eta_inf)
            .with("grid-points", a.grid_points),
        &a.output,
        format,
    );
    let scan = scan_shape_parameter(
        a.method.into(),
        &problem,
        &kernel,
        a.n,
        a.c_min,
        a.c_max,
        a.steps,
        &solver(a.grid_points),
    )?;
    let mut t = Table::new(&[
        "c",
        "converged",
        "ill_conditioned",
        "best",
        "fprime_method",
        "res_norm_sq",
        "jacobian_condition",
        "interp_condition",
        "error",
    ]);
    t.note(format!("best_c: {}", fixed(scan.best_entry().c)));
    for e in &scan.entries {
        let (fp, norm, jc, ic) = e.report.as_ref().map_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN), |r| {
            (r.f_prime_at_0, r.res_norm_sq, r.jacobian_condition, r.interp_matrix_condition)
        });
        t.push(vec![
            fixed(e.c),
            e.converged.to_string(),
            e.ill_conditioned.to_string(),
            e.best.to_string(),
            fixed(fp),
            sci(norm),
            sci(jc),
            sci(ic),
            e.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(Artifact {
        bytes: render(&t, &manifest, format)?,
        out: a.output.out,
        failure: None,
    })
}

#[derive(Serialize)]
struct OracleDocument<'a> {
    manifest: &'a RunManifest,
    lambda: FluxExponent,
    f_prime_at_0: f64,
    nusselt_ratio: f64,
    shooting_residual: f64,
    evaluations: usize,
    eta_max: f64,
    integration_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<rbfbvp::TrajectoryPoint<f64>>>,
}

fn oracle(a: OracleArgs) -> Result<Artifact, CliError> {
    let format = a.output.format.unwrap_or(if a.emit_profile { Format::Csv } else { Format::Json });
    let mut manifest = RunManifest::new(CommandKind::Oracle)
        .with("lam", a.lam)
        .with("eta-max", a.eta_max);
    if a.emit_profile {
        manifest = manifest.with("emit-profile", true);
    }
    let manifest = with_output(manifest, &a.output, format);
    let problem = ConeProblem64::with_lambda(a.lam);
    let cfg = shooting(a.eta_max);
    let r = shoot(&problem, &cfg)?;
    let points: Vec<_> = grid(a.eta_max, 0.1)
        .into_iter()
        .filter_map(|e| r.trajectory.at(e))
        .collect();
    let bytes = match format {
        Format::Json => to_json_bytes(&OracleDocument {
            manifest: &manifest,
            lambda: a.lam,
            f_prime_at_0: r.f_prime_at_0,
            nusselt_ratio: nusselt_ratio(r.f_prime_at_0)?,
            shooting_residual: r.residual,
            evaluations: r.evaluations,
            eta_max: a.eta_max,
            integration_tolerance: cfg.integration_tolerance,
            profile: a.emit_profile.then_some(points),
        })?,
        Format::Csv if a.emit_profile => {
            let mut t = Table::new(&["eta", "f_rk", "fprime_rk", "fsecond_rk"]);
            t.note(format!("fprime_at_0: {}", fixed(r.f_prime_at_0)));
            for p in points {
                t.push(vec![fixed(p.eta), fixed(p.f), fixed(p.f1), fixed(p.f2)]);
            }
            t.to_csv(&manifest)?
        }
        Format::Csv => {
            let mut t = Table::new(&["lambda", "fprime_rk", "nusselt_ratio"]);
            t.push(vec![
                a.lam.to_string(),
                fixed(r.f_prime_at_0),
                fixed(nusselt_ratio(r.f_prime_at_0)?),
            ]);
            t.to_csv(&manifest)?
        }
    };
    Ok(Artifact {
        bytes,
        out: a.output.out,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        let g = grid(4.5, 0.1);
        assert_eq!(g.len(), 46);
        assert!((g[45] - 4.5).abs() < 1e-12);
        assert_eq!(grid(4.5, 0.05).len(), 91);
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<usize> = (0..16).collect();
        assert_eq!(par_map(&v, |x| x * 2), (0..16).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn size_checks() {
        assert!(matches!(check_size(MethodArg::Irbf, 2, 1001), Err(CliError::Usage(_))));
        assert!(matches!(check_size(MethodArg::Drbf, 3, 1001), Err(CliError::Usage(_))));
        assert!(check_size(MethodArg::Irbf, 3, 1001).is_ok());
        assert!(matches!(check_size(MethodArg::Irbf, 10, 1), Err(CliError::Usage(_))));
    }
}
