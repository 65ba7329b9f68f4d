//! Command implementations. Every command validates the full config before
//! computing anything and writes plot-ready CSV with a metadata comment
//! line; outputs are byte-identical across reruns of the same config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pathlap::cpoisson::CompoundPoissonSpec;
use pathlap::finance::{
    self, calibrate, Atom, CalibrationSetup, DiscountCurve, InversionOptions,
};
use pathlap::numerics::Complex64;
use pathlap::process::{EvalContext, ProcessSpec, Route};

use crate::config::RunConfig;
use crate::CliError;

pub struct CommandIo {
    pub out_dir: PathBuf,
    pub config_dir: PathBuf,
}

impl CommandIo {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Numeric(format!("cannot create output dir: {e}")))?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Input paths resolve relative to the config file's directory.
    fn resolve(&self, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.config_dir.join(p)
        }
    }
}

fn meta_line(spec: &ProcessSpec, route: Route, extra: &str) -> String {
    format!("# family={} route={} {extra}\n", spec.family(), route.name())
}

fn numeric_err(e: pathlap::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

pub fn cmd_eval(
    cfg: &RunConfig,
    io: &CommandIo,
    route: Route,
    ctx: &EvalContext,
) -> Result<(), CliError> {
    let task = cfg
        .task
        .eval
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.eval] section".into()))?;
    let spec = cfg.spec()?;
    let mut out = meta_line(&spec, route, &format!("t={}", task.t));
    out.push_str("x,re_phi,im_phi\n");
    for &x in &task.x_grid {
        let phi = spec
            .laplace(task.t, Complex64::new(x, 0.0), route, ctx)
            .map_err(numeric_err)?;
        writeln!(out, "{x},{},{}", phi.re, phi.im).expect("string write");
    }
    let path = io.write("eval.csv", &out)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig, io: &CommandIo, ctx: &EvalContext) -> Result<(), CliError> {
    let task = cfg
        .task
        .verify
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.verify] section".into()))?;
    let spec = cfg.spec()?;
    let routes = spec.available_routes();
    let analytic: Vec<Route> = routes
        .iter()
        .copied()
        .filter(|r| !matches!(r, Route::MonteCarlo))
        .collect();
    let has_mc = routes.contains(&Route::MonteCarlo) && !task.skip_mc;
    if analytic.len() + (has_mc as usize) < 2 {
        return Err(CliError::Config(format!(
            "family {:?} supports fewer than two routes; nothing to verify",
            spec.family()
        )));
    }

    let mut out = meta_line(&spec, Route::Auto, &format!("t={}", task.t));
    out.push('x');
    for r in &analytic {
        write!(out, ",{}", r.name()).expect("string write");
    }
    out.push_str(",max_analytic_gap");
    if has_mc {
        out.push_str(",mc,mc_stderr,mc_gap");
    }
    out.push_str(",status\n");

    let mut failures = 0usize;
    let mut mc_outliers = 0usize;
    for &x in &task.x_grid {
        let values: Vec<Complex64> = analytic
            .iter()
            .map(|&r| spec.laplace(task.t, Complex64::new(x, 0.0), r, ctx))
            .collect::<Result<_, _>>()
            .map_err(numeric_err)?;
        let mut max_gap = 0.0_f64;
        let mut row_failures = 0usize;
        for i in 0..analytic.len() {
            for j in i + 1..analytic.len() {
                let gap = (values[i] - values[j]).norm();
                let tol = if matches!(analytic[i], Route::Series)
                    || matches!(analytic[j], Route::Series)
                {
                    task.series_tolerance
                } else {
                    task.tolerance
                };
                if gap > tol {
                    row_failures += 1;
                }
                max_gap = max_gap.max(gap);
            }
        }
        failures += row_failures;
        write!(out, "{x}").expect("string write");
        for v in &values {
            write!(out, ",{}", v.re).expect("string write");
        }
        write!(out, ",{max_gap}").expect("string write");

        let mut row_ok = row_failures == 0;
        if has_mc {
            let est = spec.mc_estimate(task.t, x, ctx).map_err(numeric_err)?;
            let reference = values[0].re;
            let gap = (est.value - reference).abs();
            let ok = gap <= 3.0 * est.stderr.max(1e-15);
            if !ok {
                mc_outliers += 1;
                row_ok = false;
            }
            write!(out, ",{},{},{gap}", est.value, est.stderr).expect("string write");
        }
        writeln!(out, ",{}", if row_ok { "ok" } else { "FAIL" }).expect("string write");
    }

    let path = io.write("verify.csv", &out)?;
    print!("{out}");
    println!("wrote {}", path.display());
    if failures > 0 || mc_outliers > 0 {
        return Err(CliError::Verification(format!(
            "{failures} analytic discrepancies, {mc_outliers} MC outliers"
        )));
    }
    Ok(())
}

pub fn cmd_price(
    cfg: &RunConfig,
    io: &CommandIo,
    route: Route,
    ctx: &EvalContext,
) -> Result<(), CliError> {
    let task = cfg
        .task
        .price
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.price] section".into()))?;
    let spec = cfg.spec()?;
    let mut out = meta_line(&spec, route, "");
    out.push_str("maturity,price\n");
    let mut any_super_unit = false;
    for &m in &task.maturities {
        let price = spec
            .laplace(m, Complex64::new(1.0, 0.0), route, ctx)
            .map_err(numeric_err)?
            .re;
        any_super_unit |= price > 1.0;
        writeln!(out, "{m},{price}").expect("string write");
    }
    let path = io.write("price.csv", &out)?;
    println!("wrote {}", path.display());
    if any_super_unit {
        println!("note: some prices exceed par (Gaussian rates admit negative paths)");
    }
    Ok(())
}

pub fn cmd_survival(cfg: &RunConfig, io: &CommandIo, ctx: &EvalContext) -> Result<(), CliError> {
    let task = cfg
        .task
        .survival
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.survival] section".into()))?;
    let spec = cfg.spec()?;
    for (k, &state) in task.states.iter().enumerate() {
        let curve = finance::survival_curve(&spec, task.t, &task.tenors, state, ctx)
            .map_err(numeric_err)?;
        let mut out = meta_line(&spec, Route::Auto, &format!("t={} lambda_t={state}", task.t));
        out.push_str(&curve.to_csv_string());
        let path = io.write(&format!("survival_{k}.csv"), &out)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_calibrate(cfg: &RunConfig, io: &CommandIo) -> Result<(), CliError> {
    let task = cfg
        .task
        .calibrate
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.calibrate] section".into()))?;
    let family = task.family()?;
    let curve_path = io.resolve(&task.curve_file);
    let text = std::fs::read_to_string(&curve_path).map_err(|e| {
        CliError::Config(format!("cannot read curve file {}: {e}", curve_path.display()))
    })?;
    let curve = DiscountCurve::from_csv_str(&text).map_err(|e| CliError::Config(e.to_string()))?;

    let mut setup =
        CalibrationSetup::new(family, task.bounds.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    setup.n_starts = task.starts;
    setup.seed = task.seed;
    let report = calibrate(&setup, &curve).map_err(numeric_err)?;

    let mut out = format!(
        "# family={} converged={} residual_norm={}\n",
        task.family, report.converged, report.residual_norm
    );
    out.push_str("parameter,value\n");
    for (name, value) in family.param_names().iter().zip(&report.params) {
        writeln!(out, "{name},{value}").expect("string write");
    }
    out.push_str("maturity,error\n");
    for (m, e) in curve.maturities.iter().zip(&report.per_maturity_errors) {
        writeln!(out, "{m},{e}").expect("string write");
    }
    let path = io.write("calibration.csv", &out)?;
    println!(
        "residual_norm = {} after {} objective evaluations",
        report.residual_norm, report.objective_evals
    );
    println!("wrote {}", path.display());
    if !report.converged {
        return Err(CliError::Numeric("calibration did not converge".into()));
    }
    Ok(())
}

pub fn cmd_invert(cfg: &RunConfig, io: &CommandIo, ctx: &EvalContext) -> Result<(), CliError> {
    let task = cfg
        .task
        .invert
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [task.invert] section".into()))?;
    if task.grid_points < 2 {
        return Err(CliError::Config("invert.grid_points must be >= 2".into()));
    }
    let spec = cfg.spec()?;
    let grid: Vec<f64> = (0..task.grid_points)
        .map(|k| {
            task.grid_min
                + (task.grid_max - task.grid_min) * k as f64 / (task.grid_points - 1) as f64
        })
        .collect();

    let atom = if task.remove_atom {
        match &spec {
            ProcessSpec::CompoundPoisson(cp) => Some(cp_atom(cp, task.t)),
            _ => {
                return Err(CliError::Config(
                    "remove_atom applies to the compound_poisson family".into(),
                ))
            }
        }
    } else {
        None
    };

    let opts = InversionOptions {
        u_max: task.u_max,
        atom,
        ..Default::default()
    };
    let res = finance::invert_distribution(|u| spec.char_fn(task.t, u, ctx), &grid, &opts)
        .map_err(numeric_err)?;

    let mut out = meta_line(&spec, Route::Auto, &format!(
        "t={} u_max={} max_err_est={} max_clip_adjust={}",
        task.t, res.u_max, res.max_error_estimate, res.max_clip_adjustment
    ));
    out.push_str("x,cdf\n");
    for (y, f) in grid.iter().zip(&res.cdf) {
        writeln!(out, "{y},{f}").expect("string write");
    }
    let path = io.write("cdf.csv", &out)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Zero-jump atom of a compound Poisson integral: mass `e^{−θ(t−s)}` at
/// `Λ = (t−s)λ_s`.
fn cp_atom(spec: &CompoundPoissonSpec, t: f64) -> Atom {
    let tau = t - spec.s;
    Atom {
        location: tau * spec.lambda_s,
        mass: (-spec.theta * tau).exp(),
    }
}
