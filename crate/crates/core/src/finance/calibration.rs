//! Least-squares calibration of short-rate parameters to a discount curve
//! through the pricing identity `B(0,T) = φ_{Λ_T}(1)`.
//!
//! A derivative-free Nelder-Mead search with bound clamping runs from
//! several seeded starts and a polish restart around the incumbent. The
//! contract is the CURVE: parameters may trade off against each other, so
//! convergence is judged on the residual norm, not on parameter recovery.

use num_complex::Complex64;
use rand::RngCore;

use crate::cpoisson::closed_form_exp_jumps;
use crate::error::{Error, Result};
use crate::finance::DiscountCurve;
use crate::gaussian::{closed_form, laplace_of_law, ClosedFormKind};
use crate::levy::gamma_ou_closed_form;
use crate::montecarlo::CounterRng;
use crate::numerics::{GammaLawParams, QuadratureConfig};
use crate::process::ProcessSpec;

/// Families with free parameters the calibrator can fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationFamily {
    /// Constant-coefficient OU short rate; params `[beta, sigma, lambda0]`.
    VasicekOu,
    /// Compound Poisson with exponential jumps; params `[theta, kappa, lambda0]`.
    CompoundPoissonExp,
    /// Gamma-OU intensity; params `[kappa, alpha, beta, lambda0]`.
    GammaOu,
    /// Deterministic flat rate; params `[lambda]`.
    ConstantRate,
}

impl CalibrationFamily {
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            CalibrationFamily::VasicekOu => &["beta", "sigma", "lambda0"],
            CalibrationFamily::CompoundPoissonExp => &["theta", "kappa", "lambda0"],
            CalibrationFamily::GammaOu => &["kappa", "alpha", "beta", "lambda0"],
            CalibrationFamily::ConstantRate => &["lambda"],
        }
    }

    pub fn dimension(&self) -> usize {
        self.param_names().len()
    }

    /// Model discount factor `B(0,T)` at a parameter vector (closed forms
    /// throughout, so the objective is cheap and smooth inside the bounds).
    pub fn model_price(&self, params: &[f64], maturity: f64) -> Result<f64> {
        match self {
            CalibrationFamily::VasicekOu => {
                let [beta, sigma, lambda0] = params_array(params)?;
                let law = closed_form(
                    &ClosedFormKind::IntegratedOu {
                        beta,
                        sigma,
                        lambda_s: lambda0,
                    },
                    0.0,
                    maturity,
                    &QuadratureConfig::default(),
                )?;
                Ok(laplace_of_law(&law, Complex64::new(1.0, 0.0)).re)
            }
            CalibrationFamily::CompoundPoissonExp => {
                let [theta, kappa, lambda0] = params_array(params)?;
                let base = closed_form_exp_jumps(kappa, theta, maturity, Complex64::new(1.0, 0.0))?;
                Ok(((-lambda0 * maturity).exp() * base).re)
            }
            CalibrationFamily::GammaOu => {
                let [kappa, alpha, beta, lambda0]: [f64; 4] = params
                    .try_into()
                    .map_err(|_| Error::invalid("params", "wrong dimension"))?;
                let p = GammaLawParams::new(kappa, alpha)?;
                let psi = gamma_ou_closed_form(&p, beta, lambda0, 0.0, maturity, Complex64::i())?;
                Ok(psi.exp().re)
            }
            CalibrationFamily::ConstantRate => {
                let lambda = params
                    .first()
                    .copied()
                    .ok_or_else(|| Error::invalid("params", "wrong dimension"))?;
                Ok((-lambda * maturity).exp())
            }
        }
    }

    /// The process spec at a fitted parameter vector.
    pub fn spec(&self, params: &[f64]) -> Result<ProcessSpec> {
        use crate::coeffs::{CoefficientFn, GaussianCoeffs};
        match self {
            CalibrationFamily::VasicekOu => {
                let [beta, sigma, lambda0] = params_array(params)?;
                Ok(ProcessSpec::Gaussian(crate::gaussian::GaussianProcessSpec::new(
                    GaussianCoeffs::new(
                        CoefficientFn::constant(0.0),
                        CoefficientFn::constant(beta),
                        CoefficientFn::constant(sigma),
                    )?,
                    0.0,
                    lambda0,
                )))
            }
            CalibrationFamily::CompoundPoissonExp => {
                let [theta, kappa, lambda0] = params_array(params)?;
                Ok(ProcessSpec::CompoundPoisson(crate::cpoisson::CompoundPoissonSpec::new(
                    theta,
                    crate::cpoisson::JumpLaw::exponential(kappa)?,
                    0.0,
                    lambda0,
                )?))
            }
            CalibrationFamily::GammaOu => {
                let [kappa, alpha, beta, lambda0]: [f64; 4] = params
                    .try_into()
                    .map_err(|_| Error::invalid("params", "wrong dimension"))?;
                Ok(ProcessSpec::GammaOu {
                    params: GammaLawParams::new(kappa, alpha)?,
                    beta,
                    s: 0.0,
                    lambda_s: lambda0,
                })
            }
            CalibrationFamily::ConstantRate => {
                let lambda = params[0];
                // α = β = σ = 0 freezes λ_t ≡ λ
                Ok(ProcessSpec::Gaussian(crate::gaussian::GaussianProcessSpec::new(
                    GaussianCoeffs::new(
                        CoefficientFn::constant(0.0),
                        CoefficientFn::constant(0.0),
                        CoefficientFn::constant(0.0),
                    )?,
                    0.0,
                    lambda,
                )))
            }
        }
    }
}

fn params_array(params: &[f64]) -> Result<[f64; 3]> {
    params
        .try_into()
        .map_err(|_| Error::invalid("params", "wrong dimension"))
}

/// Search configuration: box bounds per parameter plus the multi-start
/// budget.
#[derive(Debug, Clone)]
pub struct CalibrationSetup {
    pub family: CalibrationFamily,
    pub bounds: Vec<(f64, f64)>,
    pub n_starts: usize,
    pub seed: u64,
    pub max_iters: usize,
}

impl CalibrationSetup {
    pub fn new(family: CalibrationFamily, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != family.dimension() {
            return Err(Error::invalid(
                "bounds",
                format!(
                    "family {:?} needs {} bounds, got {}",
                    family,
                    family.dimension(),
                    bounds.len()
                ),
            ));
        }
        if bounds.iter().any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::invalid("bounds", "each bound must satisfy lo < hi, finite"));
        }
        Ok(Self {
            family,
            bounds,
            n_starts: 8,
            seed: 7,
            max_iters: 600,
        })
    }
}

/// Fit report: best parameters, curve-level residuals, and a convergence
/// flag (`false` is a report, not an error).
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub params: Vec<f64>,
    pub residual_norm: f64,
    pub per_maturity_errors: Vec<f64>,
    pub converged: bool,
    pub objective_evals: usize,
}

/// Least-squares fit of the family to the observed curve.
pub fn calibrate(setup: &CalibrationSetup, curve: &DiscountCurve) -> Result<CalibrationReport> {
    let dim = setup.family.dimension();
    if curve.maturities.len() < dim {
        return Err(Error::invalid(
            "curve",
            format!("need at least {dim} observations for {dim} free parameters"),
        ));
    }
    let evals = std::cell::Cell::new(0usize);
    let objective = |params: &[f64]| -> f64 {
        evals.set(evals.get() + 1);
        let mut sse = 0.0;
        for (m, d) in curve.maturities.iter().zip(&curve.discounts) {
            match setup.family.model_price(params, *m) {
                Ok(p) if p.is_finite() => sse += (p - d) * (p - d),
                _ => return f64::INFINITY,
            }
        }
        sse
    };

    // start 0 at the box center, the rest seeded uniformly inside the box
    let mut rng = CounterRng::new(setup.seed, 0);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut starts: Vec<Vec<f64>> = vec![setup
        .bounds
        .iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect()];
    for _ in 1..setup.n_starts.max(1) {
        starts.push(
            setup
                .bounds
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * uniform())
                .collect(),
        );
    }

    let iters = setup.max_iters * dim;
    let mut best_params = starts[0].clone();
    let mut best_obj = f64::INFINITY;
    for start in &starts {
        let (params, obj) = nelder_mead(&objective, start, &setup.bounds, iters, 0.1);
        if obj < best_obj {
            best_obj = obj;
            best_params = params;
        }
    }
    // polish: restart around the incumbent with progressively smaller
    // simplices; NM alone stagnates on 4-parameter fits
    for &scale in &[0.05, 0.01, 1e-3, 1e-4, 1e-5, 1e-6] {
        let (params, obj) = nelder_mead(&objective, &best_params, &setup.bounds, iters, scale);
        if obj < best_obj {
            best_obj = obj;
            best_params = params;
        }
        if best_obj <= 1e-22 {
            break;
        }
    }

    let per_maturity_errors: Vec<f64> = curve
        .maturities
        .iter()
        .zip(&curve.discounts)
        .map(|(m, d)| {
            setup
                .family
                .model_price(&best_params, *m)
                .map(|p| p - d)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let residual_norm = per_maturity_errors
        .iter()
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt();

    Ok(CalibrationReport {
        params: best_params,
        residual_norm,
        per_maturity_errors,
        converged: residual_norm.is_finite() && best_obj.is_finite(),
        objective_evals: evals.get(),
    })
}

/// Bounded Nelder-Mead: candidates are clamped into the box; the initial
/// simplex spans `step_scale` of each bound range around the start point.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    objective: &F,
    start: &[f64],
    bounds: &[(f64, f64)],
    max_iters: usize,
    step_scale: f64,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(*lo, *hi);
        }
    };

    // initial simplex: start plus one step per coordinate
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = objective(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let (lo, hi) = bounds[i];
        let step = step_scale * (hi - lo);
        let mut xi = x0.clone();
        xi[i] = if xi[i] + step <= hi { xi[i] + step } else { xi[i] - step };
        let fi = objective(&xi);
        simplex.push((xi, fi));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if !best.is_finite() {
            break;
        }
        // converged when the simplex has collapsed in objective value
        if (worst - best).abs() <= 1e-16 * best.abs().max(1e-30) + 1e-300 {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();

        let mut reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[dim].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        clamp(&mut reflected);
        let fr = objective(&reflected);

        if fr < simplex[0].1 {
            let mut expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            clamp(&mut expanded);
            let fe = objective(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let mut contracted: Vec<f64> = centroid
            .iter()
            .zip(&simplex[dim].0)
            .map(|(c, w)| c + rho * (w - c))
            .collect();
        clamp(&mut contracted);
        let fc = objective(&contracted);
        if fc < simplex[dim].1 {
            simplex[dim] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = best_x
                .iter()
                .zip(&v.0)
                .map(|(b, w)| b + sigma * (w - b))
                .collect();
            clamp(&mut x);
            let f = objective(&x);
            *v = (x, f);
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}
