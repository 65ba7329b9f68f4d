//! Tagged union over the process families with uniform transform
//! evaluation, route selection, conditioning, and sampling.

use num_complex::Complex64;

use crate::coeffs::{CoefficientFn, GaussianCoeffs};
use crate::cpoisson::{self, CompoundPoissonSpec, JumpLaw};
use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianProcessSpec};
use crate::levy::{self, BdlpHwSpec, LevyExponent};
use crate::montecarlo::{self, McConfig, McEstimate, McScheme};
use crate::numerics::{GammaLawParams, QuadratureConfig};

/// Which evaluation route to use for a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The family's preferred analytic route.
    Auto,
    /// Closed form, where one exists.
    Closed,
    /// Quadrature of the characteristic exponent.
    Quadrature,
    /// Jump-time conditioning series (compound Poisson only).
    Series,
    /// Monte Carlo estimate of `E[e^{−xΛ}]`.
    MonteCarlo,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Auto => "auto",
            Route::Closed => "closed",
            Route::Quadrature => "quad",
            Route::Series => "series",
            Route::MonteCarlo => "mc",
        }
    }
}

/// Numeric budgets shared by the evaluation routes.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext {
    pub quad: QuadratureConfig,
    pub mc: McConfig,
    pub series_n_max: usize,
    pub series_tol: f64,
}

impl Default for EvalContext {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            mc: McConfig::new(200_000, 1, 42, McScheme::ExactGaussianStep).unwrap(),
            series_n_max: 40,
            series_tol: 1e-10,
        }
    }
}

/// One process family with its conditioning state.
#[derive(Debug, Clone)]
pub enum ProcessSpec {
    /// `dλ = (α(t) − β(t)λ)dt + σ(t)dW`.
    Gaussian(GaussianProcessSpec),
    /// `dλ = (α(t) − β(t)λ)dt + σ(t)dX` with a Lévy driver.
    BdlpHullWhite(BdlpHwSpec),
    /// `λ` itself a Lévy process started at `λ_s`.
    IntegratedLevy {
        driver: LevyExponent,
        s: f64,
        lambda_s: f64,
    },
    /// `dλ = −βλ dt + dγ_t` with a gamma subordinator (closed form via the
    /// dilogarithm).
    GammaOu {
        params: GammaLawParams,
        beta: f64,
        s: f64,
        lambda_s: f64,
    },
    /// `λ_t = λ_s + Σ_{i≤N_t} X_i`.
    CompoundPoisson(CompoundPoissonSpec),
    /// `Λ` modeled directly as a Lévy process (no intensity underneath):
    /// increments are state-independent, so conditional curves carry no
    /// memory.
    LevySubordinator { exponent: LevyExponent, s: f64 },
}

impl ProcessSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProcessSpec::Gaussian(_) => "gaussian",
            ProcessSpec::BdlpHullWhite(_) => "bdlp_hull_white",
            ProcessSpec::IntegratedLevy { .. } => "integrated_levy",
            ProcessSpec::GammaOu { .. } => "gamma_ou",
            ProcessSpec::CompoundPoisson(_) => "compound_poisson",
            ProcessSpec::LevySubordinator { .. } => "levy_subordinator",
        }
    }

    pub fn conditioning_time(&self) -> f64 {
        match self {
            ProcessSpec::Gaussian(g) => g.s,
            ProcessSpec::BdlpHullWhite(h) => h.s,
            ProcessSpec::IntegratedLevy { s, .. } => *s,
            ProcessSpec::GammaOu { s, .. } => *s,
            ProcessSpec::CompoundPoisson(c) => c.s,
            ProcessSpec::LevySubordinator { s, .. } => *s,
        }
    }

    /// Re-conditions the family at `(t, λ_t)`. For a direct Lévy `Λ` the
    /// state is irrelevant and only the clock moves.
    pub fn condition(&self, t: f64, lambda_t: f64) -> Result<ProcessSpec> {
        Ok(match self {
            ProcessSpec::Gaussian(g) => ProcessSpec::Gaussian(GaussianProcessSpec::new(
                g.coeffs.clone(),
                t,
                lambda_t,
            )),
            ProcessSpec::BdlpHullWhite(h) => ProcessSpec::BdlpHullWhite(BdlpHwSpec::new(
                h.coeffs.clone(),
                h.driver.clone(),
                t,
                lambda_t,
            )),
            ProcessSpec::IntegratedLevy { driver, .. } => ProcessSpec::IntegratedLevy {
                driver: driver.clone(),
                s: t,
                lambda_s: lambda_t,
            },
            ProcessSpec::GammaOu { params, beta, .. } => {
                if lambda_t < 0.0 {
                    return Err(Error::invalid("lambda_t", "gamma-OU state must be >= 0"));
                }
                ProcessSpec::GammaOu {
                    params: *params,
                    beta: *beta,
                    s: t,
                    lambda_s: lambda_t,
                }
            }
            ProcessSpec::CompoundPoisson(c) => ProcessSpec::CompoundPoisson(
                CompoundPoissonSpec::new(c.theta, c.jump.clone(), t, lambda_t)?,
            ),
            ProcessSpec::LevySubordinator { exponent, .. } => ProcessSpec::LevySubordinator {
                exponent: exponent.clone(),
                s: t,
            },
        })
    }

    /// Laplace transform `φ_{Λ_{s,t}}(x) = E[e^{−xΛ_{s,t}} | λ_s]` through
    /// the selected route.
    ///
    /// ```
    /// use pathlap::numerics::{Complex64, GammaLawParams};
    /// use pathlap::process::{EvalContext, ProcessSpec, Route};
    ///
    /// let spec = ProcessSpec::GammaOu {
    ///     params: GammaLawParams::new(1.0, 1.0)?,
    ///     beta: 1.0,
    ///     s: 0.0,
    ///     lambda_s: 0.1,
    /// };
    /// let ctx = EvalContext::default();
    /// let x = Complex64::new(1.0, 0.0);
    /// let closed = spec.laplace(1.0, x, Route::Closed, &ctx)?;
    /// let quad = spec.laplace(1.0, x, Route::Quadrature, &ctx)?;
    /// assert!((closed - quad).norm() < 1e-8);
    /// # Ok::<(), pathlap::Error>(())
    /// ```
    pub fn laplace(&self, t: f64, x: Complex64, route: Route, ctx: &EvalContext) -> Result<Complex64> {
        let ix = Complex64::i() * x;
        match (self, route) {
            (ProcessSpec::Gaussian(g), Route::Auto | Route::Quadrature) => {
                gaussian::laplace(g, t, x, &ctx.quad)
            }
            (ProcessSpec::Gaussian(g), Route::MonteCarlo) => {
                let samples = montecarlo::sample_gaussian_integral(g, t, &ctx.mc, &ctx.quad)?;
                Ok(complex_transform_mean(&samples, x))
            }

            (ProcessSpec::BdlpHullWhite(h), Route::Auto | Route::Quadrature) => {
                Ok(levy::psi_integrated_hw(h, t, ix, &ctx.quad)?.exp())
            }
            (ProcessSpec::BdlpHullWhite(h), Route::Closed) => {
                let (params, beta) = h
                    .as_gamma_ou()
                    .ok_or_else(|| self.unsupported(route))?;
                Ok(levy::gamma_ou_closed_form(&params, beta, h.lambda_s, h.s, t, ix)?.exp())
            }
            (ProcessSpec::BdlpHullWhite(h), Route::MonteCarlo) => {
                let samples = self.bdlp_samples(h, t, ctx)?;
                Ok(complex_transform_mean(&samples, x))
            }

            (ProcessSpec::IntegratedLevy { driver, s, lambda_s }, Route::Auto | Route::Quadrature) => {
                Ok(levy::psi_integrated_levy(driver, *lambda_s, *s, t, ix, &ctx.quad)?.exp())
            }

            (
                ProcessSpec::GammaOu {
                    params,
                    beta,
                    s,
                    lambda_s,
                },
                Route::Auto | Route::Closed,
            ) => Ok(levy::gamma_ou_closed_form(params, *beta, *lambda_s, *s, t, ix)?.exp()),
            (
                ProcessSpec::GammaOu {
                    params,
                    beta,
                    s,
                    lambda_s,
                },
                Route::Quadrature,
            ) => {
                let spec = gamma_ou_as_hw(params, *beta, *s, *lambda_s)?;
                Ok(levy::psi_integrated_hw(&spec, t, ix, &ctx.quad)?.exp())
            }
            (
                ProcessSpec::GammaOu {
                    params,
                    beta,
                    s,
                    lambda_s,
                },
                Route::MonteCarlo,
            ) => {
                let samples =
                    montecarlo::sample_gamma_ou_integral(params, *beta, *lambda_s, *s, t, &ctx.mc)?;
                Ok(complex_transform_mean(&samples, x))
            }

            (ProcessSpec::CompoundPoisson(c), Route::Auto | Route::Quadrature) => {
                cpoisson::laplace_levy_route(c, t, x, &ctx.quad)
            }
            (ProcessSpec::CompoundPoisson(c), Route::Closed) => {
                let tau = t - c.s;
                let shift = (-x * (c.lambda_s * tau)).exp();
                let base = match &c.jump {
                    JumpLaw::Exponential(kappa) => {
                        cpoisson::closed_form_exp_jumps(*kappa, c.theta, tau, x)?
                    }
                    JumpLaw::Gamma(p) if p.alpha == 1.0 => {
                        cpoisson::closed_form_exp_jumps(p.kappa, c.theta, tau, x)?
                    }
                    JumpLaw::Gamma(p) => cpoisson::closed_form_gamma_jumps(p, c.theta, tau, x)?,
                    JumpLaw::Custom(_) => return Err(self.unsupported(route)),
                };
                Ok(shift * base)
            }
            (ProcessSpec::CompoundPoisson(c), Route::Series) => {
                cpoisson::laplace_series(c, t, x, ctx.series_n_max, ctx.series_tol)?
                    .checked(ctx.series_n_max)
            }
            (ProcessSpec::CompoundPoisson(c), Route::MonteCarlo) => {
                let mc = McConfig {
                    scheme: McScheme::ExactJumps,
                    ..ctx.mc
                };
                let samples = montecarlo::sample_cp_integral(c, t, &mc)?;
                Ok(complex_transform_mean(&samples, x))
            }

            (ProcessSpec::LevySubordinator { exponent, s }, Route::Auto | Route::Closed) => {
                let tau = t - s;
                if tau < 0.0 {
                    return Err(Error::invalid("t", "need t >= s"));
                }
                exponent.check_path(|frac| ix * frac)?;
                Ok((tau * exponent.psi(ix)).exp())
            }
            (ProcessSpec::LevySubordinator { exponent, s }, Route::MonteCarlo) => {
                let samples = subordinator_samples(exponent, t - s, &ctx.mc)?;
                Ok(complex_transform_mean(&samples, x))
            }

            _ => Err(self.unsupported(route)),
        }
    }

    /// Characteristic function `φ_char(u) = φ(−iu)` on the analytic route.
    pub fn char_fn(&self, t: f64, u: f64, ctx: &EvalContext) -> Result<Complex64> {
        self.laplace(t, Complex64::new(0.0, -u), Route::Auto, ctx)
    }

    /// Monte Carlo estimate of `E[e^{−xΛ}]` for real `x`, with stderr.
    pub fn mc_estimate(&self, t: f64, x: f64, ctx: &EvalContext) -> Result<McEstimate> {
        let samples = self.sample(t, ctx)?;
        montecarlo::estimate_laplace(&samples, x)
    }

    /// Samples of `Λ_{s,t}` using the family's sampler.
    pub fn sample(&self, t: f64, ctx: &EvalContext) -> Result<Vec<f64>> {
        match self {
            ProcessSpec::Gaussian(g) => {
                montecarlo::sample_gaussian_integral(g, t, &ctx.mc, &ctx.quad)
            }
            ProcessSpec::BdlpHullWhite(h) => self.bdlp_samples(h, t, ctx),
            ProcessSpec::GammaOu {
                params,
                beta,
                s,
                lambda_s,
            } => montecarlo::sample_gamma_ou_integral(params, *beta, *lambda_s, *s, t, &ctx.mc),
            ProcessSpec::CompoundPoisson(c) => {
                let mc = McConfig {
                    scheme: McScheme::ExactJumps,
                    ..ctx.mc
                };
                montecarlo::sample_cp_integral(c, t, &mc)
            }
            ProcessSpec::LevySubordinator { exponent, s } => {
                subordinator_samples(exponent, t - s, &ctx.mc)
            }
            ProcessSpec::IntegratedLevy { .. } => Err(self.unsupported(Route::MonteCarlo)),
        }
    }

    /// Routes this family can evaluate (beyond `Auto`).
    pub fn available_routes(&self) -> Vec<Route> {
        match self {
            ProcessSpec::Gaussian(_) => vec![Route::Quadrature, Route::MonteCarlo],
            ProcessSpec::BdlpHullWhite(h) => {
                let mut routes = vec![Route::Quadrature];
                if h.as_gamma_ou().is_some() {
                    routes.push(Route::Closed);
                }
                if self.bdlp_mc_supported(h) {
                    routes.push(Route::MonteCarlo);
                }
                routes
            }
            ProcessSpec::IntegratedLevy { .. } => vec![Route::Quadrature],
            ProcessSpec::GammaOu { .. } => {
                vec![Route::Closed, Route::Quadrature, Route::MonteCarlo]
            }
            ProcessSpec::CompoundPoisson(c) => {
                let mut routes = vec![Route::Quadrature, Route::Series, Route::MonteCarlo];
                if !matches!(c.jump, JumpLaw::Custom(_)) {
                    routes.insert(0, Route::Closed);
                }
                routes
            }
            ProcessSpec::LevySubordinator { exponent, .. } => {
                let mut routes = vec![Route::Closed];
                if matches!(
                    exponent,
                    LevyExponent::GammaProcess(_) | LevyExponent::BrownianDrift { .. }
                ) {
                    routes.push(Route::MonteCarlo);
                }
                routes
            }
        }
    }

    fn bdlp_mc_supported(&self, h: &BdlpHwSpec) -> bool {
        match &h.driver {
            LevyExponent::BrownianDrift { mu, .. } => *mu == 0.0,
            LevyExponent::GammaProcess(_) => h.as_gamma_ou().is_some(),
            _ => false,
        }
    }

    fn bdlp_samples(&self, h: &BdlpHwSpec, t: f64, ctx: &EvalContext) -> Result<Vec<f64>> {
        match &h.driver {
            // driftless Brownian driver: the Gaussian sampler applies with a
            // volatility rescaled by the driver's σ
            LevyExponent::BrownianDrift { mu, sigma } if *mu == 0.0 => {
                let coeffs = GaussianCoeffs::new(
                    h.coeffs.alpha.clone(),
                    h.coeffs.beta.clone(),
                    scale_coefficient(&h.coeffs.sigma, *sigma)?,
                )?;
                let spec = GaussianProcessSpec::new(coeffs, h.s, h.lambda_s);
                montecarlo::sample_gaussian_integral(&spec, t, &ctx.mc, &ctx.quad)
            }
            LevyExponent::GammaProcess(p) => {
                let (_, beta) = h.as_gamma_ou().ok_or_else(|| self.unsupported(Route::MonteCarlo))?;
                montecarlo::sample_gamma_ou_integral(p, beta, h.lambda_s, h.s, t, &ctx.mc)
            }
            _ => Err(self.unsupported(Route::MonteCarlo)),
        }
    }

    fn unsupported(&self, route: Route) -> Error {
        Error::UnsupportedRoute {
            route: route.name(),
            family: self.family(),
        }
    }
}

impl BdlpHwSpec {
    /// Detects the gamma-OU shape `α ≡ 0`, constant `β > 0`, `σ ≡ 1`.
    pub fn as_gamma_ou(&self) -> Option<(GammaLawParams, f64)> {
        let LevyExponent::GammaProcess(p) = &self.driver else {
            return None;
        };
        if !self.coeffs.alpha.is_identically_zero() {
            return None;
        }
        let CoefficientFn::Constant(beta) = &self.coeffs.beta else {
            return None;
        };
        let CoefficientFn::Constant(sigma) = &self.coeffs.sigma else {
            return None;
        };
        if *beta > 0.0 && *sigma == 1.0 {
            Some((*p, *beta))
        } else {
            None
        }
    }
}

fn gamma_ou_as_hw(params: &GammaLawParams, beta: f64, s: f64, lambda_s: f64) -> Result<BdlpHwSpec> {
    Ok(BdlpHwSpec::new(
        GaussianCoeffs::new(
            CoefficientFn::constant(0.0),
            CoefficientFn::constant(beta),
            CoefficientFn::constant(1.0),
        )?,
        LevyExponent::GammaProcess(*params),
        s,
        lambda_s,
    ))
}

fn scale_coefficient(f: &CoefficientFn, factor: f64) -> Result<CoefficientFn> {
    if factor == 1.0 {
        return Ok(f.clone());
    }
    Ok(match f {
        CoefficientFn::Constant(c) => CoefficientFn::Constant(c * factor),
        CoefficientFn::PiecewiseConstant {
            breakpoints,
            values,
        } => CoefficientFn::PiecewiseConstant {
            breakpoints: breakpoints.clone(),
            values: values.iter().map(|v| v * factor).collect(),
        },
        CoefficientFn::Polynomial {
            breakpoints,
            pieces,
        } => CoefficientFn::Polynomial {
            breakpoints: breakpoints.clone(),
            pieces: pieces
                .iter()
                .map(|p| p.iter().map(|c| c * factor).collect())
                .collect(),
        },
        CoefficientFn::LinearDecay { slope, horizon } => CoefficientFn::LinearDecay {
            slope: slope * factor,
            horizon: *horizon,
        },
        CoefficientFn::SampledGrid { times, values } => CoefficientFn::SampledGrid {
            times: times.clone(),
            values: values.iter().map(|v| v * factor).collect(),
        },
        CoefficientFn::RationalOneOverTMinus { .. } => {
            return Err(Error::invalid(
                "sigma",
                "cannot rescale a rational coefficient; fold the driver volatility into σ(t)",
            ))
        }
    })
}

/// Exact increment samplers for `Λ` modeled directly as a Lévy process.
fn subordinator_samples(exponent: &LevyExponent, tau: f64, mc: &McConfig) -> Result<Vec<f64>> {
    use rand_distr::{Distribution, Gamma, StandardNormal};
    use rayon::prelude::*;

    if tau < 0.0 {
        return Err(Error::invalid("t", "need t >= s"));
    }
    match exponent {
        LevyExponent::GammaProcess(p) => {
            let dist = Gamma::new(p.alpha * tau, 1.0 / p.kappa)
                .map_err(|e| Error::invalid("gamma", e.to_string()))?;
            Ok((0..mc.n_paths)
                .into_par_iter()
                .map(|path| {
                    let mut rng = montecarlo::CounterRng::new(mc.seed, path as u64);
                    dist.sample(&mut rng)
                })
                .collect())
        }
        LevyExponent::BrownianDrift { mu, sigma } => {
            let scale = sigma * tau.sqrt();
            Ok((0..mc.n_paths)
                .into_par_iter()
                .map(|path| {
                    let mut rng = montecarlo::CounterRng::new(mc.seed, path as u64);
                    let z: f64 = StandardNormal.sample(&mut rng);
                    mu * tau + scale * z
                })
                .collect())
        }
        _ => Err(Error::UnsupportedRoute {
            route: "mc",
            family: "levy_subordinator",
        }),
    }
}

/// Complex-valued empirical transform mean (pairwise over fixed order).
fn complex_transform_mean(samples: &[f64], x: Complex64) -> Complex64 {
    let re: Vec<f64> = samples.iter().map(|&l| (-x * l).exp().re).collect();
    let im: Vec<f64> = samples.iter().map(|&l| (-x * l).exp().im).collect();
    Complex64::new(
        montecarlo::pairwise_sum(&re) / samples.len() as f64,
        montecarlo::pairwise_sum(&im) / samples.len() as f64,
    )
}
