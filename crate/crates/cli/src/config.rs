//! Declarative run configuration: one process family, task parameters,
//! numeric budgets, and output paths, in a flat TOML file. Times are in
//! years, rates per year.

use serde::Deserialize;

use pathlap::coeffs::{CoefficientFn, GaussianCoeffs};
use pathlap::cpoisson::{CompoundPoissonSpec, JumpLaw};
use pathlap::finance::CalibrationFamily;
use pathlap::gaussian::GaussianProcessSpec;
use pathlap::levy::{BdlpHwSpec, LevyExponent};
use pathlap::montecarlo::{McConfig, McScheme};
use pathlap::numerics::{GammaLawParams, QuadratureConfig};
use pathlap::process::{EvalContext, ProcessSpec, Route};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub process: ProcessConfig,
    #[serde(default)]
    pub task: TaskConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    pub fn spec(&self) -> Result<ProcessSpec, CliError> {
        self.process.build()
    }

    pub fn context(&self, seed_override: Option<u64>) -> Result<EvalContext, CliError> {
        let n = &self.numerics;
        let quad = QuadratureConfig::new(n.abs_tol, n.rel_tol, n.max_subdivisions)
            .map_err(config_err)?;
        let scheme = match n.mc.scheme.as_str() {
            "exact_gaussian_step" => McScheme::ExactGaussianStep,
            "euler" => McScheme::Euler,
            "exact_jumps" => McScheme::ExactJumps,
            other => {
                return Err(CliError::Config(format!(
                    "unknown mc scheme {other:?}; expected exact_gaussian_step | euler | exact_jumps"
                )))
            }
        };
        let mc = McConfig::new(
            n.mc.n_paths,
            n.mc.n_steps,
            seed_override.unwrap_or(n.mc.seed),
            scheme,
        )
        .map_err(config_err)?;
        Ok(EvalContext {
            quad,
            mc,
            series_n_max: n.series_n_max,
            series_tol: n.series_tol,
        })
    }
}

fn config_err(e: pathlap::Error) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub family: String,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub lambda_s: f64,
    pub coefficients: Option<CoefficientsConfig>,
    pub driver: Option<DriverConfig>,
    pub theta: Option<f64>,
    pub jump: Option<JumpConfig>,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl ProcessConfig {
    pub fn build(&self) -> Result<ProcessSpec, CliError> {
        match self.family.as_str() {
            "gaussian" => {
                let coeffs = self.require_coefficients()?;
                Ok(ProcessSpec::Gaussian(GaussianProcessSpec::new(
                    coeffs,
                    self.s,
                    self.lambda_s,
                )))
            }
            "bdlp_hull_white" => {
                let coeffs = self.require_coefficients()?;
                let driver = self.require_driver()?;
                Ok(ProcessSpec::BdlpHullWhite(BdlpHwSpec::new(
                    coeffs,
                    driver,
                    self.s,
                    self.lambda_s,
                )))
            }
            "integrated_levy" => Ok(ProcessSpec::IntegratedLevy {
                driver: self.require_driver()?,
                s: self.s,
                lambda_s: self.lambda_s,
            }),
            "gamma_ou" => {
                let kappa = self.require("kappa", self.kappa)?;
                let alpha = self.require("alpha", self.alpha)?;
                let beta = self.require("beta", self.beta)?;
                Ok(ProcessSpec::GammaOu {
                    params: GammaLawParams::new(kappa, alpha).map_err(config_err)?,
                    beta,
                    s: self.s,
                    lambda_s: self.lambda_s,
                })
            }
            "compound_poisson" => {
                let theta = self.require("theta", self.theta)?;
                let jump = self
                    .jump
                    .as_ref()
                    .ok_or_else(|| self.missing("jump"))?
                    .build()?;
                Ok(ProcessSpec::CompoundPoisson(
                    CompoundPoissonSpec::new(theta, jump, self.s, self.lambda_s)
                        .map_err(config_err)?,
                ))
            }
            "levy_subordinator" => Ok(ProcessSpec::LevySubordinator {
                exponent: self.require_driver()?,
                s: self.s,
            }),
            other => Err(CliError::Config(format!(
                "unknown process family {other:?}; expected gaussian | bdlp_hull_white | \
                 integrated_levy | gamma_ou | compound_poisson | levy_subordinator"
            ))),
        }
    }

    fn require<T>(&self, name: &str, v: Option<T>) -> Result<T, CliError> {
        v.ok_or_else(|| self.missing(name))
    }

    fn missing(&self, name: &str) -> CliError {
        CliError::Config(format!(
            "process family {:?} requires the `{name}` field",
            self.family
        ))
    }

    fn require_coefficients(&self) -> Result<GaussianCoeffs, CliError> {
        let c = self
            .coefficients
            .as_ref()
            .ok_or_else(|| self.missing("coefficients"))?;
        GaussianCoeffs::new(c.alpha.build()?, c.beta.build()?, c.sigma.build()?)
            .map_err(config_err)
    }

    fn require_driver(&self) -> Result<LevyExponent, CliError> {
        self.driver
            .as_ref()
            .ok_or_else(|| self.missing("driver"))?
            .build()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    pub alpha: CoeffConfig,
    pub beta: CoeffConfig,
    pub sigma: CoeffConfig,
}

/// One coefficient function: variant name + parameter list.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffConfig {
    Constant { value: f64 },
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    Polynomial {
        #[serde(default)]
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
    },
    RationalOneOverTMinus { horizon: f64 },
    LinearDecay { slope: f64, horizon: f64 },
    SampledGrid { times: Vec<f64>, values: Vec<f64> },
}

impl CoeffConfig {
    pub fn build(&self) -> Result<CoefficientFn, CliError> {
        let f = match self {
            CoeffConfig::Constant { value } => CoefficientFn::constant(*value),
            CoeffConfig::PiecewiseConstant {
                breakpoints,
                values,
            } => CoefficientFn::piecewise_constant(breakpoints.clone(), values.clone())
                .map_err(config_err)?,
            CoeffConfig::Polynomial {
                breakpoints,
                pieces,
            } => CoefficientFn::polynomial(breakpoints.clone(), pieces.clone())
                .map_err(config_err)?,
            CoeffConfig::RationalOneOverTMinus { horizon } => {
                CoefficientFn::RationalOneOverTMinus { horizon: *horizon }
            }
            CoeffConfig::LinearDecay { slope, horizon } => CoefficientFn::LinearDecay {
                slope: *slope,
                horizon: *horizon,
            },
            CoeffConfig::SampledGrid { times, values } => {
                CoefficientFn::sampled_grid(times.clone(), values.clone()).map_err(config_err)?
            }
        };
        Ok(f)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverConfig {
    Brownian { mu: f64, sigma: f64 },
    Gamma { kappa: f64, alpha: f64 },
    CompoundPoisson { theta: f64, jump: JumpConfig },
    VarianceGamma { kappa: f64, alpha: f64 },
}

impl DriverConfig {
    pub fn build(&self) -> Result<LevyExponent, CliError> {
        match self {
            DriverConfig::Brownian { mu, sigma } => {
                LevyExponent::brownian(*mu, *sigma).map_err(config_err)
            }
            DriverConfig::Gamma { kappa, alpha } => Ok(LevyExponent::GammaProcess(
                GammaLawParams::new(*kappa, *alpha).map_err(config_err)?,
            )),
            DriverConfig::CompoundPoisson { theta, jump } => {
                LevyExponent::compound_poisson(*theta, jump.build()?).map_err(config_err)
            }
            DriverConfig::VarianceGamma { kappa, alpha } => Ok(LevyExponent::VarianceGamma(
                GammaLawParams::new(*kappa, *alpha).map_err(config_err)?,
            )),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpConfig {
    Exponential { kappa: f64 },
    Gamma { kappa: f64, alpha: f64 },
}

impl JumpConfig {
    pub fn build(&self) -> Result<JumpLaw, CliError> {
        match self {
            JumpConfig::Exponential { kappa } => JumpLaw::exponential(*kappa).map_err(config_err),
            JumpConfig::Gamma { kappa, alpha } => Ok(JumpLaw::gamma(
                GammaLawParams::new(*kappa, *alpha).map_err(config_err)?,
            )),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub eval: Option<EvalTask>,
    pub verify: Option<VerifyTask>,
    pub price: Option<PriceTask>,
    pub survival: Option<SurvivalTask>,
    pub calibrate: Option<CalibrateTask>,
    pub invert: Option<InvertTask>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalTask {
    pub t: f64,
    pub x_grid: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTask {
    pub t: f64,
    pub x_grid: Vec<f64>,
    /// Analytic-vs-analytic tolerance (closed vs quadrature).
    #[serde(default = "default_verify_tol")]
    pub tolerance: f64,
    /// Tolerance against the truncated series route.
    #[serde(default = "default_series_verify_tol")]
    pub series_tolerance: f64,
    /// Skip the Monte Carlo column entirely.
    #[serde(default)]
    pub skip_mc: bool,
}

fn default_verify_tol() -> f64 {
    1e-8
}
fn default_series_verify_tol() -> f64 {
    1e-6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceTask {
    pub maturities: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalTask {
    pub t: f64,
    pub tenors: Vec<f64>,
    /// Conditioning states λ_t; one output curve per state.
    pub states: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateTask {
    pub family: String,
    pub curve_file: String,
    pub bounds: Vec<(f64, f64)>,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_cal_seed")]
    pub seed: u64,
}

fn default_starts() -> usize {
    8
}
fn default_cal_seed() -> u64 {
    7
}

impl CalibrateTask {
    pub fn family(&self) -> Result<CalibrationFamily, CliError> {
        match self.family.as_str() {
            "vasicek_ou" => Ok(CalibrationFamily::VasicekOu),
            "compound_poisson_exp" => Ok(CalibrationFamily::CompoundPoissonExp),
            "gamma_ou" => Ok(CalibrationFamily::GammaOu),
            "constant_rate" => Ok(CalibrationFamily::ConstantRate),
            other => Err(CliError::Config(format!(
                "unknown calibration family {other:?}; expected vasicek_ou | \
                 compound_poisson_exp | gamma_ou | constant_rate"
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertTask {
    pub t: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    /// Remove the zero-jump atom analytically (compound Poisson only).
    #[serde(default)]
    pub remove_atom: bool,
    pub u_max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_subdivisions")]
    pub max_subdivisions: usize,
    #[serde(default = "default_series_n_max")]
    pub series_n_max: usize,
    #[serde(default = "default_series_tol")]
    pub series_tol: f64,
    #[serde(default)]
    pub mc: McSection,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty numerics section has full defaults")
    }
}

fn default_abs_tol() -> f64 {
    1e-11
}
fn default_rel_tol() -> f64 {
    1e-11
}
fn default_max_subdivisions() -> usize {
    400
}
fn default_series_n_max() -> usize {
    40
}
fn default_series_tol() -> f64 {
    1e-10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_scheme")]
    pub scheme: String,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            n_paths: default_n_paths(),
            n_steps: default_n_steps(),
            seed: default_seed(),
            scheme: default_scheme(),
        }
    }
}

fn default_n_paths() -> usize {
    200_000
}
fn default_n_steps() -> usize {
    1
}
fn default_seed() -> u64 {
    42
}
fn default_scheme() -> String {
    "exact_gaussian_step".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
        }
    }
}

fn default_out_dir() -> String {
    "out".into()
}

/// `--route` flag values.
pub fn parse_route(name: &str) -> Result<Route, CliError> {
    match name {
        "auto" => Ok(Route::Auto),
        "closed" => Ok(Route::Closed),
        "quad" => Ok(Route::Quadrature),
        "series" => Ok(Route::Series),
        "mc" => Ok(Route::MonteCarlo),
        other => Err(CliError::Config(format!(
            "unknown route {other:?}; expected auto | closed | quad | series | mc"
        ))),
    }
}
