//! Characteristic exponents of Lévy drivers and of integrals built on them.
//!
//! The exponent convention is `ψ_X(x) = ln E[exp(ix X_1)]`, i.e.
//! `ψ_X(x) = ixμ − σ²x²/2 + ∫(e^{ixz} − 1 − ixz 1_{|z|<1}) ν(dz)`, so that
//! `exp(ψ)` is a genuine characteristic function (negative-definite Gaussian
//! term). Laplace transforms follow as `ln φ(x) = ψ(ix)`.
//!
//! Three layers are provided:
//! * [`psi_stochastic_integral`] — the exponent of `∫ σ(u) dX_u`,
//!   `ψ_Y(x) = ∫_s^t ψ_X(σ(u)x) du`.
//! * [`psi_integrated_hw`] — the exponent of `Λ_{s,t}` for a Hull-White
//!   process driven by a Lévy process, `ixM(s,t) + ∫ ψ_X(x·K(u,t)) du`.
//! * [`psi_integrated_levy`] — the integrated-Lévy special case
//!   `ixλ_s(t−s) + ∫ ψ_λ(x(t−u)) du`.
//!
//! The gamma-OU case admits a dilogarithm closed form
//! ([`gamma_ou_closed_form`]), cross-validated against the quadrature route.

use num_complex::Complex64;

use crate::coeffs::{big_k, CoefficientFn, GaussianCoeffs};
use crate::cpoisson::JumpLaw;
use crate::error::{Error, Result};
use crate::gaussian::{integral_mean, GaussianProcessSpec};
use crate::numerics::{gamma_exponent, integrate_1d_checked, li2, GammaLawParams, QuadratureConfig};

/// A Lévy driver through its characteristic exponent.
#[derive(Debug, Clone)]
pub enum LevyExponent {
    /// `ψ(x) = iμx − σ²x²/2`.
    BrownianDrift { mu: f64, sigma: f64 },
    /// Gamma subordinator with rate κ and shape α (per unit time).
    GammaProcess(GammaLawParams),
    /// Finite-activity jumps: `ψ(x) = θ(E[e^{ixZ}] − 1)`.
    CompoundPoisson { theta: f64, jump: JumpLaw },
    /// Variance-gamma process as a gamma-subordinated Brownian motion:
    /// `ψ(x) = ψ_γ(ix²/2)`.
    VarianceGamma(GammaLawParams),
}

impl LevyExponent {
    pub fn brownian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::invalid("sigma", "must be >= 0"));
        }
        Ok(LevyExponent::BrownianDrift { mu, sigma })
    }

    pub fn compound_poisson(theta: f64, jump: JumpLaw) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::invalid("theta", "intensity must be > 0"));
        }
        Ok(LevyExponent::CompoundPoisson { theta, jump })
    }

    /// Characteristic exponent at a complex argument.
    pub fn psi(&self, x: Complex64) -> Complex64 {
        if x.re == 0.0 && x.im == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            LevyExponent::BrownianDrift { mu, sigma } => {
                Complex64::i() * x * *mu - 0.5 * sigma * sigma * x * x
            }
            LevyExponent::GammaProcess(p) => gamma_exponent(x, p),
            LevyExponent::CompoundPoisson { theta, jump } => {
                // E[e^{ixZ}] is the jump Laplace transform at −ix
                *theta * (jump.laplace(-Complex64::i() * x) - 1.0)
            }
            LevyExponent::VarianceGamma(p) => {
                gamma_exponent(Complex64::i() * x * x * 0.5, p)
            }
        }
    }

    /// Poles of the exponent in the complex argument plane (empty when the
    /// exponent is entire or the law is opaque).
    pub fn poles(&self) -> Vec<Complex64> {
        match self {
            LevyExponent::BrownianDrift { .. } => vec![],
            LevyExponent::GammaProcess(p) => vec![Complex64::new(0.0, -p.kappa)],
            LevyExponent::CompoundPoisson { jump, .. } => jump
                .laplace_poles()
                .into_iter()
                .map(|y| Complex64::i() * y)
                .collect(),
            LevyExponent::VarianceGamma(p) => {
                let r = (2.0 * p.kappa).sqrt();
                vec![Complex64::new(0.0, r), Complex64::new(0.0, -r)]
            }
        }
    }

    /// Rejects an argument path that passes within `1e−6·|pole|` of a pole;
    /// quadrature across a pole would silently cross a branch cut.
    pub fn check_path<F: Fn(f64) -> Complex64>(&self, arg_at: F) -> Result<()> {
        let poles = self.poles();
        if poles.is_empty() {
            return Ok(());
        }
        const SAMPLES: usize = 64;
        for k in 0..=SAMPLES {
            let y = arg_at(k as f64 / SAMPLES as f64);
            for pole in &poles {
                let threshold = 1e-6 * pole.norm();
                let distance = (y - pole).norm();
                if distance < threshold {
                    return Err(Error::PoleProximity {
                        distance,
                        threshold,
                        pole_re: pole.re,
                        pole_im: pole.im,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Hull-White SDE `dλ_t = (α(t) − β(t)λ_t)dt + σ(t)dX_t` with a Lévy driver.
#[derive(Debug, Clone)]
pub struct BdlpHwSpec {
    pub coeffs: GaussianCoeffs,
    pub driver: LevyExponent,
    pub s: f64,
    pub lambda_s: f64,
}

impl BdlpHwSpec {
    pub fn new(coeffs: GaussianCoeffs, driver: LevyExponent, s: f64, lambda_s: f64) -> Self {
        Self {
            coeffs,
            driver,
            s,
            lambda_s,
        }
    }
}

/// Exponent of the stochastic integral `Y_{s,t} = ∫_s^t σ(u) dX_u`:
/// `ψ_Y(x) = ∫_s^t ψ_X(σ(u) x) du`.
pub fn psi_stochastic_integral(
    driver: &LevyExponent,
    sigma_fn: &CoefficientFn,
    s: f64,
    t: f64,
    x: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if x.re == 0.0 && x.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    driver.check_path(|frac| {
        let u = s + frac * (t - s);
        sigma_fn.eval(u).map(|sig| sig * x).unwrap_or(x)
    })?;
    let bad = std::cell::RefCell::new(None::<Error>);
    let v = integrate_1d_checked(
        |u| match sigma_fn.eval(u) {
            Ok(sig) => driver.psi(sig * x),
            Err(e) => {
                bad.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        s,
        t,
        sigma_fn.breakpoints(),
        cfg,
    );
    if let Some(e) = bad.into_inner() {
        return Err(e);
    }
    v
}

/// Exponent of the integrated Lévy-driven Hull-White process:
/// `ψ_Λ(x) = ixM(s,t) + ∫_s^t ψ_X(x·K(u,t)) du` with `K(u,t) =
/// σ(u)∫_u^t G(u,v)dv` and `M` the Gaussian-case mean (the drift
/// contribution is identical across drivers).
pub fn psi_integrated_hw(
    spec: &BdlpHwSpec,
    t: f64,
    x: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if x.re == 0.0 && x.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mean_spec = GaussianProcessSpec::new(spec.coeffs.clone(), spec.s, spec.lambda_s);
    let mean = integral_mean(&mean_spec, t, cfg)?;

    let inner_cfg = cfg.inner();
    let kernel = |u: f64| big_k(&spec.coeffs, u, t, &inner_cfg);
    spec.driver.check_path(|frac| {
        let u = spec.s + frac * (t - spec.s);
        kernel(u).map(|k| k * x).unwrap_or(x)
    })?;

    let bad = std::cell::RefCell::new(None::<Error>);
    let integral = integrate_1d_checked(
        |u| match kernel(u) {
            Ok(k) => spec.driver.psi(k * x),
            Err(e) => {
                bad.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        spec.s,
        t,
        &spec.coeffs.all_breakpoints(),
        cfg,
    );
    if let Some(e) = bad.into_inner() {
        return Err(e);
    }
    Ok(Complex64::i() * x * mean + integral?)
}

/// Exponent of an integrated Lévy process (`λ` itself Lévy, conditioned on
/// `λ_s`): `ψ_Λ(x) = ixλ_s(t−s) + ∫_s^t ψ_λ(x(t−u)) du`.
pub fn psi_integrated_levy(
    driver: &LevyExponent,
    lambda_s: f64,
    s: f64,
    t: f64,
    x: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if x.re == 0.0 && x.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tau = t - s;
    if tau < 0.0 {
        return Err(Error::invalid("t", "need t >= s"));
    }
    driver.check_path(|frac| x * (frac * tau))?;
    let integral = integrate_1d_checked(|w| driver.psi(x * w), 0.0, tau, &[], cfg)?;
    Ok(Complex64::i() * x * (lambda_s * tau) + integral)
}

/// Dilogarithm closed form of the integrated gamma-OU exponent
/// (`dλ_t = −βλ_t dt + dγ_t`):
///
/// ```text
/// ψ_Λ(x) = ixλ_s(1−e^{−βτ})/β + τ·ψ_γ(x/β) + (α/β)(Li2(v₂) − Li2(v₁))
/// v₂ = −ix/(κβ − ix),  v₁ = v₂ e^{−βτ}
/// ```
///
/// The sign of the dilogarithm difference is pinned by the quadrature route
/// of [`psi_integrated_hw`]; the two agree to the quadrature tolerance.
pub fn gamma_ou_closed_form(
    p: &GammaLawParams,
    beta: f64,
    lambda_s: f64,
    s: f64,
    t: f64,
    x: Complex64,
) -> Result<Complex64> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", "must be > 0"));
    }
    if x.re == 0.0 && x.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tau = t - s;
    if tau < 0.0 {
        return Err(Error::invalid("t", "need t >= s"));
    }
    let xp = Complex64::i() * x;
    let denom = Complex64::new(p.kappa * beta, 0.0) - xp;
    let threshold = 1e-6 * p.kappa * beta;
    if denom.norm() < threshold {
        return Err(Error::PoleProximity {
            distance: denom.norm(),
            threshold,
            pole_re: 0.0,
            pole_im: -p.kappa * beta,
        });
    }
    let decay = (-beta * tau).exp();
    let v2 = -xp / denom;
    let v1 = v2 * decay;
    let head = Complex64::i() * x * (lambda_s * (1.0 - decay) / beta);
    Ok(head + tau * gamma_exponent(x / beta, p) + (p.alpha / beta) * (li2(v2) - li2(v1)))
}

/// Variance-gamma exponent `ψ_λ(x) = ψ_γ(ix²/2; κ, α)`, equal to the sum of
/// the exponents of two opposite gamma processes with parameters
/// `(√(2κ), α)`.
pub fn variance_gamma_exponent(p: &GammaLawParams, x: Complex64) -> Complex64 {
    LevyExponent::VarianceGamma(*p).psi(x)
}
