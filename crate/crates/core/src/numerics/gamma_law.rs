//! Gamma-law transforms in the shape-rate convention: rate `κ`, shape `α`,
//! density `κ^α z^{α−1} e^{−κz} / Γ(α)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rate/shape parameters of a gamma law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLawParams {
    /// rate κ > 0
    pub kappa: f64,
    /// shape α > 0
    pub alpha: f64,
}

impl GammaLawParams {
    pub fn new(kappa: f64, alpha: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::invalid("kappa", format!("rate must be > 0, got {kappa}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("shape must be > 0, got {alpha}")));
        }
        Ok(Self { kappa, alpha })
    }

    /// Exponential law as the shape-1 special case.
    pub fn exponential(kappa: f64) -> Result<Self> {
        Self::new(kappa, 1.0)
    }
}

/// Laplace transform `φ_γ(x; κ, α) = (κ/(κ+x))^α` via principal-branch
/// complex power, valid while `κ + x` stays off the closed negative reals.
pub fn gamma_laplace(x: Complex64, p: &GammaLawParams) -> Complex64 {
    let base = p.kappa / (Complex64::new(p.kappa, 0.0) + x);
    base.powf(p.alpha)
}

/// As [`gamma_laplace`] but rejecting arguments at or next to the pole
/// `κ + x = 0`.
pub fn gamma_laplace_checked(x: Complex64, p: &GammaLawParams) -> Result<Complex64> {
    let denom = Complex64::new(p.kappa, 0.0) + x;
    if denom.norm() < 1e-12 * p.kappa {
        return Err(Error::PoleProximity {
            distance: denom.norm(),
            threshold: 1e-12 * p.kappa,
            pole_re: -p.kappa,
            pole_im: 0.0,
        });
    }
    Ok(gamma_laplace(x, p))
}

/// Characteristic exponent `ψ_γ(x; κ, α) = α (ln κ − ln(κ − ix))`,
/// principal branch. For real x this is the log characteristic function of
/// the gamma law; for `x = i·y` with `Re(y) ≥ 0` it reproduces the Laplace
/// transform via `exp(ψ_γ(iy)) = φ_γ(y)`, and the argument `κ − ix = κ + y`
/// stays in the right half-plane so no branch jump can occur.
pub fn gamma_exponent(x: Complex64, p: &GammaLawParams) -> Complex64 {
    let denom = Complex64::new(p.kappa, 0.0) - Complex64::i() * x;
    p.alpha * (Complex64::new(p.kappa.ln(), 0.0) - denom.ln())
}

/// As [`gamma_exponent`] but rejecting arguments at or next to the pole
/// `κ − ix = 0` (i.e. `x = −iκ`).
pub fn gamma_exponent_checked(x: Complex64, p: &GammaLawParams) -> Result<Complex64> {
    let denom = Complex64::new(p.kappa, 0.0) - Complex64::i() * x;
    if denom.norm() < 1e-12 * p.kappa {
        return Err(Error::PoleProximity {
            distance: denom.norm(),
            threshold: 1e-12 * p.kappa,
            pole_re: 0.0,
            pole_im: -p.kappa,
        });
    }
    Ok(gamma_exponent(x, p))
}
