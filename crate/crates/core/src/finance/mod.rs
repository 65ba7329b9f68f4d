//! Financial applications: zero-coupon bond pricing, conditional survival
//! curves, Fourier inversion of transforms to distributions, and calibration
//! of process parameters to an observed discount curve.

mod calibration;
mod inversion;

pub use calibration::{
    calibrate, CalibrationFamily, CalibrationReport, CalibrationSetup,
};
pub use inversion::{invert_distribution, Atom, InversionOptions, InversionResult};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::process::{EvalContext, ProcessSpec, Route};

/// An observed discount curve `T ↦ B(0,T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountCurve {
    pub maturities: Vec<f64>,
    pub discounts: Vec<f64>,
}

impl DiscountCurve {
    pub fn new(maturities: Vec<f64>, discounts: Vec<f64>) -> Result<Self> {
        if maturities.len() != discounts.len() || maturities.is_empty() {
            return Err(Error::invalid(
                "discount_curve",
                "need matching, nonempty maturity and discount columns",
            ));
        }
        if maturities.windows(2).any(|w| !(w[0] < w[1])) || maturities[0] <= 0.0 {
            return Err(Error::invalid(
                "maturities",
                "must be strictly increasing and positive",
            ));
        }
        if discounts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("discounts", "must be finite and > 0"));
        }
        Ok(Self {
            maturities,
            discounts,
        })
    }

    /// Gaussian short rates can legitimately discount above par; such
    /// curves are flagged, never clamped.
    pub fn has_super_unit_discounts(&self) -> bool {
        self.discounts.iter().any(|d| *d > 1.0)
    }

    /// Parses `maturity,discount` rows; a non-numeric first row is treated
    /// as a header. `#`-prefixed lines are comments.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut maturities = Vec::new();
        let mut discounts = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (a, b) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(m), Ok(d)) => {
                    maturities.push(m);
                    discounts.push(d);
                }
                _ if idx == 0 => continue, // header row
                _ => {
                    return Err(Error::invalid(
                        "discount_curve",
                        format!("line {} is not `maturity,discount`: {line:?}", idx + 1),
                    ))
                }
            }
        }
        Self::new(maturities, discounts)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("maturity,discount\n");
        for (m, d) in self.maturities.iter().zip(&self.discounts) {
            out.push_str(&format!("{m},{d}\n"));
        }
        out
    }
}

/// Conditional survival probabilities `δ ↦ S(t, t+δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub tenors: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl SurvivalCurve {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("tenor,probability\n");
        for (d, p) in self.tenors.iter().zip(&self.probabilities) {
            out.push_str(&format!("{d},{p}\n"));
        }
        out
    }
}

/// Zero-coupon bond price `B(0,T) = φ_{Λ_{0,T}}(1)` on the family's
/// analytic route (`s` is the process spec's conditioning time).
pub fn bond_price(spec: &ProcessSpec, maturity: f64, ctx: &EvalContext) -> Result<f64> {
    let phi = spec.laplace(maturity, Complex64::new(1.0, 0.0), Route::Auto, ctx)?;
    Ok(phi.re)
}

/// Survival curve conditional on the state `λ_t`:
/// `S(t, t+δ) = φ_{Λ_{t,t+δ}}(1)`.
pub fn survival_curve(
    spec: &ProcessSpec,
    t: f64,
    tenors: &[f64],
    lambda_t: f64,
    ctx: &EvalContext,
) -> Result<SurvivalCurve> {
    let conditioned = spec.condition(t, lambda_t)?;
    let mut probabilities = Vec::with_capacity(tenors.len());
    for &delta in tenors {
        if delta < 0.0 {
            return Err(Error::invalid("tenor", "must be >= 0"));
        }
        probabilities.push(bond_price(&conditioned, t + delta, ctx)?);
    }
    Ok(SurvivalCurve {
        tenors: tenors.to_vec(),
        probabilities,
    })
}
