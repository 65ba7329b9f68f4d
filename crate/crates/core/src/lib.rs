//! Laplace transforms and characteristic functions of integrated stochastic
//! processes `Λ_{s,t} = ∫_s^t λ_u du`.
//!
//! Supported families for the integrand process `λ`:
//!
//! * Gaussian SDE processes `dλ_t = (α(t) − β(t)λ_t)dt + σ(t)dW_t` with
//!   deterministic time-varying coefficients ([`gaussian`]).
//! * Lévy-driven Hull-White (BDLP-OU) processes, where the Brownian driver is
//!   replaced by a general Lévy process ([`levy`]).
//! * Integrated Lévy processes and gamma-OU processes ([`levy`]).
//! * Compound Poisson processes with i.i.d. or indexed jump laws ([`cpoisson`]).
//!
//! Every family offers up to three mutually cross-validating evaluation
//! routes: closed form, adaptive quadrature of the characteristic exponent,
//! and Monte Carlo simulation ([`montecarlo`]). Financial applications —
//! zero-coupon bond pricing, survival curves, Fourier inversion to
//! distributions, yield-curve calibration — live in [`finance`].
//!
//! # Conventions
//!
//! The canonical transform is the *Laplace* transform
//! `φ(x) = E[exp(−x Λ)]` for complex `x` with `Re(x) ≥ 0`. Characteristic
//! functions are derived as `φ_char(u) = φ(−iu)`; characteristic *exponents*
//! `ψ` (per-unit-time log characteristic functions of Lévy drivers) follow
//! the usual `ψ(x) = ln E[exp(ixX_1)]` convention, and the two are bridged by
//! `ln φ(x) = ψ_Λ(ix)`.

// quadrature node tables keep their published digits; `!(x > 0.0)`
// validations deliberately reject NaN; index loops mirror the weight-matrix
// algebra more directly than iterator chains would
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod coeffs;
pub mod cpoisson;
pub mod error;
pub mod finance;
pub mod gaussian;
pub mod levy;
pub mod montecarlo;
pub mod numerics;
pub mod process;

pub use coeffs::{CoefficientFn, GaussianCoeffs};
pub use cpoisson::{CompoundPoissonSpec, JumpLaw};
pub use error::{Error, Result};
pub use gaussian::{GaussianProcessSpec, NormalLaw};
pub use levy::{BdlpHwSpec, LevyExponent};
pub use montecarlo::{McConfig, McEstimate, McScheme};
pub use numerics::{Complex64, GammaLawParams, QuadratureConfig};
pub use process::{EvalContext, ProcessSpec, Route};
