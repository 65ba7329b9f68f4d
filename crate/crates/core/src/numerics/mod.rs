//! Numerical substrate: complex arithmetic, special functions, and adaptive
//! quadrature for complex-valued integrands.

mod dilog;
mod gamma_law;
mod quadrature;

pub use dilog::li2;
pub use gamma_law::{
    gamma_exponent, gamma_exponent_checked, gamma_laplace, gamma_laplace_checked, GammaLawParams,
};
pub use num_complex::Complex64;
pub use quadrature::{
    integrate_1d, integrate_1d_checked, integrate_nested, QuadResult, QuadratureConfig,
};

pub(crate) use quadrature::integrate_real;
