//! Shared fixtures for the benchmark suite.

use pathlap::coeffs::{CoefficientFn, GaussianCoeffs};
use pathlap::cpoisson::{CompoundPoissonSpec, JumpLaw};
use pathlap::gaussian::GaussianProcessSpec;
use pathlap::numerics::GammaLawParams;

pub fn ou_spec() -> GaussianProcessSpec {
    GaussianProcessSpec::new(
        GaussianCoeffs::new(
            CoefficientFn::constant(0.1),
            CoefficientFn::constant(1.2),
            CoefficientFn::constant(0.4),
        )
        .expect("constant coefficients are valid"),
        0.0,
        0.03,
    )
}

pub fn cp_spec() -> CompoundPoissonSpec {
    CompoundPoissonSpec::new(1.5, JumpLaw::exponential(2.0).expect("κ > 0"), 0.0, 0.02)
        .expect("valid spec")
}

pub fn gamma_params() -> GammaLawParams {
    GammaLawParams::new(1.0, 1.3).expect("valid gamma params")
}
