use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use pathlap::cpoisson::{laplace_levy_route, laplace_series};
use pathlap::gaussian::laplace;
use pathlap::levy::{gamma_ou_closed_form, psi_integrated_hw, BdlpHwSpec, LevyExponent};
use pathlap::coeffs::{CoefficientFn, GaussianCoeffs};
use pathlap::montecarlo::{
    sample_cp_integral, sample_gaussian_integral, McConfig, McScheme,
};
use pathlap::numerics::{integrate_1d, li2, Complex64, QuadratureConfig};

use pathlap_bench::{cp_spec, gamma_params, ou_spec};

fn bench_quadrature(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    c.bench_function("quadrature_oscillatory", |b| {
        b.iter(|| {
            integrate_1d(
                |t| (Complex64::i() * (20.0 * t)).exp() / (1.0 + t * t),
                0.0,
                black_box(10.0),
                &[],
                &cfg,
            )
            .value
        })
    });
}

fn bench_li2(c: &mut Criterion) {
    c.bench_function("li2_annulus", |b| {
        b.iter(|| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..64 {
                let phase = k as f64 * 0.098;
                acc += li2(black_box(Complex64::new(
                    0.8 * phase.cos(),
                    0.8 * phase.sin(),
                )));
            }
            acc
        })
    });
}

fn bench_transforms(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let gaussian = ou_spec();
    c.bench_function("gaussian_laplace", |b| {
        b.iter(|| laplace(&gaussian, black_box(2.0), Complex64::new(1.0, 0.0), &cfg))
    });

    let p = gamma_params();
    c.bench_function("gamma_ou_closed_form", |b| {
        b.iter(|| gamma_ou_closed_form(&p, 1.0, 0.02, 0.0, black_box(2.0), Complex64::i()))
    });

    let hw = BdlpHwSpec::new(
        GaussianCoeffs::new(
            CoefficientFn::constant(0.0),
            CoefficientFn::constant(1.0),
            CoefficientFn::constant(1.0),
        )
        .unwrap(),
        LevyExponent::GammaProcess(p),
        0.0,
        0.02,
    );
    c.bench_function("gamma_ou_quadrature_route", |b| {
        b.iter(|| psi_integrated_hw(&hw, black_box(2.0), Complex64::i(), &cfg))
    });

    let cp = cp_spec();
    c.bench_function("cp_levy_route", |b| {
        b.iter(|| laplace_levy_route(&cp, black_box(2.0), Complex64::new(1.0, 0.0), &cfg))
    });
    c.bench_function("cp_series_40_terms", |b| {
        b.iter(|| laplace_series(&cp, black_box(2.0), Complex64::new(1.0, 0.0), 40, 1e-10))
    });
}

fn bench_sampling(c: &mut Criterion) {
    let quad = QuadratureConfig::default();
    let gaussian = ou_spec();
    let mc = McConfig::new(10_000, 1, 42, McScheme::ExactGaussianStep).unwrap();
    c.bench_function("gaussian_exact_step_10k_paths", |b| {
        b.iter(|| sample_gaussian_integral(&gaussian, black_box(1.0), &mc, &quad))
    });

    let cp = cp_spec();
    let mc = McConfig::new(10_000, 1, 42, McScheme::ExactJumps).unwrap();
    c.bench_function("cp_exact_jumps_10k_paths", |b| {
        b.iter(|| sample_cp_integral(&cp, black_box(1.0), &mc))
    });
}

criterion_group!(
    benches,
    bench_quadrature,
    bench_li2,
    bench_transforms,
    bench_sampling
);
criterion_main!(benches);
