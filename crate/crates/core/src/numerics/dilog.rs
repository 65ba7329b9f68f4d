//! Complex dilogarithm `Li2(z) = −∫_0^z ln(1−u)/u du` on the principal
//! branch (cut along the real axis for z > 1).
//!
//! Evaluation strategy, uniform to ~1e−14 relative accuracy:
//! * `|z| ≤ 0.5`: direct power series `Σ z^k / k²`.
//! * `|z| > 1`: inversion identity onto `1/z`.
//! * `Re z > 0.5`, `|z| ≤ 1`: reflection onto `1 − z`.
//! * remaining annulus: Bernoulli series in `w = −ln(1−z)`, which converges
//!   fast there because `|w| < 2π` stays well away from its radius.
//!
//! The Landen identity is kept as a tested invariant rather than an
//! evaluation path; it does not contract the hard annulus near `|z| = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

const PI2_6: f64 = PI * PI / 6.0;

// Even-index Bernoulli numbers B_2 .. B_30 (odd ones vanish past B_1).
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Principal-branch complex dilogarithm.
///
/// ```
/// use pathlap::numerics::{li2, Complex64};
///
/// let basel = li2(Complex64::new(1.0, 0.0));
/// assert!((basel.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
/// ```
pub fn li2(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.im == 0.0 && z.re == 1.0 {
        return Complex64::new(PI2_6, 0.0);
    }

    let r = z.norm();
    if r > 1.0 {
        // Li2(z) + Li2(1/z) = −π²/6 − ln²(−z)/2
        let lnmz = (-z).ln();
        return -Complex64::new(PI2_6, 0.0) - 0.5 * lnmz * lnmz - li2(z.inv());
    }
    if z.re > 0.5 {
        // Li2(z) + Li2(1−z) = π²/6 − ln(z)ln(1−z)
        let omz = Complex64::new(1.0, 0.0) - z;
        return Complex64::new(PI2_6, 0.0) - z.ln() * omz.ln() - li2(omz);
    }
    if r <= 0.5 {
        return series(z);
    }
    bernoulli_series(z)
}

/// Direct series Σ z^k/k², for |z| ≤ 0.5.
fn series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=80 {
        zk *= z;
        let term = zk / ((k * k) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Bernoulli series in w = −ln(1−z): Li2(z) = Σ_n B_n w^{n+1}/(n+1)!.
fn bernoulli_series(z: Complex64) -> Complex64 {
    let w = -(Complex64::new(1.0, 0.0) - z).ln();
    // n = 0 and n = 1 terms (B_0 = 1, B_1 = −1/2), then even n only
    let mut sum = w - w * w * 0.25;
    let w2 = w * w;
    let mut wpow = w; // w^{n+1} for n = 0
    let mut factorial = 1.0; // (n+1)! running value
    let mut n = 0usize;
    for &b in BERNOULLI_EVEN.iter() {
        // advance from n to n+2
        wpow *= w2;
        factorial *= ((n + 2) * (n + 3)) as f64;
        n += 2;
        let term = wpow * (b / factorial);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}
