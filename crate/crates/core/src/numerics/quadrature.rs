//! Globally adaptive Gauss-Kronrod quadrature for complex-valued integrands.
//!
//! Each panel is evaluated with the 15-point Kronrod rule and the embedded
//! 7-point Gauss rule; the difference drives the error estimate. Panels are
//! kept in a worst-first heap and bisected until the total estimated error
//! meets `max(abs_tol, rel_tol * |result|)` or the subdivision budget runs
//! out. Integrands are assumed smooth except at known breakpoints, which
//! callers inject as mandatory panel boundaries.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_subdivisions: 400,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be > 0"));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be > 0"));
        }
        if max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Config for the inner level of a nested integral: tolerances tightened
    /// by a factor of 10 so inner noise stays below the outer estimator.
    pub fn inner(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 10.0,
            rel_tol: self.rel_tol / 10.0,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Outcome of one adaptive integration: best estimate plus convergence flag.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub converged: bool,
    pub subdivisions: usize,
}

impl QuadResult {
    /// Converts a non-converged result into an error, keeping the estimate
    /// in the error payload.
    pub fn checked(self, cfg: &QuadratureConfig) -> Result<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureNonConvergence {
                subdivisions: self.subdivisions,
                abs_error: self.abs_error,
                target: cfg.abs_tol.max(cfg.rel_tol * self.value.norm()),
                estimate_re: self.value.re,
                estimate_im: self.value.im,
            })
        }
    }
}

// 15-point Kronrod abscissae on [0, 1] (symmetric about 0) with the embedded
// 7-point Gauss weights. Values are the standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One GK15 panel: Kronrod estimate and rescaled |Kronrod − Gauss| error.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = fc;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        let fsum = f1 + f2;
        kronrod += fsum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            // odd Kronrod indices are the embedded Gauss nodes
            gauss += fsum * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = 0.0;
    for j in 0..15 {
        let w = WGK[if j < 8 { j } else { 14 - j }];
        res_asc += w * (fv[j] - mean).norm();
    }

    let half_abs = half.abs();
    let err = (kronrod - gauss).norm() * half_abs;
    (
        kronrod * half,
        rescale_error(err, res_abs * half_abs, res_asc * half_abs),
    )
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive integral of a complex-valued function over `[a, b]`.
///
/// `breakpoints` lists interior abscissae (piecewise-coefficient knots) that
/// must coincide with panel boundaries; points outside `(a, b)` are ignored.
/// Returns the best estimate together with a convergence flag — callers that
/// must not proceed on a bad estimate go through [`integrate_1d_checked`].
pub fn integrate_1d<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            converged: true,
            subdivisions: 0,
        };
    }
    debug_assert!(a < b, "integration bounds must satisfy a <= b");

    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    for &p in breakpoints {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    let mut subdivisions = 0;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err <= target {
            return QuadResult {
                value: total,
                abs_error: total_err,
                converged: true,
                subdivisions,
            };
        }
        if subdivisions >= cfg.max_subdivisions {
            return QuadResult {
                value: total,
                abs_error: total_err,
                converged: false,
                subdivisions,
            };
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel collapsed to machine width; nothing more to gain
            return QuadResult {
                value: total,
                abs_error: total_err,
                converged: false,
                subdivisions,
            };
        }
        let (vl, el) = gk15(&f, worst.a, mid);
        let (vr, er) = gk15(&f, mid, worst.b);
        total += vl + vr - worst.value;
        total_err += el + er - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            error: el,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            error: er,
        });
        subdivisions += 1;
    }
}

/// As [`integrate_1d`] but converts a non-converged estimate into an error.
pub fn integrate_1d_checked<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    integrate_1d(f, a, b, breakpoints, cfg).checked(cfg)
}

/// Real-valued convenience wrapper used by the coefficient kernels.
pub(crate) fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    integrate_1d(|t| Complex64::new(f(t), 0.0), a, b, breakpoints, cfg)
        .checked(cfg)
        .map(|v| v.re)
}

/// Nested integral `∫_a^b wrap(u, ∫_u^b inner(u, v) dv) du`.
///
/// The outer integrand evaluates the inner integral with tolerances tightened
/// by a factor of 10, so the inner noise floor sits below the outer error
/// estimator. Inner non-convergence propagates.
pub fn integrate_nested<I, W>(
    inner: I,
    wrap: W,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Complex64>
where
    I: Fn(f64, f64) -> Complex64,
    W: Fn(f64, Complex64) -> Complex64,
{
    let inner_cfg = cfg.inner();
    let failure = std::cell::RefCell::new(None);
    let outer = integrate_1d(
        |u| {
            let res = integrate_1d(|v| inner(u, v), u, b, breakpoints, &inner_cfg);
            if !res.converged && failure.borrow().is_none() {
                *failure.borrow_mut() = Some(res.checked(&inner_cfg).unwrap_err());
            }
            wrap(u, res.value)
        },
        a,
        b,
        breakpoints,
        cfg,
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    outer.checked(cfg)
}
