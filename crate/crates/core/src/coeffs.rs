//! Deterministic time coefficients `α(t)`, `β(t)`, `σ(t)` of the linear SDE
//! `dλ_t = (α(t) − β(t)λ_t)dt + σ(t)dW_t`, and the derived kernels
//!
//! ```text
//! G(s,t) = exp(−∫_s^t β(u)du)
//! I(s,t) = ∫_s^t α(u) G(u,s) du
//! K(s,t) = σ(s) ∫_s^t G(s,u) du
//! ```
//!
//! Antiderivatives of every coefficient variant are exact, so `G` never
//! needs quadrature; `I` and `K` integrate smooth functions of exact `G`
//! values. Piecewise breakpoints are always injected into quadrature panel
//! boundaries to preserve the adaptive rule's convergence order.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{integrate_real, QuadratureConfig};

/// A deterministic coefficient function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientFn {
    /// `c`
    Constant(f64),
    /// `values[i]` on the i-th interval delimited by strictly increasing
    /// `breakpoints`; `values` has one more entry than `breakpoints` so the
    /// function is total.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Piecewise polynomial in `t` (coefficients in ascending degree), one
    /// coefficient array per interval; `pieces.len() == breakpoints.len()+1`.
    Polynomial {
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
    },
    /// `1/(T − t)`, only evaluable for `t < T` (Brownian-bridge drift rate).
    RationalOneOverTMinus { horizon: f64 },
    /// `γ(T − t)` (bridge drift level).
    LinearDecay { slope: f64, horizon: f64 },
    /// Linear interpolation through `(times[i], values[i])`; extrapolation
    /// outside the grid is an error, never a clamp.
    SampledGrid { times: Vec<f64>, values: Vec<f64> },
}

impl CoefficientFn {
    pub fn constant(c: f64) -> Self {
        CoefficientFn::Constant(c)
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let f = CoefficientFn::PiecewiseConstant {
            breakpoints,
            values,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn polynomial(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        let f = CoefficientFn::Polynomial {
            breakpoints,
            pieces,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn sampled_grid(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let f = CoefficientFn::SampledGrid { times, values };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientFn::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::invalid("constant", "must be finite"));
                }
            }
            CoefficientFn::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                check_strictly_increasing("breakpoints", breakpoints)?;
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::invalid(
                        "values",
                        format!(
                            "need breakpoints.len()+1 = {} values, got {}",
                            breakpoints.len() + 1,
                            values.len()
                        ),
                    ));
                }
            }
            CoefficientFn::Polynomial {
                breakpoints,
                pieces,
            } => {
                check_strictly_increasing("breakpoints", breakpoints)?;
                if pieces.len() != breakpoints.len() + 1 {
                    return Err(Error::invalid(
                        "pieces",
                        format!(
                            "need breakpoints.len()+1 = {} pieces, got {}",
                            breakpoints.len() + 1,
                            pieces.len()
                        ),
                    ));
                }
                if pieces.iter().any(|p| p.is_empty()) {
                    return Err(Error::invalid("pieces", "coefficient arrays must be nonempty"));
                }
            }
            CoefficientFn::RationalOneOverTMinus { horizon } => {
                if !horizon.is_finite() {
                    return Err(Error::invalid("horizon", "must be finite"));
                }
            }
            CoefficientFn::LinearDecay { slope, horizon } => {
                if !slope.is_finite() || !horizon.is_finite() {
                    return Err(Error::invalid("linear_decay", "parameters must be finite"));
                }
            }
            CoefficientFn::SampledGrid { times, values } => {
                check_strictly_increasing("times", times)?;
                if times.len() < 2 {
                    return Err(Error::invalid("times", "sampled grid needs at least 2 nodes"));
                }
                if values.len() != times.len() {
                    return Err(Error::invalid("values", "length must match times"));
                }
            }
        }
        Ok(())
    }

    /// Point evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            CoefficientFn::Constant(c) => Ok(*c),
            CoefficientFn::PiecewiseConstant {
                breakpoints,
                values,
            } => Ok(values[segment_index(breakpoints, t)]),
            CoefficientFn::Polynomial {
                breakpoints,
                pieces,
            } => Ok(poly_eval(&pieces[segment_index(breakpoints, t)], t)),
            CoefficientFn::RationalOneOverTMinus { horizon } => {
                if t >= *horizon {
                    return Err(Error::CoefficientSingularity {
                        t,
                        horizon: *horizon,
                    });
                }
                Ok(1.0 / (horizon - t))
            }
            CoefficientFn::LinearDecay { slope, horizon } => Ok(slope * (horizon - t)),
            CoefficientFn::SampledGrid { times, values } => {
                let (lo, hi) = (times[0], *times.last().unwrap());
                if t < lo || t > hi {
                    return Err(Error::GridExtrapolation { t, lo, hi });
                }
                let i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => return Ok(values[i]),
                    Err(i) => i - 1,
                };
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                Ok(values[i] * (1.0 - w) + values[i + 1] * w)
            }
        }
    }

    /// Exact `∫_a^b f(u) du` (sign-aware: swapping bounds negates).
    ///
    /// For the rational variant the integral may be `+∞` when `b` touches
    /// the singularity exactly — callers exponentiate `−∫β`, for which the
    /// limit `G = 0` is the correct value.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if a > b {
            return self.integral(b, a).map(|v| -v);
        }
        match self {
            CoefficientFn::Constant(c) => Ok(c * (b - a)),
            CoefficientFn::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut acc = 0.0;
                let mut lo = a;
                let mut i = segment_index(breakpoints, a);
                while lo < b {
                    let hi = if i < breakpoints.len() {
                        breakpoints[i].min(b)
                    } else {
                        b
                    };
                    let hi = hi.max(lo);
                    acc += values[i] * (hi - lo);
                    lo = hi;
                    i += 1;
                    if i > breakpoints.len() {
                        break;
                    }
                }
                Ok(acc)
            }
            CoefficientFn::Polynomial {
                breakpoints,
                pieces,
            } => {
                let mut acc = 0.0;
                let mut lo = a;
                let mut i = segment_index(breakpoints, a);
                while lo < b {
                    let hi = if i < breakpoints.len() {
                        breakpoints[i].min(b)
                    } else {
                        b
                    };
                    let hi = hi.max(lo);
                    acc += poly_integral(&pieces[i], lo, hi);
                    lo = hi;
                    i += 1;
                    if i > breakpoints.len() {
                        break;
                    }
                }
                Ok(acc)
            }
            CoefficientFn::RationalOneOverTMinus { horizon } => {
                if b > *horizon {
                    return Err(Error::CoefficientSingularity {
                        t: b,
                        horizon: *horizon,
                    });
                }
                // ∫_a^b du/(T−u) = ln(T−a) − ln(T−b); +∞ when b == T
                if b == *horizon {
                    return Ok(f64::INFINITY);
                }
                Ok(((horizon - a) / (horizon - b)).ln())
            }
            CoefficientFn::LinearDecay { slope, horizon } => {
                Ok(slope * (horizon * (b - a) - 0.5 * (b * b - a * a)))
            }
            CoefficientFn::SampledGrid { times, .. } => {
                let (lo_t, hi_t) = (times[0], *times.last().unwrap());
                if a < lo_t || b > hi_t {
                    return Err(Error::GridExtrapolation {
                        t: if a < lo_t { a } else { b },
                        lo: lo_t,
                        hi: hi_t,
                    });
                }
                // trapezoid rule is exact for the linear interpolant
                let mut acc = 0.0;
                let mut lo = a;
                let mut flo = self.eval(a)?;
                for (i, &tk) in times.iter().enumerate() {
                    if tk <= lo {
                        continue;
                    }
                    let hi = tk.min(b);
                    let fhi = self.eval(hi)?;
                    acc += 0.5 * (flo + fhi) * (hi - lo);
                    lo = hi;
                    flo = fhi;
                    if hi >= b || i + 1 == times.len() {
                        break;
                    }
                }
                if lo < b {
                    let fhi = self.eval(b)?;
                    acc += 0.5 * (flo + fhi) * (b - lo);
                }
                Ok(acc)
            }
        }
    }

    /// Interior knots that quadrature must honor as panel boundaries.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            CoefficientFn::PiecewiseConstant { breakpoints, .. } => breakpoints,
            CoefficientFn::Polynomial { breakpoints, .. } => breakpoints,
            CoefficientFn::SampledGrid { times, .. } => times,
            _ => &[],
        }
    }

    /// True when the function is the zero function by construction.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            CoefficientFn::Constant(c) => *c == 0.0,
            CoefficientFn::PiecewiseConstant { values, .. } => values.iter().all(|v| *v == 0.0),
            CoefficientFn::Polynomial { pieces, .. } => {
                pieces.iter().all(|p| p.iter().all(|c| *c == 0.0))
            }
            CoefficientFn::RationalOneOverTMinus { .. } => false,
            CoefficientFn::LinearDecay { slope, .. } => *slope == 0.0,
            CoefficientFn::SampledGrid { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }
}

fn check_strictly_increasing(name: &'static str, xs: &[f64]) -> Result<()> {
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(name, "must be strictly increasing"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(name, "must be finite"));
    }
    Ok(())
}

fn segment_index(breakpoints: &[f64], t: f64) -> usize {
    breakpoints.partition_point(|&b| b <= t)
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn poly_integral(coeffs: &[f64], a: f64, b: f64) -> f64 {
    // antiderivative Σ c_k t^{k+1}/(k+1), evaluated by Horner
    let anti = |t: f64| {
        let mut acc = 0.0;
        for (k, &c) in coeffs.iter().enumerate().rev() {
            acc = acc * t + c / (k as f64 + 1.0);
        }
        acc * t
    };
    anti(b) - anti(a)
}

/// The coefficient triple of one Gaussian SDE.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCoeffs {
    pub alpha: CoefficientFn,
    pub beta: CoefficientFn,
    pub sigma: CoefficientFn,
}

impl GaussianCoeffs {
    pub fn new(alpha: CoefficientFn, beta: CoefficientFn, sigma: CoefficientFn) -> Result<Self> {
        alpha.validate()?;
        beta.validate()?;
        sigma.validate()?;
        Ok(Self { alpha, beta, sigma })
    }

    /// All interior knots of the three coefficients, for panel injection.
    pub fn all_breakpoints(&self) -> Vec<f64> {
        let mut bp: Vec<f64> = self
            .alpha
            .breakpoints()
            .iter()
            .chain(self.beta.breakpoints())
            .chain(self.sigma.breakpoints())
            .copied()
            .collect();
        bp.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bp.dedup();
        bp
    }
}

/// `G(s,t) = exp(−∫_s^t β(u)du)`, extended by `G(s,t) = 1/G(t,s)` for
/// `s > t`. Strictly positive (zero only in the limit at a β-singularity).
pub fn big_g(c: &GaussianCoeffs, s: f64, t: f64) -> Result<f64> {
    Ok((-c.beta.integral(s, t)?).exp())
}

/// `I(s,t) = ∫_s^t α(u) G(u,s) du` by adaptive quadrature with exact `G`.
pub fn big_i(c: &GaussianCoeffs, s: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    debug_assert!(s <= t);
    if c.alpha.is_identically_zero() {
        return Ok(0.0);
    }
    let bad = RefCell::new(None::<Error>);
    let v = integrate_real(
        |u| match (c.alpha.eval(u), c.beta.integral(s, u)) {
            (Ok(a), Ok(bint)) => a * bint.exp(), // G(u,s) = exp(+∫_s^u β)
            (a, b) => {
                let e = a.err().or(b.err()).unwrap();
                bad.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        s,
        t,
        &c.all_breakpoints(),
        cfg,
    );
    if let Some(e) = bad.into_inner() {
        return Err(e);
    }
    v
}

/// `K(s,t) = σ(s) ∫_s^t G(s,u) du` — σ frozen at the lower bound, exactly
/// the kernel that appears as `K(u,t)` under an outer u-integral.
pub fn big_k(c: &GaussianCoeffs, s: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    debug_assert!(s <= t);
    let sigma_s = c.sigma.eval(s)?;
    if sigma_s == 0.0 {
        return Ok(0.0);
    }
    let bad = RefCell::new(None::<Error>);
    let integral = integrate_real(
        |u| match c.beta.integral(s, u) {
            Ok(bint) => (-bint).exp(),
            Err(e) => {
                bad.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        s,
        t,
        &c.all_breakpoints(),
        cfg,
    );
    if let Some(e) = bad.into_inner() {
        return Err(e);
    }
    Ok(sigma_s * integral?)
}

/// Memoizing evaluator for a running integral `u ↦ ∫_base^u f(w) dw`.
///
/// Quadrature drives `eval` at scattered nodes; each call integrates only
/// the increment from the nearest previously seen node, so a whole outer
/// integration costs O(total nodes) inner work instead of O(nodes²).
pub(crate) struct RunningIntegral<'a, F: Fn(f64) -> f64> {
    f: F,
    base: f64,
    breakpoints: &'a [f64],
    cfg: QuadratureConfig,
    cache: RefCell<BTreeMap<OrderedF64, f64>>,
}

impl<'a, F: Fn(f64) -> f64> RunningIntegral<'a, F> {
    pub fn new(f: F, base: f64, breakpoints: &'a [f64], cfg: &QuadratureConfig) -> Self {
        let mut cache = BTreeMap::new();
        cache.insert(OrderedF64(base), 0.0);
        Self {
            f,
            base,
            breakpoints,
            cfg: cfg.inner(),
            cache: RefCell::new(cache),
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        if u == self.base {
            return Ok(0.0);
        }
        if let Some(v) = self.cache.borrow().get(&OrderedF64(u)) {
            return Ok(*v);
        }
        // nearest cached node below u (the cache always holds `base`)
        let (anchor, anchor_val) = {
            let cache = self.cache.borrow();
            match cache.range(..=OrderedF64(u)).next_back() {
                Some((k, v)) => (k.0, *v),
                None => (self.base, 0.0),
            }
        };
        let inc = integrate_real(&self.f, anchor.min(u), anchor.max(u), self.breakpoints, &self.cfg)?;
        let v = anchor_val + if u >= anchor { inc } else { -inc };
        self.cache.borrow_mut().insert(OrderedF64(u), v);
        Ok(v)
    }
}

#[derive(PartialEq)]
pub(crate) struct OrderedF64(pub f64);

impl Eq for OrderedF64 {}
impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
