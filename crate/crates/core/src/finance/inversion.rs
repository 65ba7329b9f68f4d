//! Gil-Pelaez inversion of a characteristic function to a CDF:
//!
//! ```text
//! F(y) = 1/2 − (1/π) ∫_0^∞ Im(e^{−iuy} φ(u)) / u du
//! ```
//!
//! The u-range is truncated where `|φ|` falls below a decay cutoff (or at a
//! hard cap for slowly decaying transforms); the truncation point is
//! reported. `φ` is evaluated once on a composite Gauss-Kronrod grid and
//! reused across all grid points; panels double until the worst per-point
//! error estimate meets the tolerance. Families with an atom remove it
//! analytically first — Gil-Pelaez converges slowly at discontinuities.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point mass `P(Λ = location) = mass` removed before inversion.
#[derive(Debug, Clone, Copy)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct InversionOptions {
    /// Target absolute CDF error from the quadrature (truncation excluded).
    pub tol: f64,
    /// Fixed truncation of the u-range; `None` scans for transform decay.
    pub u_max: Option<f64>,
    /// `|φ(u)|` level treated as numerically zero during the decay scan.
    pub decay_cutoff: f64,
    /// Hard cap of the decay scan for slowly decaying transforms.
    pub u_cap: f64,
    /// Atom to remove analytically (compound Poisson zero-jump mass).
    pub atom: Option<Atom>,
    /// Isotonic monotonization and clipping of the result to [0, 1].
    pub clip: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            u_max: None,
            decay_cutoff: 1e-10,
            u_cap: 2e4,
            atom: None,
            clip: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InversionResult {
    pub cdf: Vec<f64>,
    /// Truncation point actually used.
    pub u_max: f64,
    /// Worst per-point quadrature error estimate (CDF units).
    pub max_error_estimate: f64,
    /// Largest adjustment applied by monotonization/clipping.
    pub max_clip_adjustment: f64,
}

// GK15 constants (same rule as the adaptive integrator; duplicated here so
// node values of φ can be cached and swept once per grid point).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
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

/// Inverts `φ_char` (characteristic function of a real argument,
/// `φ_char(u) = φ_laplace(−iu)`) into CDF values on `grid`.
pub fn invert_distribution<F>(
    phi_char: F,
    grid: &[f64],
    opts: &InversionOptions,
) -> Result<InversionResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if grid.is_empty() {
        return Err(Error::InversionFailure {
            detail: "empty evaluation grid".into(),
        });
    }
    let (atom_mass, atom_loc) = match opts.atom {
        Some(a) => {
            if !(0.0..1.0).contains(&a.mass) {
                return Err(Error::invalid("atom", "mass must lie in [0, 1)"));
            }
            (a.mass, a.location)
        }
        None => (0.0, 0.0),
    };
    // absolutely continuous part of the transform
    let phi_ac = |u: f64| -> Result<Complex64> {
        let phi = phi_char(u)?;
        if atom_mass == 0.0 {
            return Ok(phi);
        }
        let spike = atom_mass * (Complex64::i() * (u * atom_loc)).exp();
        Ok((phi - spike) / (1.0 - atom_mass))
    };

    let u_max = match opts.u_max {
        Some(u) => u,
        None => scan_decay(&phi_ac, opts)?,
    };

    let y_scale = grid
        .iter()
        .fold(0.0_f64, |acc, &y| acc.max(y.abs()))
        .max(1.0);
    // one panel per ~half oscillation period at the widest grid point
    let mut n_panels =
        ((u_max * y_scale / std::f64::consts::PI).ceil() as usize).clamp(32, 1 << 17);

    let mut cdf_ac = vec![0.0; grid.len()];
    let mut max_err;
    loop {
        let panels = build_panels(&phi_ac, u_max, n_panels)?;
        max_err = 0.0;
        for (gi, &y) in grid.iter().enumerate() {
            let (integral, err) = gil_pelaez_integral(&panels, y);
            cdf_ac[gi] = 0.5 - integral / std::f64::consts::PI;
            max_err = f64::max(max_err, err / std::f64::consts::PI);
        }
        if max_err <= opts.tol || n_panels >= (1 << 17) {
            break;
        }
        n_panels *= 2;
    }
    if max_err > opts.tol * 100.0 {
        return Err(Error::InversionFailure {
            detail: format!("quadrature error {max_err:.3e} far above tolerance {:.3e}", opts.tol),
        });
    }

    // reassemble the atom and monotonize
    let mut cdf: Vec<f64> = grid
        .iter()
        .zip(&cdf_ac)
        .map(|(&y, &f_ac)| {
            let step = if y >= atom_loc { atom_mass } else { 0.0 };
            step + (1.0 - atom_mass) * f_ac
        })
        .collect();

    let mut max_adjust = 0.0;
    if opts.clip {
        let mut running = 0.0_f64;
        for v in cdf.iter_mut() {
            let raw = *v;
            running = running.max(raw).clamp(0.0, 1.0);
            max_adjust = f64::max(max_adjust, (running - raw).abs());
            *v = running;
        }
    }

    Ok(InversionResult {
        cdf,
        u_max,
        max_error_estimate: max_err,
        max_clip_adjustment: max_adjust,
    })
}

/// Geometric scan for the point where the transform has decayed; stops at
/// the hard cap for slowly decaying (heavy-shouldered) transforms.
fn scan_decay<F>(phi_ac: &F, opts: &InversionOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut u = 1.0;
    while u < opts.u_cap {
        let m = phi_ac(u)?.norm();
        if m < opts.decay_cutoff {
            // look slightly further so the tail genuinely stays small
            let ahead = phi_ac(2.0 * u)?.norm();
            if ahead < opts.decay_cutoff {
                return Ok(2.0 * u);
            }
        }
        u *= 2.0;
    }
    Ok(opts.u_cap)
}

struct PanelValues {
    center: f64,
    half: f64,
    /// φ_ac(u)/u at the 15 Kronrod nodes, ascending.
    f_over_u: [Complex64; 15],
}

fn build_panels<F>(phi_ac: &F, u_max: f64, n_panels: usize) -> Result<Vec<PanelValues>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let h = u_max / n_panels as f64;
    let mut panels = Vec::with_capacity(n_panels);
    for k in 0..n_panels {
        let a = k as f64 * h;
        let center = a + 0.5 * h;
        let half = 0.5 * h;
        let mut f_over_u = [Complex64::new(0.0, 0.0); 15];
        for (j, &xi) in XGK.iter().enumerate() {
            let (lo, hi) = (center - half * xi, center + half * xi);
            f_over_u[j] = phi_ac(lo)? / lo;
            f_over_u[14 - j] = phi_ac(hi)? / hi;
        }
        panels.push(PanelValues {
            center,
            half,
            f_over_u,
        });
    }
    Ok(panels)
}

/// `∫_0^{u_max} Im(e^{−iuy} φ(u))/u du` with a per-panel Kronrod/Gauss
/// error estimate, reusing the cached `φ(u)/u` node values.
fn gil_pelaez_integral(panels: &[PanelValues], y: f64) -> (f64, f64) {
    let mut total = 0.0;
    let mut err = 0.0;
    for p in panels {
        let mut kronrod = 0.0;
        let mut gauss = 0.0;
        for j in 0..8 {
            let (u_lo, u_hi) = (p.center - p.half * XGK[j], p.center + p.half * XGK[j]);
            let flo = (Complex64::new(0.0, -u_lo * y).exp() * p.f_over_u[j]).im;
            let fhi = (Complex64::new(0.0, -u_hi * y).exp() * p.f_over_u[14 - j]).im;
            let pair = if j == 7 { flo } else { flo + fhi };
            kronrod += WGK[j] * pair;
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        total += kronrod * p.half;
        err += (kronrod - gauss).abs() * p.half;
    }
    (total, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{sample_cp_integral, McConfig, McScheme};
    use crate::cpoisson::{CompoundPoissonSpec, JumpLaw};
    use crate::process::{EvalContext, ProcessSpec};
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn gaussian_cdf_matches_closed_form() {
        let (mean, var) = (0.4, 0.3);
        let phi = |u: f64| -> Result<Complex64> {
            // E[e^{iuΛ}] for Λ ~ N(mean, var)
            Ok((Complex64::i() * (u * mean) - Complex64::new(0.5 * var * u * u, 0.0)).exp())
        };
        let grid: Vec<f64> = (0..101)
            .map(|k| mean - 4.0 * var.sqrt() + 8.0 * var.sqrt() * k as f64 / 100.0)
            .collect();
        let res = invert_distribution(phi, &grid, &InversionOptions::default()).unwrap();
        let normal = Normal::new(mean, var.sqrt()).unwrap();
        let max_err = grid
            .iter()
            .zip(&res.cdf)
            .map(|(&y, &f)| (f - normal.cdf(y)).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-4, "max CDF error {max_err}");
        assert!(res.max_clip_adjustment < 1e-6);
    }

    #[test]
    fn point_mass_is_a_step() {
        // σ ≡ 0 spec: Λ deterministic at c, φ(u) = e^{iuc}
        let c0 = 0.8;
        let phi = |u: f64| -> Result<Complex64> { Ok((Complex64::i() * (u * c0)).exp()) };
        let grid: Vec<f64> = (0..81).map(|k| 0.025 * k as f64).collect();
        let opts = InversionOptions {
            u_max: Some(400.0),
            tol: 1e-3,
            ..Default::default()
        };
        let res = invert_distribution(phi, &grid, &opts).unwrap();
        for (y, f) in grid.iter().zip(&res.cdf) {
            if *y < c0 - 0.1 {
                assert!(*f < 0.15, "left of the step at y = {y}: {f}");
            }
            if *y > c0 + 0.1 {
                assert!(*f > 0.85, "right of the step at y = {y}: {f}");
            }
        }
    }

    #[test]
    fn cp_atom_handling_against_empirical_cdf() {
        let ctx = EvalContext::default();
        let (theta, horizon) = (1.0, 1.0);
        let spec = CompoundPoissonSpec::new(theta, JumpLaw::exponential(1.0).unwrap(), 0.0, 0.0)
            .unwrap();
        let pspec = ProcessSpec::CompoundPoisson(spec.clone());
        let atom_mass = (-theta * horizon).exp();

        let phi = |u: f64| pspec.char_fn(horizon, u, &ctx);
        let grid: Vec<f64> = (0..61).map(|k| 0.05 * k as f64).collect();
        let opts = InversionOptions {
            atom: Some(Atom {
                location: 0.0,
                mass: atom_mass,
            }),
            tol: 1e-4,
            ..Default::default()
        };
        let res = invert_distribution(phi, &grid, &opts).unwrap();

        // empirical CDF from exact-jump sampling
        let mc = McConfig::new(60_000, 1, 99, McScheme::ExactJumps).unwrap();
        let mut samples = sample_cp_integral(&spec, horizon, &mc).unwrap();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ecdf = |y: f64| samples.partition_point(|&v| v <= y) as f64 / samples.len() as f64;

        // the atom at the origin carries e^{−θt}
        let empirical_mass = ecdf(0.0);
        assert!(
            (empirical_mass - atom_mass).abs() < 1e-2,
            "{empirical_mass} vs {atom_mass}"
        );
        assert!((res.cdf[0] - atom_mass).abs() < 2e-2);

        // and the full CDF tracks the empirical one
        let max_gap = grid
            .iter()
            .zip(&res.cdf)
            .map(|(&y, &f)| (f - ecdf(y)).abs())
            .fold(0.0, f64::max);
        assert!(max_gap < 2e-2, "CDF vs empirical gap {max_gap}");
    }

    #[test]
    fn cdf_bounds_and_monotonicity_after_clip() {
        let phi = |u: f64| -> Result<Complex64> {
            Ok((Complex64::i() * u - Complex64::new(0.05 * u * u, 0.0)).exp())
        };
        let grid: Vec<f64> = (0..50).map(|k| -1.0 + 0.1 * k as f64).collect();

        // raw values stay within [−ε, 1+ε] before any clipping
        let raw = invert_distribution(
            phi,
            &grid,
            &InversionOptions {
                clip: false,
                ..Default::default()
            },
        )
        .unwrap();
        for f in &raw.cdf {
            assert!((-1e-3..=1.0 + 1e-3).contains(f), "raw CDF value {f}");
        }

        let res = invert_distribution(phi, &grid, &InversionOptions::default()).unwrap();
        for w in res.cdf.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for f in &res.cdf {
            assert!((-1e-12..=1.0 + 1e-12).contains(f));
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let phi = |_: f64| -> Result<Complex64> { Ok(Complex64::new(1.0, 0.0)) };
        assert!(invert_distribution(phi, &[], &InversionOptions::default()).is_err());
    }
}
