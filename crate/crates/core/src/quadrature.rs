//! Reference evaluation of Meixner-Pollaczek Green's functions by direct
//! integration of the spectral density.
//!
//! This module is the slow, independent cross-check for the continued-fraction
//! evaluators: it never touches the recurrence machinery.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{abs_gamma_sq, ln_gamma};

/// Spectral density of the Meixner-Pollaczek coefficient family
/// `b_n = alpha * sqrt(n * (n - 1 + eta))`, normalized to unit weight.
pub fn mp_density(alpha: f64, eta: f64, x: f64) -> f64 {
    let arg = Complex64::new(eta / 2.0, x / (2.0 * alpha));
    let norm = 2f64.powf(eta - 2.0) / (std::f64::consts::PI * alpha * ln_gamma(eta).exp());
    norm * abs_gamma_sq(arg)
}

/// Density at the origin, where the weight peaks.
pub fn mp_density_origin(alpha: f64, eta: f64) -> f64 {
    let g_half = ln_gamma(eta / 2.0).exp();
    2f64.powf(eta - 2.0) * g_half * g_half / (std::f64::consts::PI * alpha * ln_gamma(eta).exp())
}

/// Green's function `G(z) = \int dx rho(x) / (z - x)` evaluated by adaptive
/// quadrature, for `Im z != 0`.
pub fn mp_green_quadrature(alpha: f64, eta: f64, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Invalid(
            "quadrature oracle requires Im z != 0".into(),
        ));
    }
    if alpha <= 0.0 || eta <= 0.0 {
        return Err(Error::Invalid(format!(
            "Meixner-Pollaczek parameters must be positive, got alpha={alpha}, eta={eta}"
        )));
    }
    let cut = tail_cutoff(alpha, eta, z)?;
    // Fold the two half-lines together so the peak at the origin sits on a
    // panel edge.
    let f = |x: f64| {
        let rho = mp_density(alpha, eta, x);
        rho * ((z - x).inv() + (z + x).inv())
    };
    adaptive_simpson(&f, 0.0, cut, 1e-13, 48)
}

/// Unit-weight check: `\int dx rho(x)` by the same quadrature.
pub fn mp_weight_integral(alpha: f64, eta: f64) -> Result<f64> {
    let cut = tail_cutoff(alpha, eta, Complex64::new(0.0, -1.0))?;
    let f = |x: f64| Complex64::new(2.0 * mp_density(alpha, eta, x), 0.0);
    Ok(adaptive_simpson(&f, 0.0, cut, 1e-13, 48)?.re)
}

/// Pick a cutoff X with the discarded tail below 1e-12 relative to the
/// integral scale. The density decays like `x^(eta-1) exp(-pi x / (2 alpha))`,
/// so past the turnover the integral of the tail is bounded by
/// `rho(X) * (4 alpha / pi)` once X exceeds twice the turnover point.
fn tail_cutoff(alpha: f64, eta: f64, z: Complex64) -> Result<f64> {
    let turnover = 2.0 * alpha * (eta.max(1.0) + 1.0) / std::f64::consts::PI;
    let dist = z.im.abs();
    let mut x = (8.0 * turnover).max(16.0 * alpha).max(8.0);
    for _ in 0..200 {
        let tail = mp_density(alpha, eta, x) * (4.0 * alpha / std::f64::consts::PI);
        if tail / dist.min(1.0) < 1e-13 {
            return Ok(x);
        }
        x *= 1.25;
    }
    Err(Error::NoConvergence(
        "tail cutoff search did not terminate".into(),
    ))
}

/// Adaptive Simpson on a complex-valued integrand.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    step(f, a, b, fa, fm, fb, whole, tol, depth)
}

fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NoConvergence(format!(
            "adaptive quadrature stalled on [{a}, {b}]"
        )));
    }
    let half = 0.5 * tol;
    Ok(step(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_normalizes_to_one() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0), (0.5, 1.5)] {
            let w = mp_weight_integral(alpha, eta).unwrap();
            assert_relative_eq!(w, 1.0, max_relative = 1e-11);
        }
    }

    #[test]
    fn eta_one_density_is_inverse_cosh() {
        // |Gamma((1+ix)/2)|^2 = pi / cosh(pi x / 2), so the eta = 1 weight
        // collapses to 1 / (2 alpha cosh(pi x / (2 alpha))).
        for &x in &[0.0, 0.3, 1.0, 2.5] {
            let direct = mp_density(1.0, 1.0, x);
            let closed = 0.5 / (std::f64::consts::PI * x / 2.0).cosh();
            assert_relative_eq!(direct, closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn origin_density_matches_grid_value() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            assert_relative_eq!(
                mp_density_origin(alpha, eta),
                mp_density(alpha, eta, 0.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn green_obeys_half_plane_symmetry() {
        // G(conj z) = conj G(z) for a real weight.
        let z = Complex64::new(0.7, -1.3);
        let g = mp_green_quadrature(1.0, 2.0, z).unwrap();
        let gc = mp_green_quadrature(1.0, 2.0, z.conj()).unwrap();
        assert_relative_eq!(g.re, gc.re, max_relative = 1e-10);
        assert_relative_eq!(g.im, -gc.im, max_relative = 1e-10);
        assert!(g.im > 0.0, "Im G must oppose Im z");
    }

    #[test]
    fn green_far_from_spectrum_is_one_over_z() {
        let z = Complex64::new(0.0, -300.0);
        let g = mp_green_quadrature(1.0, 2.0, z).unwrap();
        // 1/z plus a second-moment correction of order 1/|z|^3.
        assert!((g - z.inv()).norm() < 1e-4 * z.inv().norm());
    }

    #[test]
    fn rejects_real_frequency() {
        assert!(mp_green_quadrature(1.0, 2.0, Complex64::new(0.5, 0.0)).is_err());
    }
}
