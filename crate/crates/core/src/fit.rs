//! Fits for convergence rates and slow (logarithmic) scaling laws.

use crate::error::{Error, Result};
use crate::stagger::linear_least_squares;

/// Power-law fit `y ~ exp(c) n^beta` on log-log axes.
#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    pub exponent: f64,
    /// Natural-log intercept `c`.
    pub intercept: f64,
    pub r_squared: f64,
    /// False when the samples do not decrease (or increase) monotonically;
    /// the fit still runs, the caller decides whether to trust it.
    pub monotone: bool,
    /// Decades of `n` spanned by the samples.
    pub decades: f64,
}

/// Fit `ln y = beta ln n + c` by least squares. Demands at least six
/// strictly positive samples spanning 1.5 decades in `n`; non-monotone
/// samples are flagged, not rejected.
pub fn rate_fit(ns: &[f64], ys: &[f64]) -> Result<RateFit> {
    if ns.len() != ys.len() || ns.len() < 6 {
        return Err(Error::Invalid(format!(
            "rate fit needs >= 6 matched samples, got {} and {}",
            ns.len(),
            ys.len()
        )));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] <= 0.0 {
        return Err(Error::Invalid("sample points must be positive and increasing".into()));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Invalid("rate fit needs strictly positive values".into()));
    }
    let decades = (ns[ns.len() - 1] / ns[0]).log10();
    if decades < 1.5 {
        return Err(Error::Invalid(format!(
            "samples span {decades:.2} decades, need >= 1.5"
        )));
    }
    let monotone = ys.windows(2).all(|w| w[1] <= w[0]) || ys.windows(2).all(|w| w[1] >= w[0]);
    let xs: Vec<f64> = ns.iter().map(|&n| n.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    let (beta, c, _) = linear_least_squares(&xs, &ls)?;
    Ok(RateFit {
        exponent: beta,
        intercept: c,
        r_squared: r_squared(&xs, &ls, |x| beta * x + c),
        monotone,
        decades,
    })
}

/// Profiled fit `y ~ C + A (ln n)^p`.
#[derive(Clone, Copy, Debug)]
pub struct LogPowerFit {
    pub offset: f64,
    pub amplitude: f64,
    pub power: f64,
    pub r_squared: f64,
}

/// Fit `y = C + A (ln n)^p`: for each trial `p` the inner pair `(C, A)` is a
/// linear regression on `(ln n)^p`, and the outer power is minimized by
/// golden-section search over `p_range`.
pub fn log_power_fit(ns: &[f64], ys: &[f64], p_range: (f64, f64)) -> Result<LogPowerFit> {
    if ns.len() != ys.len() || ns.len() < 6 {
        return Err(Error::Invalid("log-power fit needs >= 6 matched samples".into()));
    }
    if ns.iter().any(|&n| n <= 1.0) {
        return Err(Error::Invalid("log-power fit needs n > 1".into()));
    }
    let (mut lo, mut hi) = p_range;
    if !(hi > lo) {
        return Err(Error::Invalid("empty power range".into()));
    }
    let logs: Vec<f64> = ns.iter().map(|&n| n.ln()).collect();
    let residual = |p: f64| -> f64 {
        let xs: Vec<f64> = logs.iter().map(|&l| l.powf(p)).collect();
        match linear_least_squares(&xs, ys) {
            Ok((_, _, r)) => r,
            Err(_) => f64::INFINITY,
        }
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = residual(a);
    let mut fb = residual(b);
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = residual(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = residual(b);
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let xs: Vec<f64> = logs.iter().map(|&l| l.powf(p)).collect();
    let (amplitude, offset, _) = linear_least_squares(&xs, ys)?;
    Ok(LogPowerFit {
        offset,
        amplitude,
        power: p,
        r_squared: r_squared(&xs, ys, |x| amplitude * x + offset),
    })
}

/// Coefficient of determination of `model` against `(xs, ys)`.
pub fn r_squared(xs: &[f64], ys: &[f64], model: impl Fn(f64) -> f64) -> f64 {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let ss_tot: f64 = ys.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let d = y - model(x);
            d * d
        })
        .sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

/// Logarithmically spaced integer grid from `lo` to `hi` inclusive,
/// deduplicated after rounding.
pub fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    if points < 2 || hi <= lo {
        return vec![lo.min(hi), lo.max(hi)];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .collect();
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_clean_power_law() {
        let ns: Vec<f64> = (2..12).map(|k| (1 << k) as f64).collect();
        let ys: Vec<f64> = ns.iter().map(|&n| 3.0 * n.powf(-2.0)).collect();
        let fit = rate_fit(&ns, &ys).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.monotone);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn flags_oscillating_samples() {
        let ns: Vec<f64> = (2..12).map(|k| (1 << k) as f64).collect();
        let ys: Vec<f64> = ns
            .iter()
            .enumerate()
            .map(|(i, &n)| n.powf(-1.0) * if i % 2 == 0 { 1.5 } else { 0.5 })
            .collect();
        let fit = rate_fit(&ns, &ys).unwrap();
        assert!(!fit.monotone);
        assert!((fit.exponent + 1.0).abs() < 0.2);
    }

    #[test]
    fn rejects_thin_or_short_grids() {
        let ns: Vec<f64> = (10..15).map(|k| k as f64).collect();
        let ys = vec![1.0; 5];
        assert!(rate_fit(&ns, &ys).is_err());
        let ns: Vec<f64> = (10..20).map(|k| k as f64).collect();
        let ys = vec![1.0; 10];
        assert!(rate_fit(&ns, &ys).is_err());
    }

    #[test]
    fn profiled_fit_finds_the_log_power() {
        let ns: Vec<f64> = (4..40).map(|k| (1.35f64).powi(k) * 10.0).collect();
        let ys: Vec<f64> = ns.iter().map(|&n| 0.7 + 0.3 * n.ln().powf(1.5)).collect();
        let fit = log_power_fit(&ns, &ys, (0.2, 4.0)).unwrap();
        assert!((fit.power - 1.5).abs() < 1e-5, "power {}", fit.power);
        assert!((fit.offset - 0.7).abs() < 1e-6);
        assert!((fit.amplitude - 0.3).abs() < 1e-6);
        assert!(fit.r_squared > 0.999999);
    }

    #[test]
    fn profiled_fit_handles_a_plain_logarithm() {
        let ns: Vec<f64> = (4..30).map(|k| (1.5f64).powi(k) * 20.0).collect();
        let ys: Vec<f64> = ns.iter().map(|&n| -2.0 + 1.1 * n.ln()).collect();
        let fit = log_power_fit(&ns, &ys, (0.2, 4.0)).unwrap();
        assert!((fit.power - 1.0).abs() < 1e-4, "power {}", fit.power);
        assert!((fit.amplitude - 1.1).abs() < 1e-4);
    }

    #[test]
    fn log_grid_spans_and_deduplicates() {
        let grid = log_grid(100, 10_000, 25);
        assert_eq!(*grid.first().unwrap(), 100);
        assert_eq!(*grid.last().unwrap(), 10_000);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        let tiny = log_grid(2, 9, 40);
        assert!(tiny.windows(2).all(|w| w[1] > w[0]));
        assert!(tiny.len() <= 8);
    }
}
