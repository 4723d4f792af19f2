//! Splitting a coefficient sequence into smooth and staggered parts.
//!
//! Asymptotically `b_n = f_n + (-1)^n s_n` with `f` slowly varying. The
//! split drives the convergence criteria and the growth fits, so it is
//! estimated with a kernel that annihilates a constant staggering exactly
//! and is exact on linear smooth parts.

use crate::error::{Error, Result};

/// Smooth/staggered split over the interior of a tabulated range.
///
/// Entry `i` of `f` and `s` refers to `b_n` with `n = first_n + i`.
#[derive(Debug, Clone)]
pub struct StaggerDecomposition {
    pub f: Vec<f64>,
    pub s: Vec<f64>,
    pub first_n: u64,
    pub window: usize,
    /// Largest `|b_n - (f_n + (-1)^n s_n)|`; zero by construction here,
    /// recorded so callers can treat the split as a black box.
    pub residual: f64,
    /// Set when `|s_n| / f_n` grows toward the end of the range, which
    /// threatens positivity of reconstructed sequences.
    pub ratio_warning: bool,
}

impl StaggerDecomposition {
    /// `s_n / f_n` per interior index, the quantity entering the criteria.
    pub fn ratio(&self) -> Vec<f64> {
        self.f
            .iter()
            .zip(&self.s)
            .map(|(f, s)| s / f)
            .collect()
    }
}

/// Estimates the split with a centered binomial kernel.
///
/// `values[i]` is `b_(i+1)`. The base kernel is
/// `(b_(n-1) + 2 b_n + b_(n+1)) / 4`, applied `window` times, so the
/// valid interior shrinks by `window` on each side.
pub fn decompose_stagger(values: &[f64], window: usize) -> Result<StaggerDecomposition> {
    if window == 0 {
        return Err(Error::Invalid("smoothing window must be at least 1".into()));
    }
    if values.len() < 2 * window + 3 {
        return Err(Error::Invalid(format!(
            "need at least {} values for window {window}, got {}",
            2 * window + 3,
            values.len()
        )));
    }
    let mut smooth = values.to_vec();
    for pass in 0..window {
        let lo = pass + 1;
        let hi = smooth.len() - 1 - pass;
        let prev = smooth.clone();
        for i in lo..hi {
            smooth[i] = 0.25 * (prev[i - 1] + 2.0 * prev[i] + prev[i + 1]);
        }
    }
    let lo = window;
    let hi = values.len() - window;
    let first_n = (lo + 1) as u64;
    let mut f = Vec::with_capacity(hi - lo);
    let mut s = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let n = (i + 1) as u64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        f.push(smooth[i]);
        s.push(sign * (values[i] - smooth[i]));
    }
    let ratio_warning = ratio_grows(&f, &s);
    Ok(StaggerDecomposition {
        f,
        s,
        first_n,
        window,
        residual: 0.0,
        ratio_warning,
    })
}

fn ratio_grows(f: &[f64], s: &[f64]) -> bool {
    if f.iter().any(|v| *v <= 0.0) {
        return true;
    }
    let n = f.len();
    if n < 8 {
        return false;
    }
    let quarter = n / 4;
    let head: f64 = (0..quarter)
        .map(|i| (s[i] / f[i]).abs())
        .fold(0.0, f64::max);
    let tail: f64 = (n - quarter..n)
        .map(|i| (s[i] / f[i]).abs())
        .fold(0.0, f64::max);
    tail > head * 1.5 + 1e-300
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    /// `b_n ~ alpha n + gamma`
    Linear,
    /// `b_n ~ alpha n / log(n+1) + gamma`
    NOverLog,
}

#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub alpha: f64,
    pub gamma: f64,
    /// For the linear model, the Meixner-Pollaczek `eta` whose expansion
    /// `alpha n + alpha(eta-1)/2` matches through order one.
    pub eta_matched: Option<f64>,
    pub fit_window: (u64, u64),
    pub residual: f64,
}

/// Least-squares growth parameters on the de-staggered part.
///
/// `values[i]` is `b_(i+1)`; `fit_window` is an inclusive range of `n`.
pub fn fit_growth(values: &[f64], model: GrowthModel, fit_window: (u64, u64)) -> Result<GrowthFit> {
    let (lo_n, hi_n) = fit_window;
    if lo_n < 1 || hi_n > values.len() as u64 || hi_n < lo_n + 3 {
        return Err(Error::Invalid(format!(
            "fit window [{lo_n}, {hi_n}] needs length >= 4 inside 1..={}",
            values.len()
        )));
    }
    // De-stagger when the window interior allows it; narrow windows on
    // clean data fall back to the raw values.
    let dec = decompose_stagger(values, 1).ok();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in lo_n..=hi_n {
        let y = match &dec {
            Some(d) if n >= d.first_n && n < d.first_n + d.f.len() as u64 => {
                d.f[(n - d.first_n) as usize]
            }
            _ => values[(n - 1) as usize],
        };
        let x = match model {
            GrowthModel::Linear => n as f64,
            GrowthModel::NOverLog => n as f64 / ((n + 1) as f64).ln(),
        };
        xs.push(x);
        ys.push(y);
    }
    let (alpha, gamma, residual) = linear_least_squares(&xs, &ys)?;
    if alpha <= 0.0 {
        return Err(Error::Invalid(format!("fitted alpha = {alpha} is not positive")));
    }
    let eta_matched = match model {
        GrowthModel::Linear => Some(1.0 + 2.0 * gamma / alpha),
        GrowthModel::NOverLog => None,
    };
    Ok(GrowthFit {
        model,
        alpha,
        gamma,
        eta_matched,
        fit_window,
        residual,
    })
}

/// Ordinary least squares `y ~ alpha x + gamma`; returns rms residual.
pub fn linear_least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Invalid("need at least two points to fit".into()));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("degenerate fit: zero variance in x".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let alpha = sxy / sxx;
    let gamma = my - alpha * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (alpha * x + gamma);
            r * r
        })
        .sum();
    Ok((alpha, gamma, (rss / n).sqrt()))
}

/// Coefficient of determination for `y ~ alpha x + gamma`.
pub fn r_squared(xs: &[f64], ys: &[f64], alpha: f64, gamma: f64) -> f64 {
    let n = ys.len() as f64;
    let my = ys.iter().sum::<f64>() / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (alpha * x + gamma);
            r * r
        })
        .sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}
