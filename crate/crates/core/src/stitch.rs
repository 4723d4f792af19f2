//! Stitching a model tail onto a finite run of exact coefficients.
//!
//! The first `N` levels of the continued fraction come from the tabulated
//! (or closed-form) sequence; beyond level `N` a terminator family supplies
//! the rest, either the Meixner-Pollaczek tail evaluated by descent or a
//! constant extension in closed form. At zero frequency the exact levels
//! collapse into the parity product, giving
//! `G(-i0+) = (b_N / b_{N,s})^(+-1) (Pi_N / Pi_{N,s}) G_s(-i0+)`
//! with exponent `+1` for even `N` and `-1` for odd `N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mobius::{descent_green, DescentOptions, GreenEvaluation};
use crate::products::{classify_increments, mp_pi_exact, mp_pi_limit, CriterionVerdict, ProductScan};
use crate::seq::CoeffSequence;
use crate::stagger::{fit_growth, GrowthFit, GrowthModel};

/// Model family attached beyond the stitching level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Terminator {
    MeixnerPollaczek { alpha: f64, eta: f64 },
    /// `b_n = b_N` for all `n > N`.
    Constant,
}

impl Terminator {
    /// The tail coefficient `b_{n,s}`; `b_level` is the last exact value,
    /// which the constant terminator freezes.
    pub fn coeff(&self, n: u64, b_level: f64) -> f64 {
        match *self {
            Terminator::MeixnerPollaczek { alpha, eta } => {
                let x = n as f64;
                alpha * (x * (x - 1.0 + eta)).sqrt()
            }
            Terminator::Constant => b_level,
        }
    }
}

/// A stitching prescription: how many exact levels, what tail, and how hard
/// to push the tail evaluation.
#[derive(Clone, Debug)]
pub struct StitchPlan {
    pub level: u64,
    pub terminator: Terminator,
    pub descent: DescentOptions,
    /// The growth fit that selected the terminator, when one was used.
    pub match_report: Option<GrowthFit>,
}

impl StitchPlan {
    pub fn new(level: u64, terminator: Terminator) -> Self {
        StitchPlan {
            level,
            terminator,
            descent: DescentOptions::default(),
            match_report: None,
        }
    }

    /// Fit the sequence growth over `(level/2, level]` and attach the
    /// matching Meixner-Pollaczek tail: `alpha` from the slope, `eta` from
    /// the subleading offset.
    pub fn matched(seq: &CoeffSequence, level: u64) -> Result<Self> {
        if level < 32 {
            return Err(Error::Invalid(
                "terminator matching needs level >= 32".into(),
            ));
        }
        let values = seq.take(level)?;
        let fit = fit_growth(&values, GrowthModel::Linear, (level / 2, level))?;
        let eta = fit
            .eta_matched
            .ok_or_else(|| Error::Invalid("growth fit carried no eta".into()))?;
        Ok(StitchPlan {
            level,
            terminator: Terminator::MeixnerPollaczek {
                alpha: fit.alpha,
                eta,
            },
            descent: DescentOptions::default(),
            match_report: Some(fit),
        })
    }
}

/// Closed-form Green's function of the constant-coefficient fraction,
/// `G = (z +- sqrt(z^2 - 4 b^2)) / (2 b^2)` on the branch with
/// `Im G * Im z < 0`.
pub fn constant_tail_green(z: Complex64, b: f64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Invalid(
            "constant tail evaluation requires Im z != 0".into(),
        ));
    }
    let s = (z * z - 4.0 * b * b).sqrt();
    let denom = 2.0 * b * b;
    let plus = (z + s) / denom;
    let minus = (z - s) / denom;
    Ok(if plus.im * z.im < 0.0 { plus } else { minus })
}

/// Green's function with `plan.level` exact levels and the plan's tail.
pub fn stitched_green(seq: &CoeffSequence, plan: &StitchPlan, z: Complex64) -> Result<GreenEvaluation> {
    if z.im == 0.0 {
        return Err(Error::Invalid("stitched evaluation requires Im z != 0".into()));
    }
    let n = plan.level;
    let b_level: f64 = seq.eval(n.max(1))?;
    let tail = match plan.terminator {
        Terminator::MeixnerPollaczek { alpha, eta } => {
            let term_seq = CoeffSequence::meixner_pollaczek(alpha, eta)?;
            descent_green(&term_seq, z, n as usize, &plan.descent)?
        }
        Terminator::Constant => GreenEvaluation {
            value: constant_tail_green(z, b_level)?,
            depth: n as usize,
            achieved: 0.0,
        },
    };
    let mut g = tail.value;
    for k in (1..=n).rev() {
        let b: f64 = seq.eval(k)?;
        let denom = z - b * b * g;
        if denom == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularLevel { level: k as usize });
        }
        g = denom.inv();
    }
    Ok(GreenEvaluation {
        value: g,
        depth: tail.depth,
        achieved: tail.achieved,
    })
}

/// Zero-frequency stitched value through the parity-product formula.
pub fn zero_freq_stitched(seq: &CoeffSequence, plan: &StitchPlan) -> Result<Complex64> {
    let n = plan.level;
    if n < 1 {
        return Err(Error::Invalid("stitching level must be >= 1".into()));
    }
    let mut scan = ProductScan::<f64>::new();
    for k in 1..=n {
        scan.push(seq.eval(k)?);
    }
    let log_pi = scan.log_pi();
    let b_level: f64 = seq.eval(n)?;
    match plan.terminator {
        Terminator::MeixnerPollaczek { alpha, eta } => {
            let g_s = mp_pi_limit(alpha, eta);
            let pi_s = mp_pi_exact(alpha, eta, n)?;
            let b_s = plan.terminator.coeff(n, b_level);
            let sigma = if n % 2 == 0 { 1.0 } else { -1.0 };
            let scale = (b_level / b_s).powf(sigma) * (log_pi - pi_s.ln()).exp();
            Ok(g_s * scale)
        }
        // A constant tail has G_s(-i0+) = i / b and Pi_{N,s} = 1 / b, so the
        // formula collapses to i Pi_N exactly.
        Terminator::Constant => Ok(Complex64::new(0.0, log_pi.exp())),
    }
}

/// Which perturbative bound a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    FiniteIm,
    ZeroFreq,
}

/// A certified (or explicitly infinite) error bound for a stitched value.
#[derive(Clone, Debug)]
pub struct ErrorBoundReport {
    pub kind: BoundKind,
    /// The bound itself; `f64::INFINITY` when the deviation class diverges.
    pub value: f64,
    /// Calibrated prefactor entering the zero-frequency bound.
    pub m_constant: f64,
    /// Classification of `sum |Delta b_n| / b_n` over dyadic blocks.
    pub tail_class: CriterionVerdict,
    /// True when the dyadic block maxima decay toward the horizon, i.e. the
    /// horizon sup is trustworthy.
    pub tail_decaying: bool,
    pub horizon: u64,
    pub inputs_summary: String,
}

/// Default deviation horizon beyond the stitching level.
pub fn default_horizon(level: u64) -> u64 {
    64 * level
}

/// Calibrated prefactor for the zero-frequency bound, frozen against the
/// measured stitching error of the toy families.
pub const ZERO_FREQ_M: f64 = 2.0;

/// Perturbative bound for finite `Im z`:
/// `|Delta G| <= (2 / |Im z|^2) sup_{n > N} |b_n - b_{n,s}|`,
/// with the sup taken over `(N, N + horizon]` and certified by requiring the
/// dyadic block maxima to decay toward the horizon.
pub fn error_bound_finite_im(
    seq: &CoeffSequence,
    plan: &StitchPlan,
    z: Complex64,
    horizon: u64,
) -> Result<ErrorBoundReport> {
    if z.im == 0.0 {
        return Err(Error::Invalid("finite-Im bound requires Im z != 0".into()));
    }
    let n = plan.level;
    let b_level: f64 = seq.eval(n.max(1))?;
    let mut sup = 0.0f64;
    let mut block_sups = Vec::new();
    let mut block_max = 0.0f64;
    let mut next_edge = 2 * n;
    for k in n + 1..=n + horizon {
        let delta = (seq.eval::<f64>(k)? - plan.terminator.coeff(k, b_level)).abs();
        sup = sup.max(delta);
        block_max = block_max.max(delta);
        if k >= next_edge {
            block_sups.push(block_max);
            block_max = 0.0;
            next_edge *= 2;
        }
    }
    if block_max > 0.0 {
        block_sups.push(block_max);
    }
    let tail_decaying = block_sups.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let value = 2.0 / (z.im * z.im) * sup;
    Ok(ErrorBoundReport {
        kind: BoundKind::FiniteIm,
        value: if tail_decaying { value } else { f64::INFINITY },
        m_constant: 1.0,
        tail_class: CriterionVerdict::Marginal,
        tail_decaying,
        horizon,
        inputs_summary: format!(
            "level {n}, sup|db| {sup:.3e} over ({n}, {}], z = {z}",
            n + horizon
        ),
    })
}

/// Perturbative bound at zero frequency:
/// `|Delta G| / |G| <= 2 M sum_{n > N} |b_n - b_{n,s}| / b_n`,
/// the sum over `(N, N + horizon]` plus a geometric tail extrapolation from
/// the dyadic block sums. A deviation class whose block sums do not decay is
/// reported with an infinite bound.
pub fn error_bound_zero_freq(
    seq: &CoeffSequence,
    plan: &StitchPlan,
    horizon: u64,
) -> Result<ErrorBoundReport> {
    let n = plan.level;
    let b_level: f64 = seq.eval(n.max(1))?;
    let mut total = 0.0f64;
    let mut block_sums = Vec::new();
    let mut block = 0.0f64;
    let mut next_edge = 2 * n;
    for k in n + 1..=n + horizon {
        let b: f64 = seq.eval(k)?;
        let u = (b - plan.terminator.coeff(k, b_level)).abs() / b;
        total += u;
        block += u;
        if k >= next_edge {
            block_sums.push(block);
            block = 0.0;
            next_edge *= 2;
        }
    }
    if block > 0.0 {
        block_sums.push(block);
    }
    let tail_class = classify_increments(&block_sums, total);
    let value = match tail_class {
        CriterionVerdict::FiniteNonzero => {
            let tail = match block_sums.len() {
                0 => 0.0,
                1 => block_sums[0],
                len => {
                    let last = block_sums[len - 1];
                    let prev = block_sums[len - 2];
                    let r = if prev > 0.0 { (last / prev).min(0.75) } else { 0.0 };
                    last * r / (1.0 - r)
                }
            };
            2.0 * ZERO_FREQ_M * (total + tail)
        }
        _ => f64::INFINITY,
    };
    Ok(ErrorBoundReport {
        kind: BoundKind::ZeroFreq,
        value,
        m_constant: ZERO_FREQ_M,
        tail_class,
        tail_decaying: matches!(tail_class, CriterionVerdict::FiniteNonzero),
        horizon,
        inputs_summary: format!(
            "level {n}, sum|db|/b {total:.3e} over ({n}, {}]",
            n + horizon
        ),
    })
}

/// Signed leading error series of the zero-frequency stitch.
#[derive(Clone, Debug)]
pub struct ErrorSeriesEstimate {
    /// `sum_{n > N} (b_n - b_{n,s}) (-1)^n / b_n` over the horizon.
    pub sum: f64,
    /// Remainder control: the first omitted term when the series alternates,
    /// otherwise a power-fit tail extrapolation.
    pub remainder_bound: f64,
    /// True when consecutive terms alternate in sign over the window.
    pub alternating: bool,
}

/// Evaluate the leading error series of `zero_freq_stitched`. When the term
/// signs alternate the remainder is bounded by the first omitted term; a
/// one-signed series (staggered deviations) is flagged instead.
pub fn stitch_error_series(
    seq: &CoeffSequence,
    plan: &StitchPlan,
    horizon: u64,
) -> Result<ErrorSeriesEstimate> {
    let n = plan.level;
    if horizon < 16 {
        return Err(Error::Invalid("error series needs a horizon >= 16".into()));
    }
    let b_level: f64 = seq.eval(n.max(1))?;
    let term = |k: u64| -> Result<f64> {
        let b: f64 = seq.eval(k)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * (b - plan.terminator.coeff(k, b_level)) / b)
    };
    let mut sum = 0.0f64;
    let mut alternating = true;
    let mut prev_sign = 0.0f64;
    for k in n + 1..=n + horizon {
        let t = term(k)?;
        sum += t;
        let s = t.signum();
        if prev_sign != 0.0 && s != 0.0 && s == prev_sign {
            alternating = false;
        }
        if s != 0.0 {
            prev_sign = s;
        }
    }
    let first_omitted = term(n + horizon + 1)?.abs();
    let remainder_bound = if alternating {
        first_omitted
    } else {
        // One-signed tail: extrapolate |t_n| ~ C n^-p from the window edges.
        let t_mid = term(n + horizon / 2)?.abs();
        if first_omitted > 0.0 && t_mid > first_omitted {
            let p = (t_mid / first_omitted).ln() / 2f64.ln();
            if p > 1.0 {
                first_omitted * (n + horizon) as f64 / (p - 1.0)
            } else {
                f64::INFINITY
            }
        } else {
            f64::INFINITY
        }
    };
    Ok(ErrorSeriesEstimate {
        sum,
        remainder_bound,
        alternating,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::mp_green_quadrature;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_branch_picks_the_decaying_root() {
        // b = 1 at z = -3i: G = i (sqrt(13) - 3) / 2.
        let g = constant_tail_green(c(0.0, -3.0), 1.0).unwrap();
        assert_relative_eq!(g.im, (13f64.sqrt() - 3.0) / 2.0, max_relative = 1e-14);
        assert!(g.re.abs() < 1e-15);
        // Conjugate point lands on the conjugate branch.
        let gc = constant_tail_green(c(0.0, 3.0), 1.0).unwrap();
        assert_relative_eq!(gc.im, -g.im, max_relative = 1e-14);
        // Far off the band: G ~ 1/z.
        let far = constant_tail_green(c(0.0, -50.0), 1.0).unwrap();
        assert_relative_eq!(far.im, (2504f64.sqrt() - 50.0) / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn exact_tail_is_an_identity_at_finite_im() {
        // Stitching the matching tail back onto its own sequence returns
        // the plain descent value at any level.
        let seq = CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap();
        let z = c(0.2, -1.3);
        let direct = descent_green(&seq, z, 0, &DescentOptions::default()).unwrap();
        for level in [1u64, 4, 9, 40] {
            let plan = StitchPlan::new(level, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 2.0 });
            let stitched = stitched_green(&seq, &plan, z).unwrap();
            assert!(
                (stitched.value - direct.value).norm() < 5e-10,
                "level {level}: {} vs {}",
                stitched.value,
                direct.value
            );
        }
    }

    #[test]
    fn exact_tail_is_an_identity_at_zero_frequency() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            let seq = CoeffSequence::meixner_pollaczek(alpha, eta).unwrap();
            let limit = mp_pi_limit(alpha, eta);
            for level in [2u64, 7, 100, 101] {
                let plan = StitchPlan::new(level, Terminator::MeixnerPollaczek { alpha, eta });
                let g = zero_freq_stitched(&seq, &plan).unwrap();
                assert_relative_eq!(g.im, limit.im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn constant_stitch_is_the_raw_product() {
        let seq = CoeffSequence::toy_relevant();
        let plan = StitchPlan::new(1000, Terminator::Constant);
        let g = zero_freq_stitched(&seq, &plan).unwrap();
        let direct = crate::products::pi_product(&seq, 1000).unwrap().pi(1000);
        assert_relative_eq!(g.im, direct, max_relative = 1e-13);
    }

    #[test]
    fn irrelevant_toy_stitches_to_its_limit() {
        let seq = CoeffSequence::toy_irrelevant();
        let expect = std::f64::consts::PI * std::f64::consts::PI / 8.0;
        let plan = StitchPlan::new(10_000, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
        let g = zero_freq_stitched(&seq, &plan).unwrap();
        assert!(
            (g.im - expect).abs() < 1e-4,
            "stitched {} vs {expect}",
            g.im
        );
        // Parity consistency: odd level lands on the same value.
        let plan_odd = StitchPlan::new(10_001, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
        let g_odd = zero_freq_stitched(&seq, &plan_odd).unwrap();
        assert!((g_odd.im - g.im).abs() < 1e-6);
    }

    #[test]
    fn matched_plan_recovers_the_mp_parameters() {
        let seq = CoeffSequence::meixner_pollaczek(1.0, 3.0).unwrap();
        let plan = StitchPlan::matched(&seq, 4096).unwrap();
        match plan.terminator {
            Terminator::MeixnerPollaczek { alpha, eta } => {
                assert!((alpha - 1.0).abs() < 1e-3, "alpha {alpha}");
                assert!((eta - 3.0).abs() < 0.05, "eta {eta}");
            }
            _ => panic!("expected an MP terminator"),
        }
        assert!(plan.match_report.is_some());
    }

    #[test]
    fn finite_im_stitch_beats_its_error_bound() {
        let seq = CoeffSequence::toy_irrelevant();
        let z = c(0.0, -2.0);
        let plan = StitchPlan::new(100, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
        let stitched = stitched_green(&seq, &plan, z).unwrap();
        let exact = descent_green(&seq, z, 0, &DescentOptions::default()).unwrap();
        let bound = error_bound_finite_im(&seq, &plan, z, default_horizon(100)).unwrap();
        let measured = (stitched.value - exact.value).norm();
        assert!(bound.tail_decaying);
        assert!(
            measured <= bound.value,
            "measured {measured:.3e} vs bound {:.3e}",
            bound.value
        );
        assert!(bound.value < 1e-2);
    }

    #[test]
    fn zero_freq_bound_dominates_and_shrinks() {
        let seq = CoeffSequence::toy_irrelevant();
        let expect = std::f64::consts::PI * std::f64::consts::PI / 8.0;
        let mut last_bound = f64::INFINITY;
        for level in [64u64, 256, 1024] {
            let plan = StitchPlan::new(level, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
            let g = zero_freq_stitched(&seq, &plan).unwrap();
            let bound = error_bound_zero_freq(&seq, &plan, default_horizon(level)).unwrap();
            let measured = (g.im - expect).abs() / expect;
            assert_eq!(bound.tail_class, CriterionVerdict::FiniteNonzero);
            assert!(
                measured <= bound.value,
                "level {level}: measured {measured:.3e} vs bound {:.3e}",
                bound.value
            );
            assert!(bound.value < last_bound);
            last_bound = bound.value;
        }
    }

    #[test]
    fn divergent_deviation_class_gives_an_infinite_bound() {
        let seq = CoeffSequence::custom("n * (1 + 1 / log(n + 1))").unwrap();
        let plan = StitchPlan::new(64, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
        let bound = error_bound_zero_freq(&seq, &plan, default_horizon(64)).unwrap();
        assert!(bound.value.is_infinite());
        assert_eq!(bound.tail_class, CriterionVerdict::Divergent);
    }

    #[test]
    fn error_series_alternates_for_smooth_deviations() {
        // Smooth positive deviations alternate once multiplied by (-1)^n.
        let seq = CoeffSequence::toy_irrelevant();
        let plan = StitchPlan::new(100, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 1.0 });
        let est = stitch_error_series(&seq, &plan, 4096).unwrap();
        assert!(est.alternating);
        assert!(est.remainder_bound < 1e-6);
        // Staggered deviations fold into a one-signed series and get flagged.
        let rel = CoeffSequence::toy_relevant();
        let plan_rel = StitchPlan::new(100, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 3.0 });
        let est_rel = stitch_error_series(&rel, &plan_rel, 4096).unwrap();
        assert!(!est_rel.alternating);
        assert!(est_rel.sum > 0.0);
    }

    #[test]
    fn stitched_green_agrees_with_quadrature_on_a_perturbed_family() {
        // The irrelevant toy stitched with its matched tail must agree with
        // direct descent on the toy, which in turn pins the tail machinery
        // against the oracle through the MP identity cases.
        let z = c(0.0, -1.0);
        let seq = CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap();
        let plan = StitchPlan::new(50, Terminator::MeixnerPollaczek { alpha: 1.0, eta: 2.0 });
        let stitched = stitched_green(&seq, &plan, z).unwrap();
        let oracle = mp_green_quadrature(1.0, 2.0, z).unwrap();
        assert!((stitched.value - oracle).norm() < 1e-8);
    }

    #[test]
    fn rejects_real_frequency_everywhere() {
        let seq = CoeffSequence::toy_irrelevant();
        let plan = StitchPlan::new(10, Terminator::Constant);
        assert!(stitched_green(&seq, &plan, c(1.0, 0.0)).is_err());
        assert!(constant_tail_green(c(1.0, 0.0), 1.0).is_err());
        assert!(error_bound_finite_im(&seq, &plan, c(1.0, 0.0), 64).is_err());
    }
}
