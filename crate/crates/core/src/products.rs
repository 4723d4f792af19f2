//! Infinite products over coefficient ratios and the zero-frequency spectral
//! quantities built from them.
//!
//! The central object is `Pi_n = (1 / b_n) prod_{k <= n/2} b_{2k}^2 / b_{2k-1}^2`,
//! whose limit (when it exists) is the spectral function at the origin up to a
//! factor of pi. Successive values obey `Pi_n = Pi_{n-1} (b_n / b_{n-1})^{(-1)^n}`,
//! so a single near-unity logarithm per step, compensated-summed, carries the
//! whole scan in log space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::seq::CoeffSequence;
use crate::special::ln_gamma;

/// Streaming evaluation of `log Pi_n`, one coefficient at a time.
#[derive(Clone, Debug)]
pub struct ProductScan<R: Real> {
    n: u64,
    b_prev: R,
    log_pi: R,
    comp: R,
}

impl<R: Real> Default for ProductScan<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> ProductScan<R> {
    pub fn new() -> Self {
        ProductScan {
            n: 0,
            b_prev: R::one(),
            log_pi: R::zero(),
            comp: R::zero(),
        }
    }

    /// Advance from `Pi_n` to `Pi_{n+1}` given `b_{n+1}`; returns the new
    /// `log Pi`.
    pub fn push(&mut self, b_next: R) -> R {
        self.n += 1;
        let mut term = (b_next / self.b_prev).ln();
        if self.n % 2 == 1 {
            term = -term;
        }
        let y = term - self.comp;
        let t = self.log_pi + y;
        self.comp = (t - self.log_pi) - y;
        self.log_pi = t;
        self.b_prev = b_next;
        self.log_pi
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn log_pi(&self) -> R {
        self.log_pi
    }

    pub fn pi(&self) -> R {
        self.log_pi.exp()
    }
}

/// Full record of a product scan.
#[derive(Clone, Debug)]
pub struct ProductTrace {
    /// `log Pi_n` for `n = 1 ..= n_max`.
    pub log_values: Vec<f64>,
    pub n_max: u64,
}

impl ProductTrace {
    pub fn pi(&self, n: u64) -> f64 {
        self.log_values[n as usize - 1].exp()
    }
}

/// Scan `Pi_n` up to `n_max`, keeping every value.
pub fn pi_product(seq: &CoeffSequence, n_max: u64) -> Result<ProductTrace> {
    if n_max == 0 {
        return Err(Error::Invalid("product scan needs n_max >= 1".into()));
    }
    let mut scan = ProductScan::<f64>::new();
    let mut log_values = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        log_values.push(scan.push(seq.eval(n)?));
    }
    Ok(ProductTrace { log_values, n_max })
}

/// `Pi_n` by direct multiplication, for cross-checking the log-space scan on
/// short ranges.
pub fn pi_product_direct(seq: &CoeffSequence, n: u64) -> Result<f64> {
    let mut acc = 1.0f64;
    for k in 1..=n / 2 {
        let even: f64 = seq.eval(2 * k)?;
        let odd: f64 = seq.eval(2 * k - 1)?;
        acc *= (even / odd) * (even / odd);
    }
    let b_n: f64 = seq.eval(n)?;
    Ok(acc / b_n)
}

/// Zero-frequency Green's function of the Meixner-Pollaczek family:
/// `i 2^(eta-2) Gamma(eta/2)^2 / (alpha Gamma(eta))`.
pub fn mp_pi_limit(alpha: f64, eta: f64) -> Complex64 {
    let v = 2f64.powf(eta - 2.0) * (2.0 * ln_gamma(eta / 2.0) - ln_gamma(eta)).exp() / alpha;
    Complex64::new(0.0, v)
}

/// Closed form for the Meixner-Pollaczek partial product `Pi_n`.
///
/// The pair ratios telescope into Gamma functions:
/// `prod_{k<=M} b_{2k}^2 / b_{2k-1}^2
///    = sqrt(pi) Gamma(M+1) Gamma(M+(eta+1)/2) Gamma(eta/2)
///      / (Gamma((eta+1)/2) Gamma(M+1/2) Gamma(M+eta/2))`.
pub fn mp_pi_exact(alpha: f64, eta: f64, n: u64) -> Result<f64> {
    if n == 0 || alpha <= 0.0 || eta <= 0.0 {
        return Err(Error::Invalid(format!(
            "mp_pi_exact needs n >= 1 and positive parameters, got n={n}, alpha={alpha}, eta={eta}"
        )));
    }
    let m = (n / 2) as f64;
    let ln_pairs = 0.5 * std::f64::consts::PI.ln() + ln_gamma(m + 1.0)
        + ln_gamma(m + (eta + 1.0) / 2.0)
        + ln_gamma(eta / 2.0)
        - ln_gamma((eta + 1.0) / 2.0)
        - ln_gamma(m + 0.5)
        - ln_gamma(m + eta / 2.0);
    let nn = n as f64;
    let b_n = alpha * (nn * (nn - 1.0 + eta)).sqrt();
    Ok((ln_pairs - b_n.ln()).exp())
}

/// Outcome of the dyadic boundedness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionVerdict {
    /// The accumulated integral converges: spectral value finite and nonzero.
    FiniteNonzero,
    /// The integral grows without bound: spectral value infinite.
    Divergent,
    /// The integral decreases without bound: spectral value zero.
    Vanishing,
    /// The sampled range cannot separate the cases.
    Marginal,
}

/// Dyadic record of the criterion integral.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub verdict: CriterionVerdict,
    /// `(n, I_n)` at powers of two.
    pub checkpoints: Vec<(u64, f64)>,
    /// Differences of `I_n` between consecutive checkpoints.
    pub increments: Vec<f64>,
}

/// Boundedness test for `integral dn s_n / f_n`, sampled as a unit-step sum
/// from `n_min` to `n_max` with checkpoints at powers of two.
///
/// Convergence is declared when the checkpoint increments decay geometrically
/// (ratio bounded below 3/4 over the last four doublings); divergence when
/// the integral moves monotonically with non-collapsing increments across at
/// least four doublings; anything else is marginal.
pub fn convergence_criterion<F>(mut ratio: F, n_min: u64, n_max: u64) -> Result<CriterionReport>
where
    F: FnMut(u64) -> Result<f64>,
{
    if n_min < 1 || n_max <= n_min {
        return Err(Error::Invalid(format!(
            "criterion range [{n_min}, {n_max}] is empty or starts at zero"
        )));
    }
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    let mut checkpoints = Vec::new();
    for n in n_min..=n_max {
        let y = ratio(n)? - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        if n.is_power_of_two() && n >= 16 {
            checkpoints.push((n, acc));
        }
    }
    let increments: Vec<f64> = checkpoints.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let verdict = classify_increments(&increments, acc);
    Ok(CriterionReport {
        verdict,
        checkpoints,
        increments,
    })
}

pub(crate) fn classify_increments(increments: &[f64], total: f64) -> CriterionVerdict {
    if increments.len() < 4 {
        return CriterionVerdict::Marginal;
    }
    let tail = &increments[increments.len() - 4..];
    let scale = total.abs().max(1.0);
    if tail.iter().all(|d| d.abs() < 1e-9 * scale) {
        return CriterionVerdict::FiniteNonzero;
    }
    let mut geometric = true;
    let mut monotone = true;
    let sign = tail[3].signum();
    for w in tail.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if next.abs() > 0.75 * prev.abs() {
            geometric = false;
        }
        if prev.signum() != sign || next.signum() != sign {
            monotone = false;
        }
    }
    if geometric {
        CriterionVerdict::FiniteNonzero
    } else if monotone {
        if sign > 0.0 {
            CriterionVerdict::Divergent
        } else {
            CriterionVerdict::Vanishing
        }
    } else {
        CriterionVerdict::Marginal
    }
}

/// Criterion applied to a coefficient sequence: the staggered part is split
/// off with a streaming three-point kernel and `s_n / f_n` is accumulated.
pub fn sequence_criterion(seq: &CoeffSequence, n_max: u64) -> Result<CriterionReport> {
    if n_max < 32 {
        return Err(Error::Invalid(
            "sequence criterion needs n_max >= 32".into(),
        ));
    }
    let mut window: [f64; 3] = [seq.eval(1)?, seq.eval(2)?, seq.eval(3)?];
    convergence_criterion(
        |n| {
            // window holds b_{n-1}, b_n, b_{n+1}
            let f = 0.25 * (window[0] + 2.0 * window[1] + window[2]);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let s = sign * (window[1] - f);
            let value = s / f;
            if n + 2 <= n_max {
                window = [window[1], window[2], seq.eval::<f64>(n + 2)?];
            }
            Ok(value)
        },
        2,
        n_max - 1,
    )
}

/// Zero-frequency spectral estimate from the raw product.
#[derive(Clone, Debug)]
pub struct SpectralOrigin {
    /// `i Pi_N`.
    pub raw: Complex64,
    /// `i (Pi_N + Pi_{N+1}) / 2`, which cancels the leading staggering.
    pub averaged: Complex64,
    pub pi_n: f64,
    pub pi_next: f64,
    pub n: u64,
    pub verdict: CriterionVerdict,
}

/// Evaluate `i Pi_N` and its parity average at `N = n_max`, classifying the
/// limit with the dyadic criterion along the way.
pub fn spectral_origin(seq: &CoeffSequence, n_max: u64) -> Result<SpectralOrigin> {
    if n_max < 32 {
        return Err(Error::Invalid("spectral_origin needs n_max >= 32".into()));
    }
    let mut scan = ProductScan::<f64>::new();
    for n in 1..=n_max {
        scan.push(seq.eval(n)?);
    }
    let pi_n = scan.pi();
    scan.push(seq.eval(n_max + 1)?);
    let pi_next = scan.pi();
    let verdict = sequence_criterion(seq, n_max)?.verdict;
    Ok(SpectralOrigin {
        raw: Complex64::new(0.0, pi_n),
        averaged: Complex64::new(0.0, 0.5 * (pi_n + pi_next)),
        pi_n,
        pi_next,
        n: n_max,
        verdict,
    })
}

/// Transport coefficient from a current's Lanczos sequence.
#[derive(Clone, Copy, Debug)]
pub struct DiffusionEstimate {
    /// `norm_ratio * Pi_N`.
    pub d_raw: f64,
    /// Parity-averaged value.
    pub d_averaged: f64,
    /// `2 * d_averaged`, the conventional normalization for spin chains.
    pub two_d: f64,
    pub n: u64,
}

pub fn diffusion_estimate(
    seq: &CoeffSequence,
    norm_ratio: f64,
    n_max: u64,
) -> Result<DiffusionEstimate> {
    if norm_ratio <= 0.0 || !norm_ratio.is_finite() {
        return Err(Error::Invalid(format!(
            "norm ratio must be positive and finite, got {norm_ratio}"
        )));
    }
    let mut scan = ProductScan::<f64>::new();
    for n in 1..=n_max {
        scan.push(seq.eval(n)?);
    }
    let pi_n = scan.pi();
    scan.push(seq.eval(n_max + 1)?);
    let pi_next = scan.pi();
    let d_raw = norm_ratio * pi_n;
    let d_averaged = norm_ratio * 0.5 * (pi_n + pi_next);
    Ok(DiffusionEstimate {
        d_raw,
        d_averaged,
        two_d: 2.0 * d_averaged,
        n: n_max,
    })
}

/// Verdict of the zero-frequency Dirac-delta test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaVerdict {
    /// The polynomial sum converges: a delta function sits at zero frequency.
    Present,
    /// The sum diverges: no delta at zero frequency.
    Absent,
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub verdict: DeltaVerdict,
    /// `(n, S_n)` partial sums of `p_{2m}(0)^2` at dyadic m.
    pub partial_sums: Vec<(u64, f64)>,
    /// Reciprocal of the last partial sum: the delta weight if present.
    pub weight_bound: f64,
}

/// Test for a zero-frequency delta by summing `p_{2m}(0)^2`, evaluated
/// through the product identity `p_{2m}(0)^2 = 1 / (b_{2m} Pi_{2m})`.
pub fn dirac_delta_test(seq: &CoeffSequence, m_max: u64) -> Result<DeltaReport> {
    if m_max < 16 {
        return Err(Error::Invalid("delta test needs m_max >= 16".into()));
    }
    let mut scan = ProductScan::<f64>::new();
    let mut sum = 1.0f64; // p_0(0)^2
    let mut partial_sums = Vec::new();
    let mut increments = Vec::new();
    let mut last_checkpoint = sum;
    for m in 1..=m_max {
        let b_odd: f64 = seq.eval(2 * m - 1)?;
        let b_even: f64 = seq.eval(2 * m)?;
        scan.push(b_odd);
        let log_pi = scan.push(b_even);
        sum += (-log_pi - b_even.ln()).exp();
        if m.is_power_of_two() && m >= 16 {
            partial_sums.push((m, sum));
            increments.push(sum - last_checkpoint);
            last_checkpoint = sum;
        }
    }
    // The first increment is measured from S_1, not a doubling; drop it.
    let verdict = match classify_increments(&increments[1.min(increments.len())..], sum) {
        CriterionVerdict::FiniteNonzero => DeltaVerdict::Present,
        CriterionVerdict::Divergent => DeltaVerdict::Absent,
        _ => DeltaVerdict::Unresolved,
    };
    Ok(DeltaReport {
        verdict,
        partial_sums,
        weight_bound: 1.0 / sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::OriginState;
    use crate::quadrature::mp_density_origin;
    use approx::assert_relative_eq;

    #[test]
    fn alternating_pair_products_by_hand() {
        // b = (1, 2, 1, 2, ...): Pi_2 = 2, Pi_4 = 8.
        let seq = CoeffSequence::tabulated(vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let trace = pi_product(&seq, 6).unwrap();
        assert_relative_eq!(trace.pi(2), 2.0, max_relative = 1e-14);
        assert_relative_eq!(trace.pi(4), 8.0, max_relative = 1e-14);
    }

    #[test]
    fn log_space_scan_matches_direct_product() {
        for seq in [
            CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap(),
            CoeffSequence::toy_irrelevant(),
            CoeffSequence::toy_relevant(),
        ] {
            let trace = pi_product(&seq, 1000).unwrap();
            for n in [1u64, 2, 17, 100, 999, 1000] {
                let direct = pi_product_direct(&seq, n).unwrap();
                assert_relative_eq!(trace.pi(n), direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn harmonic_product_reaches_half_pi() {
        // b_n = n is the Wallis product; i Pi -> i pi / 2.
        let origin = spectral_origin(&CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap(), 10_000).unwrap();
        assert!((origin.raw.im - std::f64::consts::FRAC_PI_2).abs() < 0.01);
        assert!((origin.averaged.im - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
        assert_eq!(origin.verdict, CriterionVerdict::FiniteNonzero);
    }

    #[test]
    fn irrelevant_toy_product_reaches_its_limit() {
        let origin = spectral_origin(&CoeffSequence::toy_irrelevant(), 100_000).unwrap();
        let expect = std::f64::consts::PI * std::f64::consts::PI / 8.0;
        assert!(
            (origin.averaged.im - expect).abs() < 1e-3,
            "got {}, want {expect}",
            origin.averaged.im
        );
        assert_eq!(origin.verdict, CriterionVerdict::FiniteNonzero);
    }

    #[test]
    fn mp_limit_agrees_with_the_density_at_the_origin() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            let limit = mp_pi_limit(alpha, eta);
            let density = std::f64::consts::PI * mp_density_origin(alpha, eta);
            assert_relative_eq!(limit.im, density, max_relative = 1e-13);
            assert!(limit.re == 0.0);
        }
        assert_relative_eq!(
            mp_pi_limit(1.0, 1.0).im,
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-14
        );
        assert_relative_eq!(mp_pi_limit(1.0, 2.0).im, 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            mp_pi_limit(2.0, 3.0).im,
            std::f64::consts::PI / 8.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn closed_form_partial_product_matches_the_scan() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.5), (2.0, 3.0)] {
            let seq = CoeffSequence::meixner_pollaczek(alpha, eta).unwrap();
            let trace = pi_product(&seq, 1001).unwrap();
            for n in [2u64, 3, 40, 41, 1000, 1001] {
                let exact = mp_pi_exact(alpha, eta, n).unwrap();
                assert_relative_eq!(trace.pi(n), exact, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn closed_form_partial_product_approaches_the_limit() {
        for &(alpha, eta) in &[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (2.0, 2.0)] {
            let limit = mp_pi_limit(alpha, eta).im;
            let even = mp_pi_exact(alpha, eta, 100_000).unwrap();
            let odd = mp_pi_exact(alpha, eta, 100_001).unwrap();
            assert!(
                (0.5 * (even + odd) / limit - 1.0).abs() < 1e-3,
                "alpha={alpha}, eta={eta}"
            );
        }
    }

    #[test]
    fn criterion_separates_the_reference_ratios() {
        // s/f = n^(-3/2): integrable.
        let finite = convergence_criterion(|n| Ok((n as f64).powf(-1.5)), 2, 1 << 22).unwrap();
        assert_eq!(finite.verdict, CriterionVerdict::FiniteNonzero);
        // s/f = 1 / (n log n): a log-log divergence.
        let slow =
            convergence_criterion(|n| Ok(1.0 / (n as f64 * (n as f64).ln())), 2, 1 << 22).unwrap();
        assert_eq!(slow.verdict, CriterionVerdict::Divergent);
        // s = (log n)^-2 against f = n / log n: also divergent.
        let marginal = convergence_criterion(
            |n| {
                let x = n as f64;
                Ok(x.ln().powi(-2) / (x / x.ln()))
            },
            2,
            1 << 22,
        )
        .unwrap();
        assert_eq!(marginal.verdict, CriterionVerdict::Divergent);
        // Negative staggering drives the product to zero.
        let vanishing = convergence_criterion(|n| Ok(-1.0 / (n as f64)), 2, 1 << 22).unwrap();
        assert_eq!(vanishing.verdict, CriterionVerdict::Vanishing);
    }

    #[test]
    fn negatively_staggered_sequence_vanishes() {
        let seq = CoeffSequence::custom("n / log(n + 1) - 0.5 * (-1)^n").unwrap();
        let origin = spectral_origin(&seq, 1 << 18).unwrap();
        assert_eq!(origin.verdict, CriterionVerdict::Vanishing);
        assert!(origin.averaged.im < 1e-3);
    }

    #[test]
    fn product_identity_for_origin_polynomials() {
        // b_{2n} Pi_{2n} p_{2n}(0)^2 = 1.
        for seq in [
            CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap(),
            CoeffSequence::meixner_pollaczek(1.0, 2.5).unwrap(),
            CoeffSequence::toy_relevant(),
        ] {
            let mut origin = OriginState::<f64>::new();
            let mut scan = ProductScan::<f64>::new();
            for n in 1..=2000u64 {
                let b: f64 = seq.eval(n).unwrap();
                origin.step(b);
                scan.push(b);
                if n % 2 == 0 {
                    let p = origin.p;
                    let product = b * scan.pi() * p * p;
                    assert!(
                        (product - 1.0).abs() < 1e-10,
                        "n = {n}: identity defect {}",
                        product - 1.0
                    );
                }
            }
        }
    }

    #[test]
    fn harmonic_coefficients_have_no_delta() {
        // For b_n = n the sum of p_{2m}(0)^2 grows like log m / pi.
        let report = dirac_delta_test(&CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap(), 1 << 16).unwrap();
        assert_eq!(report.verdict, DeltaVerdict::Absent);
        let (m_last, s_last) = *report.partial_sums.last().unwrap();
        let (m_half, s_half) = report.partial_sums[report.partial_sums.len() - 2];
        let slope = (s_last - s_half) / ((m_last as f64).ln() - (m_half as f64).ln());
        assert!(
            (slope - std::f64::consts::FRAC_1_PI).abs() < 0.01,
            "log slope {slope}"
        );
    }

    #[test]
    fn dimerized_coefficients_produce_a_delta() {
        // b = (1, 2, 1, 2, ...): p_{2m}(0)^2 = 4^-m, so the sum converges
        // to 4/3 and the delta weight is 3/4.
        let seq = CoeffSequence::custom("2 - (1 - (-1)^n) / 2").unwrap();
        let report = dirac_delta_test(&seq, 1 << 10).unwrap();
        assert_eq!(report.verdict, DeltaVerdict::Present);
        assert_relative_eq!(report.weight_bound, 0.75, max_relative = 1e-12);
    }

    #[test]
    fn harmonic_diffusion_recovers_the_product_limit() {
        let est = diffusion_estimate(&CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap(), 1.0, 10_000)
            .unwrap();
        assert!((est.d_averaged - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
        assert_relative_eq!(est.two_d, 2.0 * est.d_averaged, max_relative = 1e-15);
        assert!(diffusion_estimate(&CoeffSequence::toy_irrelevant(), -1.0, 100).is_err());
    }
}
