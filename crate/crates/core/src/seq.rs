//! Lanczos coefficient sequences.
//!
//! Every approximation in this crate starts from a positive sequence `b_n`,
//! either produced in closed form or tabulated from a chain computation.
//! The builtin families cover the stitching references (Meixner-Pollaczek),
//! the two toy models with irrelevant/relevant staggering, a Freud-weight
//! form, and the quasilinear `n/log n` family with tunable staggering.

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::real::Real;

/// Parameters for the quasilinear family
/// `b_n = alpha * n/log(n+1) + gamma + amp * (-1)^n * log(n+1)^(-stagger_exp)`.
///
/// `log(n+1)` rather than `log n` keeps `n = 1` regular. With
/// `stagger_exp = 0` the staggering is a constant `amp * (-1)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasilinearParams {
    pub alpha: f64,
    pub gamma: f64,
    pub amp: f64,
    pub stagger_exp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `b_n = alpha * sqrt(n(n - 1 + eta))`, the stitching family.
    MeixnerPollaczek { alpha: f64, eta: f64 },
    /// `b_n = n^2 / sqrt(n^2 - 1/4)`; staggering decays like `n^-2`.
    ToyIrrelevant,
    /// `b_n = n + 1 + (-1)^n n^(-2/3) / 2`; staggering decays slowly.
    ToyRelevant,
    /// `b_n = n/2 + (-1)^n / (2 log(n+2))^2`, the Freud-weight form.
    /// The argument is shifted by 2, not 1: with `log(n+1)` the n = 1
    /// value would be negative.
    FreudLike,
    /// Quasilinear growth with logarithmic staggering (see [`QuasilinearParams`]).
    OghOneD(QuasilinearParams),
    /// Stored values; `values[i]` is `b_(i+1)`, and `b_0 = 1` by convention.
    Tabulated(Tabulated),
    /// An arbitrary expression over `n`, evaluated in extended precision.
    Custom(Expression),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    values: Vec<f64>,
    /// Present when the source file carried extended-precision values.
    values_ext: Option<Vec<DoubleDouble>>,
}

impl Tabulated {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("empty tabulated sequence".into()));
        }
        if let Some(i) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "tabulated b_{} = {} is not a positive finite number",
                i + 1,
                values[i]
            )));
        }
        Ok(Self {
            values,
            values_ext: None,
        })
    }

    pub fn with_extended(values_ext: Vec<DoubleDouble>) -> Result<Self> {
        let values: Vec<f64> = values_ext.iter().map(|v| v.to_f64()).collect();
        let mut t = Self::new(values)?;
        t.values_ext = Some(values_ext);
        Ok(t)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_extended(&self) -> Option<&[DoubleDouble]> {
        self.values_ext.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A positive coefficient sequence `b_1, b_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSequence {
    kind: SequenceKind,
}

impl CoeffSequence {
    pub fn meixner_pollaczek(alpha: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(eta > 0.0) {
            return Err(Error::Invalid(format!(
                "Meixner-Pollaczek needs alpha > 0 and eta > 0, got ({alpha}, {eta})"
            )));
        }
        Ok(Self {
            kind: SequenceKind::MeixnerPollaczek { alpha, eta },
        })
    }

    pub fn toy_irrelevant() -> Self {
        Self {
            kind: SequenceKind::ToyIrrelevant,
        }
    }

    pub fn toy_relevant() -> Self {
        Self {
            kind: SequenceKind::ToyRelevant,
        }
    }

    pub fn freud_like() -> Self {
        Self {
            kind: SequenceKind::FreudLike,
        }
    }

    pub fn ogh_one_d(params: QuasilinearParams) -> Result<Self> {
        if !(params.alpha > 0.0) || !params.gamma.is_finite() || !params.amp.is_finite() {
            return Err(Error::Invalid(format!("bad quasilinear parameters {params:?}")));
        }
        if params.stagger_exp < 0.0 {
            return Err(Error::Invalid(
                "staggering exponent must be nonnegative".into(),
            ));
        }
        Ok(Self {
            kind: SequenceKind::OghOneD(params),
        })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            kind: SequenceKind::Tabulated(Tabulated::new(values)?),
        })
    }

    pub fn from_tabulated(t: Tabulated) -> Self {
        Self {
            kind: SequenceKind::Tabulated(t),
        }
    }

    pub fn custom(expression: &str) -> Result<Self> {
        let expr = Expression::parse(expression)?;
        // Catch obviously broken expressions up front.
        let probe = Self {
            kind: SequenceKind::Custom(expr),
        };
        probe.eval::<f64>(1)?;
        probe.eval::<f64>(2)?;
        Ok(probe)
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// Number of available coefficients, or `None` when unbounded.
    pub fn n_max(&self) -> Option<u64> {
        match &self.kind {
            SequenceKind::Tabulated(t) => Some(t.len() as u64),
            _ => None,
        }
    }

    /// `b_n` for `n >= 1` in the requested scalar.
    pub fn eval<R: Real>(&self, n: u64) -> Result<R> {
        if n == 0 {
            return Err(Error::Invalid("coefficient index starts at 1".into()));
        }
        let v = match &self.kind {
            SequenceKind::MeixnerPollaczek { alpha, eta } => {
                let nn = R::of_u64(n);
                R::of(*alpha) * (nn * (nn - R::one() + R::of(*eta))).sqrt()
            }
            SequenceKind::ToyIrrelevant => {
                let nn = R::of_u64(n);
                nn * nn / (nn * nn - R::of(0.25)).sqrt()
            }
            SequenceKind::ToyRelevant => {
                let nn = R::of_u64(n);
                let stag = nn.powf(-(R::of(2.0) / R::of(3.0))) / R::of(2.0);
                nn + R::one() + parity_sign::<R>(n) * stag
            }
            SequenceKind::FreudLike => {
                let nn = R::of_u64(n);
                let l = (nn + R::of(2.0)).ln();
                nn / R::of(2.0) + parity_sign::<R>(n) / (R::of(4.0) * l * l)
            }
            SequenceKind::OghOneD(p) => {
                let nn = R::of_u64(n);
                let l = (nn + R::one()).ln();
                let mut v = R::of(p.alpha) * nn / l + R::of(p.gamma);
                if p.amp != 0.0 {
                    v += R::of(p.amp) * parity_sign::<R>(n) * log_power(l, -p.stagger_exp);
                }
                v
            }
            SequenceKind::Tabulated(t) => {
                let i = (n - 1) as usize;
                if i >= t.values.len() {
                    return Err(Error::Invalid(format!(
                        "index {n} out of range for {} tabulated coefficients",
                        t.values.len()
                    )));
                }
                match &t.values_ext {
                    Some(ext) => R::of_dd(ext[i]),
                    None => R::of(t.values[i]),
                }
            }
            SequenceKind::Custom(e) => R::of_dd(e.eval(n)?),
        };
        if !(v > R::zero()) || !v.is_finite() {
            return Err(Error::Invalid(format!(
                "sequence value b_{n} = {v} is not positive"
            )));
        }
        Ok(v)
    }

    /// Convenience: `b_1..b_n` as `f64`.
    pub fn take(&self, n: u64) -> Result<Vec<f64>> {
        (1..=n).map(|k| self.eval::<f64>(k)).collect()
    }

    /// Short machine-readable description, used in file headers and cache keys.
    pub fn describe(&self) -> String {
        match &self.kind {
            SequenceKind::MeixnerPollaczek { alpha, eta } => {
                format!("mp alpha={alpha:e} eta={eta:e}")
            }
            SequenceKind::ToyIrrelevant => "toy-irrelevant".into(),
            SequenceKind::ToyRelevant => "toy-relevant".into(),
            SequenceKind::FreudLike => "freud".into(),
            SequenceKind::OghOneD(p) => format!(
                "ogh1d alpha={:e} gamma={:e} amp={:e} a={:e}",
                p.alpha, p.gamma, p.amp, p.stagger_exp
            ),
            SequenceKind::Tabulated(t) => format!("tabulated len={}", t.len()),
            SequenceKind::Custom(e) => format!("custom {}", e.source()),
        }
    }
}

impl std::fmt::Display for CoeffSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.describe())
    }
}

#[inline]
fn parity_sign<R: Real>(n: u64) -> R {
    if n % 2 == 0 {
        R::one()
    } else {
        -R::one()
    }
}

/// `l^p` taking the integer fast path when possible.
#[inline]
fn log_power<R: Real>(l: R, p: f64) -> R {
    if p == 0.0 {
        R::one()
    } else if p.fract() == 0.0 && p.abs() <= 64.0 {
        l.powi(p as i32)
    } else {
        l.powf(R::of(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn meixner_pollaczek_values() {
        let s = CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap();
        // eta = 1 collapses to b_n = alpha n exactly.
        for n in 1..=2000u64 {
            assert_eq!(s.eval::<f64>(n).unwrap(), n as f64);
        }
        let s = CoeffSequence::meixner_pollaczek(2.0, 3.0).unwrap();
        assert_relative_eq!(
            s.eval::<f64>(5).unwrap(),
            2.0 * (5.0f64 * 7.0).sqrt(),
            max_relative = 1e-15
        );
        assert!(CoeffSequence::meixner_pollaczek(0.0, 1.0).is_err());
        assert!(CoeffSequence::meixner_pollaczek(1.0, -2.0).is_err());
    }

    #[test]
    fn toy_values_match_closed_forms() {
        let s = CoeffSequence::toy_irrelevant();
        assert_relative_eq!(
            s.eval::<f64>(1).unwrap(),
            2.0 / 3.0f64.sqrt(),
            max_relative = 1e-15
        );
        let s = CoeffSequence::toy_relevant();
        assert_relative_eq!(
            s.eval::<f64>(2).unwrap(),
            3.0 + 0.5 * 2.0f64.powf(-2.0 / 3.0),
            max_relative = 1e-15
        );
        assert_relative_eq!(s.eval::<f64>(2).unwrap(), 3.3149802624737185, max_relative = 1e-12);
    }

    #[test]
    fn freud_like_is_positive_everywhere() {
        let s = CoeffSequence::freud_like();
        for n in 1..=10_000u64 {
            assert!(s.eval::<f64>(n).unwrap() > 0.0);
        }
        // Asymptotic form: n/2 plus a staggering ~ (2 log n)^-2.
        let b = s.eval::<f64>(10_000).unwrap();
        assert_relative_eq!(b, 5000.0 + 0.25 / (10_002f64).ln().powi(2), max_relative = 1e-12);
    }

    #[test]
    fn quasilinear_family_matches_formula() {
        let p = QuasilinearParams {
            alpha: 1.0,
            gamma: 1.0,
            amp: 0.1,
            stagger_exp: 3.0,
        };
        let s = CoeffSequence::ogh_one_d(p).unwrap();
        let n = 7u64;
        let l = (n as f64 + 1.0).ln();
        assert_relative_eq!(
            s.eval::<f64>(n).unwrap(),
            n as f64 / l + 1.0 - 0.1 * l.powi(-3),
            max_relative = 1e-14
        );
        // Constant staggering via exponent 0.
        let p = QuasilinearParams {
            alpha: 1.0,
            gamma: 0.0,
            amp: 1.0,
            stagger_exp: 0.0,
        };
        let s = CoeffSequence::ogh_one_d(p).unwrap();
        assert_relative_eq!(
            s.eval::<f64>(4).unwrap(),
            4.0 / 5.0f64.ln() + 1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tabulated_bounds_and_positivity() {
        let s = CoeffSequence::tabulated(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.eval::<f64>(3).unwrap(), 3.0);
        assert_eq!(s.n_max(), Some(3));
        assert!(s.eval::<f64>(4).is_err());
        assert!(s.eval::<f64>(0).is_err());
        assert!(CoeffSequence::tabulated(vec![1.0, -2.0]).is_err());
        assert!(CoeffSequence::tabulated(vec![]).is_err());
    }

    #[test]
    fn custom_expressions_work_and_are_validated() {
        let s = CoeffSequence::custom("n + 1 + 0.25*(-1)^n*log(n+1)^(-2)").unwrap();
        let n = 6u64;
        let expect = 7.0 + 0.25 * (7f64).ln().powi(-2);
        assert_relative_eq!(s.eval::<f64>(n).unwrap(), expect, max_relative = 1e-14);
        // Rejected: negative at n = 1.
        assert!(CoeffSequence::custom("n - 10").is_err());
        // Rejected: parse error.
        assert!(CoeffSequence::custom("n +* 2").is_err());
    }

    #[test]
    fn extended_and_double_agree() {
        let seqs = [
            CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap(),
            CoeffSequence::toy_irrelevant(),
            CoeffSequence::toy_relevant(),
            CoeffSequence::freud_like(),
        ];
        for s in &seqs {
            for n in [1u64, 2, 17, 400] {
                let d: f64 = s.eval(n).unwrap();
                let x: DoubleDouble = s.eval(n).unwrap();
                assert_relative_eq!(d, x.to_f64(), max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn describe_is_stable() {
        let s = CoeffSequence::meixner_pollaczek(1.0, 3.0).unwrap();
        assert_eq!(s.describe(), "mp alpha=1e0 eta=3e0");
        assert_eq!(CoeffSequence::toy_relevant().describe(), "toy-relevant");
    }
}
