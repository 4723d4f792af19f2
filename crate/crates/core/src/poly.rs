//! Forward three-term recurrences for the orthogonal polynomials `p_n`
//! and the second-kind polynomials `q_n`.
//!
//! Seeds: `p_(-1) = 0`, `p_0 = 1`, `q_(-1) = -1`, `q_0 = 0`, with
//! `b_0 = 1`, so a single step rule
//! `b_(n+1) x_(n+1) = z x_n - b_n x_(n-1)` produces both families. The
//! values grow or shrink exponentially in general, so the complex state
//! carries a shared power-of-two exponent that is shed when magnitudes
//! leave a safe band.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::real::Real;
use crate::seq::CoeffSequence;
use num_complex::Complex64;

/// Norm-squared band outside which the state sheds a power of two.
const RESCALE_HI: f64 = 1e300;
const RESCALE_LO: f64 = 1e-300;

/// Polynomial pair values at a complex point after `n` steps.
#[derive(Debug, Clone, Copy)]
pub struct PolyState {
    pub n: usize,
    pub z: Complex64,
    /// `p_n`, `q_n` and their predecessors, all times `2^-exp2`.
    pub p: Complex64,
    pub p_prev: Complex64,
    pub q: Complex64,
    pub q_prev: Complex64,
    pub exp2: i32,
    /// The coefficient `b_n` used in the step that produced index `n`.
    pub b_n: f64,
}

impl PolyState {
    pub fn new(z: Complex64) -> Self {
        Self {
            n: 0,
            z,
            p: Complex64::new(1.0, 0.0),
            p_prev: Complex64::new(0.0, 0.0),
            q: Complex64::new(0.0, 0.0),
            q_prev: Complex64::new(-1.0, 0.0),
            exp2: 0,
            b_n: 1.0,
        }
    }

    /// Advances to index `n+1` using `b_n` (implicit in the state) and
    /// `b_next = b_(n+1)`.
    pub fn step(&mut self, b_next: f64) {
        let bn = self.b_n;
        let p_new = (self.z * self.p - bn * self.p_prev) / b_next;
        let q_new = (self.z * self.q - bn * self.q_prev) / b_next;
        self.p_prev = self.p;
        self.q_prev = self.q;
        self.p = p_new;
        self.q = q_new;
        self.n += 1;
        self.b_n = b_next;
        let m = self
            .p
            .norm_sqr()
            .max(self.p_prev.norm_sqr())
            .max(self.q.norm_sqr())
            .max(self.q_prev.norm_sqr());
        if m > RESCALE_HI {
            let s = 2f64.powi(-256);
            self.p *= s;
            self.p_prev *= s;
            self.q *= s;
            self.q_prev *= s;
            self.exp2 += 256;
        } else if m > 0.0 && m < RESCALE_LO {
            let s = 2f64.powi(256);
            self.p *= s;
            self.p_prev *= s;
            self.q *= s;
            self.q_prev *= s;
            self.exp2 -= 256;
        }
    }

    /// Truncated approximant `q_n / p_n`; the shared exponent cancels.
    pub fn truncated_green(&self) -> Complex64 {
        self.q / self.p
    }

    /// Applies the level-`n` Mobius map to a tail value `g = G^(n)`:
    /// `G = (q_n - b_n q_(n-1) g) / (p_n - b_n p_(n-1) g)`.
    pub fn apply_mobius(&self, g: Complex64) -> Complex64 {
        (self.q - self.b_n * self.q_prev * g) / (self.p - self.b_n * self.p_prev * g)
    }

    /// `b_n (q_n p_(n-1) - q_(n-1) p_n) * 4^exp2`, which the recurrence
    /// fixes at exactly one. Returns `None` when the exponent left the
    /// representable range (the check is meant for moderate depths).
    pub fn wronskian(&self) -> Option<Complex64> {
        if self.exp2.abs() > 500 {
            return None;
        }
        let w = self.b_n * (self.q * self.p_prev - self.q_prev * self.p);
        Some(w * 2f64.powi(2 * self.exp2))
    }
}

/// Runs the recurrence at `z` up to `n_max`, calling `visit` after every
/// step (indices `1..=n_max`).
pub fn polynomial_scan(
    seq: &CoeffSequence,
    z: Complex64,
    n_max: usize,
    mut visit: impl FnMut(&PolyState) -> Result<()>,
) -> Result<PolyState> {
    let mut st = PolyState::new(z);
    for n in 1..=n_max {
        let b: f64 = seq.eval(n as u64)?;
        st.step(b);
        visit(&st)?;
    }
    Ok(st)
}

/// Jet-valued recurrence state at a real expansion point, for derivative
/// extraction. No exponent ledger: intended for the quasilinear families
/// at the spectrum origin, where values stay polynomially bounded.
#[derive(Debug, Clone)]
pub struct JetPolyState<R: Real, const N: usize> {
    pub n: usize,
    pub x: R,
    pub p: Jet<R, N>,
    pub p_prev: Jet<R, N>,
    pub q: Jet<R, N>,
    pub q_prev: Jet<R, N>,
    pub b_n: R,
}

impl<R: Real, const N: usize> JetPolyState<R, N> {
    pub fn new(x: R) -> Self {
        Self {
            n: 0,
            x,
            p: Jet::constant(R::one()),
            p_prev: Jet::zero(),
            q: Jet::zero(),
            q_prev: Jet::constant(-R::one()),
            b_n: R::one(),
        }
    }

    pub fn step(&mut self, b_next: R) {
        let inv = R::one() / b_next;
        let p_new = self
            .p
            .mul_variable(self.x)
            .sub(self.p_prev.scale(self.b_n))
            .scale(inv);
        let q_new = self
            .q
            .mul_variable(self.x)
            .sub(self.q_prev.scale(self.b_n))
            .scale(inv);
        self.p_prev = self.p;
        self.q_prev = self.q;
        self.p = p_new;
        self.q = q_new;
        self.n += 1;
        self.b_n = b_next;
    }
}

/// Values of `p_n` and `q_n` at the origin, where the recurrence
/// decouples into a two-step ratio chain.
#[derive(Debug, Clone, Copy)]
pub struct OriginState<R: Real> {
    pub n: usize,
    pub p: R,
    pub p_prev: R,
    pub q: R,
    pub q_prev: R,
    pub b_n: R,
}

impl<R: Real> OriginState<R> {
    pub fn new() -> Self {
        Self {
            n: 0,
            p: R::one(),
            p_prev: R::zero(),
            q: R::zero(),
            q_prev: -R::one(),
            b_n: R::one(),
        }
    }

    pub fn step(&mut self, b_next: R) {
        let inv = R::one() / b_next;
        let p_new = -(self.b_n * self.p_prev) * inv;
        let q_new = -(self.b_n * self.q_prev) * inv;
        self.p_prev = self.p;
        self.q_prev = self.q;
        self.p = p_new;
        self.q = q_new;
        self.n += 1;
        self.b_n = b_next;
    }
}

impl<R: Real> Default for OriginState<R> {
    fn default() -> Self {
        Self::new()
    }
}

/// Checks the recurrence seeds against a directly evaluated coefficient,
/// mostly a guard against tabulated input running out mid-scan.
pub fn require_length(seq: &CoeffSequence, n_max: u64) -> Result<()> {
    match seq.n_max() {
        Some(len) if len < n_max => Err(Error::Invalid(format!(
            "sequence provides {len} coefficients, need {n_max}"
        ))),
        _ => Ok(()),
    }
}
