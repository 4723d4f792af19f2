//! Backward (descent) evaluation of the continued fraction.
//!
//! One level of the hierarchy maps the order-n Green's function to order n-1
//! through `g -> 1 / (z - b_n^2 g)`. Folding from a deep seed toward the
//! surface is the numerically stable direction: seed errors contract as the
//! fold walks down, so doubling the starting depth until the surface value
//! stops moving gives a certified evaluation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seq::CoeffSequence;

/// One descent level: `1 / (z - b^2 g)`.
pub fn mobius_apply(z: Complex64, b: f64, g: Complex64) -> Result<Complex64> {
    let denom = z - b * b * g;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularLevel { level: 0 });
    }
    Ok(denom.inv())
}

/// Tail seed placed at the starting depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailSeed {
    /// `-sign(Im z) * i / b_M`, the leading asymptotic value of a deep level.
    Asymptotic,
    /// Zero, which reproduces the truncated approximant exactly.
    Zero,
}

/// Controls for the depth-doubling schedule.
#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    /// Stop once successive depth doublings move the value less than this.
    pub tol: f64,
    /// Hard budget on the starting depth.
    pub max_depth: usize,
    /// Floor for the first starting depth.
    pub min_depth: usize,
    pub seed: TailSeed,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            tol: 1e-10,
            max_depth: 1 << 20,
            min_depth: 64,
            seed: TailSeed::Asymptotic,
        }
    }
}

/// A converged descent evaluation.
#[derive(Clone, Copy, Debug)]
pub struct GreenEvaluation {
    pub value: Complex64,
    /// Starting depth of the last fold.
    pub depth: usize,
    /// Change of the value over the final depth doubling.
    pub achieved: f64,
}

/// Evaluate the order-`level` Green's function of `seq` at `z` by descent,
/// doubling the starting depth from `max(4 * level, min_depth)` until the
/// surface value moves less than `opts.tol` or the depth budget runs out.
///
/// For quasilinear sequences `b_n ~ alpha n` the doubling deltas shrink like
/// `M^(-2 |Im z| / alpha)`, so the default budget resolves `tol = 1e-10`
/// down to roughly `|Im z| = 0.85 alpha`; closer to the real axis, either
/// relax the tolerance or raise the budget.
pub fn descent_green(
    seq: &CoeffSequence,
    z: Complex64,
    level: usize,
    opts: &DescentOptions,
) -> Result<GreenEvaluation> {
    if z.im == 0.0 {
        return Err(Error::Invalid("descent requires Im z != 0".into()));
    }
    let mut depth = (4 * level).max(opts.min_depth).max(level + 1);
    let mut prev = fold_with_retry(seq, z, level, depth, opts.seed)?;
    loop {
        if depth > opts.max_depth / 2 {
            return Err(Error::NoConvergence(format!(
                "descent exhausted the depth budget {} at z = {z}",
                opts.max_depth
            )));
        }
        depth *= 2;
        let next = fold_with_retry(seq, z, level, depth, opts.seed)?;
        let delta = (next - prev).norm();
        if delta < opts.tol {
            return Ok(GreenEvaluation {
                value: next,
                depth,
                achieved: delta,
            });
        }
        prev = next;
    }
}

/// Single fold from `depth` down to `level`, retrying at perturbed depths if
/// an intermediate level lands exactly on a pole.
fn fold_with_retry(
    seq: &CoeffSequence,
    z: Complex64,
    level: usize,
    depth: usize,
    seed: TailSeed,
) -> Result<Complex64> {
    let mut shift = 0;
    loop {
        match fold(seq, z, level, depth + shift, seed) {
            Err(Error::SingularLevel { .. }) if shift < 8 => shift += 1,
            other => return other,
        }
    }
}

/// Fold the continued fraction once from `depth` down to `level`.
pub fn fold(
    seq: &CoeffSequence,
    z: Complex64,
    level: usize,
    depth: usize,
    seed: TailSeed,
) -> Result<Complex64> {
    if depth <= level {
        return Err(Error::Invalid(format!(
            "descent depth {depth} must exceed the target level {level}"
        )));
    }
    let mut g = match seed {
        TailSeed::Zero => Complex64::new(0.0, 0.0),
        TailSeed::Asymptotic => {
            let b_m: f64 = seq.eval(depth as u64)?;
            Complex64::new(0.0, -z.im.signum() / b_m)
        }
    };
    for k in (level + 1..=depth).rev() {
        let b: f64 = seq.eval(k as u64)?;
        let denom = z - b * b * g;
        if denom == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularLevel { level: k });
        }
        g = denom.inv();
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyState;
    use crate::quadrature::mp_green_quadrature;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn asymptotic_seed_value() {
        // At z = -i with b_M = 100 the seed is 0.01i; a one-level fold then
        // equals mobius_apply(z, b_M, 0.01i).
        let seq = CoeffSequence::custom("100 + 0*n").unwrap();
        let z = c(0.0, -1.0);
        let folded = fold(&seq, z, 99, 100, TailSeed::Asymptotic).unwrap();
        let by_hand = mobius_apply(z, 100.0, c(0.0, 0.01)).unwrap();
        assert_relative_eq!(folded.re, by_hand.re, max_relative = 1e-15);
        assert_relative_eq!(folded.im, by_hand.im, max_relative = 1e-15);
    }

    #[test]
    fn zero_seed_reproduces_truncation() {
        let seq = CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap();
        let z = c(0.4, -1.1);
        for n in [1usize, 2, 7, 40] {
            let folded = fold(&seq, z, 0, n, TailSeed::Zero).unwrap();
            let mut state = PolyState::new(z);
            for k in 1..=n {
                state.step(seq.eval(k as u64).unwrap());
            }
            let truncated = state.truncated_green();
            assert_relative_eq!(folded.re, truncated.re, max_relative = 1e-12);
            assert_relative_eq!(folded.im, truncated.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_sequence_matches_closed_form() {
        // b = 1 for all n: G = (z + sqrt(z^2 - 4)) / 2 on the branch with
        // Im G opposing Im z. At z = -3i that is i (sqrt(13) - 3) / 2.
        let seq = CoeffSequence::custom("1 + 0*n").unwrap();
        let g = descent_green(&seq, c(0.0, -3.0), 0, &DescentOptions::default()).unwrap();
        let expect = (13f64.sqrt() - 3.0) / 2.0;
        assert_relative_eq!(g.value.im, expect, max_relative = 1e-10);
        assert!(g.value.re.abs() < 1e-12);
    }

    #[test]
    fn descent_is_stable_under_extra_depth() {
        let seq = CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap();
        let z = c(0.0, -1.0);
        let opts = DescentOptions::default();
        let g = descent_green(&seq, z, 0, &opts).unwrap();
        let deeper = fold(&seq, z, 0, 4 * g.depth, opts.seed).unwrap();
        assert!((g.value - deeper).norm() < 2.0 * opts.tol);
    }

    #[test]
    fn descent_agrees_with_quadrature_oracle() {
        let seq = CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap();
        let z = c(0.0, -1.0);
        let g = descent_green(&seq, z, 0, &DescentOptions::default()).unwrap();
        let oracle = mp_green_quadrature(1.0, 2.0, z).unwrap();
        assert!(
            (g.value - oracle).norm() < 1e-8,
            "descent {} vs quadrature {}",
            g.value,
            oracle
        );
    }

    #[test]
    fn inner_level_matches_shifted_family() {
        // The order-1 Green's function of MP(alpha, eta) is the order-0
        // Green's function of the shifted sequence b'_n = b_{n+1}.
        let seq = CoeffSequence::meixner_pollaczek(1.0, 2.0).unwrap();
        let z = c(0.3, -1.5);
        let opts = DescentOptions::default();
        let level1 = descent_green(&seq, z, 1, &opts).unwrap();
        let b: Vec<f64> = (2..=1 << 16).map(|n| seq.eval(n as u64).unwrap()).collect();
        let shifted = CoeffSequence::tabulated(b).unwrap();
        let direct = descent_green(&shifted, z, 0, &opts).unwrap();
        assert!((level1.value - direct.value).norm() < 1e-8);
    }

    #[test]
    fn rejects_real_z_and_small_depth() {
        let seq = CoeffSequence::meixner_pollaczek(1.0, 1.0).unwrap();
        assert!(descent_green(&seq, c(1.0, 0.0), 0, &DescentOptions::default()).is_err());
        assert!(fold(&seq, c(0.0, -1.0), 5, 5, TailSeed::Zero).is_err());
    }
}
