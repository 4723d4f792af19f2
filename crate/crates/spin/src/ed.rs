//! Brute-force recursion oracle on a periodic ring.
//!
//! Operators on `L` sites are dense coefficient vectors over the 4^L Pauli
//! string basis, orthonormal under the normalized trace inner product. The
//! ring recursion uses the same real representation as the infinite chain;
//! while every operator in play has support shorter than the ring, the two
//! agree step for step, which makes the ring an independent check on the
//! word-class implementation.

use crate::hamiltonian::SpinHamiltonian;
use crate::op::TranslationInvariantOperator;
use crate::pauli::phase_quarters;
use recmethod_core::{Error, Result};

const MAX_SITES: u32 = 14;
const BREAKDOWN_THRESHOLD: f64 = 1e-13;

/// Ring recursion coefficients plus the a-priori validity bound.
#[derive(Clone, Debug)]
pub struct EdRun {
    /// `b_1 ... b_n`; truncated early if the recursion terminated.
    pub b: Vec<f64>,
    /// Steps through which `b` is guaranteed to match the infinite chain:
    /// worst-case support growth keeps every operator shorter than the
    /// ring. Later coefficients are ring artifacts unless the measured
    /// support of an infinite-chain run says otherwise.
    pub valid_through: usize,
}

#[inline]
fn rotate(mask: u64, by: u32, sites: u32) -> u64 {
    ((mask << by) | (mask >> (sites - by))) & ((1u64 << sites) - 1)
}

/// Runs the recursion for `steps` coefficients on a periodic ring of
/// `sites` sites. The seed's scale is irrelevant (the ring vector is
/// normalized internally), but its amplitudes must be all real or all
/// imaginary, as in the infinite-chain run.
pub fn ed_oracle_coeffs(
    h: &SpinHamiltonian,
    seed: &TranslationInvariantOperator,
    sites: u32,
    steps: usize,
) -> Result<EdRun> {
    if sites > MAX_SITES {
        return Err(Error::ResourceLimit(format!(
            "a ring of {sites} sites needs more than the {MAX_SITES}-site dense budget"
        )));
    }
    if sites < 2 {
        return Err(Error::Invalid("the ring needs at least 2 sites".into()));
    }
    if steps == 0 || steps > 2 * sites as usize {
        return Err(Error::Invalid(format!(
            "steps must lie in 1..={} on {sites} sites: wraparound invalidates longer runs",
            2 * sites
        )));
    }
    if seed.is_zero() {
        return Err(Error::Invalid("the seed operator is zero".into()));
    }

    // Real representation of the seed, as in the infinite-chain run.
    let real = seed.is_real();
    if !real && !seed.is_imaginary() {
        return Err(Error::Invalid(
            "seed must be Hermitian or i times Hermitian: amplitudes mix real and imaginary parts"
                .into(),
        ));
    }

    let ell = sites;
    let dim = 1usize << (2 * ell);
    let site_mask = (1u64 << ell) - 1;

    // Seed vector: every ring translate of every class term.
    let mut current = vec![0.0f64; dim];
    let mut seed_support = 0u32;
    for &(word, amp) in seed.terms() {
        if word.len() > ell {
            return Err(Error::Invalid(format!(
                "seed word {word} does not fit on {ell} sites"
            )));
        }
        seed_support = seed_support.max(word.len());
        let amp = if real { amp.re } else { amp.im };
        for t in 0..ell {
            let x = rotate(word.x_mask(), t, ell);
            let z = rotate(word.z_mask(), t, ell);
            current[(x | (z << ell)) as usize] += amp;
        }
    }
    let norm = current.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Invalid(
            "seed translates cancel on this ring".into(),
        ));
    }
    for v in &mut current {
        *v /= norm;
    }

    // Every ring translate of every Hamiltonian term.
    let mut generators: Vec<(u64, u64, f64)> = Vec::new();
    for &(word, c) in h.terms() {
        if word.len() > ell {
            return Err(Error::Invalid(format!(
                "hamiltonian word {word} does not fit on {ell} sites"
            )));
        }
        for t in 0..ell {
            generators.push((
                rotate(word.x_mask(), t, ell),
                rotate(word.z_mask(), t, ell),
                c,
            ));
        }
    }

    let growth = h.range().saturating_sub(1) as usize;
    let headroom = (ell - 1).saturating_sub(seed_support) as usize;
    let valid_through = if growth == 0 {
        steps
    } else {
        steps.min(headroom / growth)
    };

    let mut previous = vec![0.0f64; dim];
    let mut last_b = 0.0f64;
    let mut b = Vec::with_capacity(steps);
    for _ in 0..steps {
        // K(T) = -i [H, T] entry by entry: a generator either commutes
        // with a basis string or contributes +-2c times the coefficient
        // to the XOR target, the sign set by the product phase.
        let mut acc = vec![0.0f64; dim];
        for &(tx, tz, c) in &generators {
            let target_mask = tx | (tz << ell);
            for (idx, &v) in current.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let vx = idx as u64 & site_mask;
                let vz = idx as u64 >> ell;
                if ((tx & vz).count_ones() + (tz & vx).count_ones()) & 1 == 0 {
                    continue;
                }
                let factor = match phase_quarters(tx, tz, vx, vz) {
                    1 => 2.0 * c,
                    _ => -2.0 * c,
                };
                acc[idx ^ target_mask as usize] += factor * v;
            }
        }
        for (a, p) in acc.iter_mut().zip(&previous) {
            *a += last_b * p;
        }
        let b_next = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_next < BREAKDOWN_THRESHOLD {
            break;
        }
        for v in &mut acc {
            *v /= b_next;
        }
        b.push(b_next);
        last_b = b_next;
        previous = std::mem::replace(&mut current, acc);
    }
    let valid_through = valid_through.min(b.len());
    Ok(EdRun { b, valid_through })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::energy_current;
    use crate::lanczos::{lanczos_run, LanczosOptions};
    use crate::pauli::PauliWord;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn w(s: &str) -> PauliWord {
        PauliWord::parse(s).unwrap()
    }

    fn z_density() -> TranslationInvariantOperator {
        TranslationInvariantOperator::from_terms([(w("Z"), Complex64::new(1.0, 0.0))])
            .unwrap()
    }

    #[test]
    fn xx_ring_reproduces_the_exact_z_density_spectrum() {
        let h = SpinHamiltonian::new([(w("XX"), 1.0)]).unwrap();
        let run = ed_oracle_coeffs(&h, &z_density(), 8, 5).unwrap();
        assert_eq!(run.b.len(), 2);
        assert_relative_eq!(run.b[0], 8.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(run.b[1], 8.0f64.sqrt(), epsilon = 1e-12);
        assert_eq!(run.valid_through, 2);
    }

    #[test]
    fn ring_matches_the_infinite_chain_inside_the_window() {
        let h = SpinHamiltonian::ising(-1.05, 0.5).unwrap();
        let seed = energy_current(&h).unwrap().operator.normalized().unwrap();
        let ring = ed_oracle_coeffs(&h, &seed, 8, 8).unwrap();
        let chain = lanczos_run(&h, &seed, 8, &LanczosOptions::default()).unwrap();
        // Seed support 2 on 8 sites guarantees five steps.
        assert_eq!(ring.valid_through, 5);
        for n in 0..ring.valid_through {
            assert_relative_eq!(ring.b[n], chain.b[n], epsilon = 1e-12);
        }
    }

    #[test]
    fn oracle_rejects_oversized_requests() {
        let h = SpinHamiltonian::ising(-1.05, 0.5).unwrap();
        let seed = z_density();
        assert!(ed_oracle_coeffs(&h, &seed, 15, 4).is_err());
        assert!(ed_oracle_coeffs(&h, &seed, 6, 13).is_err());
        assert!(ed_oracle_coeffs(&h, &seed, 1, 1).is_err());
        let long = TranslationInvariantOperator::from_terms([(
            w("ZZZZZZZ"),
            Complex64::new(1.0, 0.0),
        )])
        .unwrap();
        assert!(ed_oracle_coeffs(&h, &long, 4, 2).is_err());
    }
}
