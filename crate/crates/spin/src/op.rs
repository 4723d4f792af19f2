//! Translation-invariant operator densities `A = sum_x T^x(a_0)` stored as
//! a map from Pauli word classes to complex amplitudes. The inner product
//! is the infinite-temperature one per unit cell: distinct word classes are
//! orthonormal, so `<A, B> = sum_w conj(a_w) b_w`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::hamiltonian::SpinHamiltonian;
use crate::pauli::{commutator_part, quarters_to_complex, PauliWord};
use recmethod_core::{Error, Result};

/// A finite combination of Pauli word classes; the empty combination is the
/// zero operator.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationInvariantOperator {
    terms: Vec<(PauliWord, Complex64)>,
}

impl TranslationInvariantOperator {
    /// Builds an operator from class terms. Duplicate words merge and exact
    /// zeros drop.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (PauliWord, Complex64)>,
    ) -> Result<Self> {
        let mut map: HashMap<PauliWord, Complex64> = HashMap::new();
        for (word, amp) in terms {
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::Invalid(format!(
                    "amplitude of {word} is not finite"
                )));
            }
            *map.entry(word).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut terms: Vec<_> = map
            .into_iter()
            .filter(|&(_, a)| a != Complex64::new(0.0, 0.0))
            .collect();
        terms.sort_by_key(|&(w, _)| w);
        Ok(Self { terms })
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Class terms sorted by word.
    pub fn terms(&self) -> &[(PauliWord, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `<self, other> = sum_w conj(a_w) b_w` over matching word classes.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (wa, a) = self.terms[i];
            let (wb, b) = other.terms[j];
            match wa.cmp(&wb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.conj() * b;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(w, a)| (w, factor * a))
                .collect(),
        }
    }

    /// Unit-norm copy; errors on the zero operator.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Invalid("cannot normalize the zero operator".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Whether every amplitude is real (the operator itself, not i times a
    /// Hermitian one).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.im == 0.0)
    }

    pub fn is_imaginary(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.re == 0.0)
    }
}

/// The class of `[H, A]` for a translation-invariant `A`: the commutator of
/// `H` with one representative cell, `sum_y [h(y), a_0]`.
pub fn commutator_with_hamiltonian(
    h: &SpinHamiltonian,
    a: &TranslationInvariantOperator,
) -> Result<TranslationInvariantOperator> {
    let mut acc: HashMap<PauliWord, Complex64> = HashMap::new();
    for &(q, amp) in a.terms() {
        for &(p, c) in h.terms() {
            // p anchored at y against q anchored at 0; overlapping supports
            // only, since disjoint words commute.
            for y in -(p.len() as i64 - 1)..=(q.len() as i64 - 1) {
                if let Some((quarters, word, _)) = commutator_part(&p, &q, -y)? {
                    // [P, Q] = 2 P Q for anticommuting words.
                    let phase = quarters_to_complex(quarters);
                    *acc.entry(word).or_insert(Complex64::new(0.0, 0.0)) +=
                        2.0 * c * amp * phase;
                }
            }
        }
    }
    TranslationInvariantOperator::from_terms(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w(s: &str) -> PauliWord {
        PauliWord::parse(s).unwrap()
    }

    #[test]
    fn inner_product_sums_conjugated_amplitudes() {
        let a = TranslationInvariantOperator::from_terms([
            (w("Z"), Complex64::new(0.5, 0.0)),
            (w("XY"), Complex64::new(0.0, 2.0)),
        ])
        .unwrap();
        let ip = a.inner_product(&a);
        assert_relative_eq!(ip.re, 4.25);
        assert_relative_eq!(ip.im, 0.0);
        assert_relative_eq!(a.norm(), 4.25f64.sqrt());

        let b = TranslationInvariantOperator::from_terms([
            (w("XY"), Complex64::new(1.0, 0.0)),
        ])
        .unwrap();
        // <a, b> picks up conj(2i) * 1 = -2i.
        let cross = a.inner_product(&b);
        assert_relative_eq!(cross.re, 0.0);
        assert_relative_eq!(cross.im, -2.0);
    }

    #[test]
    fn terms_merge_and_exact_zeros_drop() {
        let a = TranslationInvariantOperator::from_terms([
            (w("Z"), Complex64::new(1.0, 0.0)),
            (w("Z"), Complex64::new(-1.0, 0.0)),
            (w("X"), Complex64::new(0.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(a.terms().len(), 1);
        assert!(!a.is_zero());
        assert!(TranslationInvariantOperator::zero().is_zero());
        assert!(TranslationInvariantOperator::zero().normalized().is_err());
    }

    #[test]
    fn commutator_of_xx_chain_with_z_density() {
        // [sum_x X_x X_{x+1}, Z_0] = -2i (X_{-1} Y_0 + Y_0 X_1).
        let h = SpinHamiltonian::new([(w("XX"), 1.0)]).unwrap();
        let z = TranslationInvariantOperator::from_terms([(
            w("Z"),
            Complex64::new(1.0, 0.0),
        )])
        .unwrap();
        let c = commutator_with_hamiltonian(&h, &z).unwrap();
        assert_eq!(c.terms().len(), 2);
        let expected = TranslationInvariantOperator::from_terms([
            (w("XY"), Complex64::new(0.0, -2.0)),
            (w("YX"), Complex64::new(0.0, -2.0)),
        ])
        .unwrap();
        assert_eq!(c, expected);
        // The Liouvillian is anti-Hermitian on Hermitian inputs, so the
        // diagonal matrix element vanishes.
        assert_relative_eq!(z.inner_product(&c).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(c.norm(), 8.0f64.sqrt());
    }

    #[test]
    fn commuting_hamiltonian_gives_zero() {
        let h = SpinHamiltonian::new([(w("Z"), 1.0)]).unwrap();
        let z = TranslationInvariantOperator::from_terms([(
            w("Z"),
            Complex64::new(1.0, 0.0),
        )])
        .unwrap();
        assert!(commutator_with_hamiltonian(&h, &z).unwrap().is_zero());
    }
}
