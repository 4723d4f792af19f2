//! Translation-invariant spin-chain Hamiltonians with a finite-range unit
//! cell: `H = sum_x sum_t c_t T^x(w_t)` for Hermitian Pauli words `w_t` and
//! real couplings `c_t`.

use num_complex::Complex64;

use crate::op::TranslationInvariantOperator;
use crate::pauli::PauliWord;
use recmethod_core::{Error, Result};

/// One unit cell of a translation-invariant Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinHamiltonian {
    terms: Vec<(PauliWord, f64)>,
    range: u32,
}

impl SpinHamiltonian {
    /// Builds a Hamiltonian from unit-cell terms. Duplicate words merge,
    /// exact-zero couplings drop, and at least one term must survive.
    pub fn new(terms: impl IntoIterator<Item = (PauliWord, f64)>) -> Result<Self> {
        let mut merged: Vec<(PauliWord, f64)> = Vec::new();
        for (word, coupling) in terms {
            if !coupling.is_finite() {
                return Err(Error::Invalid(format!(
                    "coupling of {word} is not finite"
                )));
            }
            match merged.iter_mut().find(|(w, _)| *w == word) {
                Some((_, c)) => *c += coupling,
                None => merged.push((word, coupling)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        if merged.is_empty() {
            return Err(Error::Invalid("hamiltonian has no terms".into()));
        }
        merged.sort_by_key(|&(w, _)| w);
        let range = merged.iter().map(|(w, _)| w.len()).max().unwrap();
        Ok(Self {
            terms: merged,
            range,
        })
    }

    /// Ising chain `sum_x X_x X_{x+1} + gz Z_x + gx X_x`; zero fields drop
    /// their terms.
    pub fn ising(gz: f64, gx: f64) -> Result<Self> {
        Self::new([
            (PauliWord::parse("XX")?, 1.0),
            (PauliWord::parse("Z")?, gz),
            (PauliWord::parse("X")?, gx),
        ])
    }

    pub fn terms(&self) -> &[(PauliWord, f64)] {
        &self.terms
    }

    /// Longest unit-cell word in sites.
    pub fn range(&self) -> u32 {
        self.range
    }

    /// The energy density `h_0`: one unit cell as a word-class operator.
    pub fn density(&self) -> TranslationInvariantOperator {
        TranslationInvariantOperator::from_terms(
            self.terms
                .iter()
                .map(|&(w, c)| (w, Complex64::new(c, 0.0))),
        )
        .expect("finite couplings are valid amplitudes")
    }
}
