//! Energy current from the lattice continuity equation. With the energy
//! density `h_x` (the Hamiltonian's unit cell anchored at site `x`), the
//! current density solves `i[H, h_x] = j_x - j_{x+1}`; its word-class
//! content seeds the recursion for energy transport.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::hamiltonian::SpinHamiltonian;
use crate::op::TranslationInvariantOperator;
use crate::pauli::{commutator_part, PauliWord};
use recmethod_core::{Error, Result};

const CONTINUITY_TOLERANCE: f64 = 1e-12;

/// The current density as a word-class operator, plus the diagnostics of
/// the continuity solve.
#[derive(Clone, Debug)]
pub struct EnergyCurrent {
    /// Class content of `j_0`; real amplitudes.
    pub operator: TranslationInvariantOperator,
    /// Largest per-class defect of the telescoping identity, relative to
    /// the largest derivative amplitude.
    pub continuity_residual: f64,
    /// `<j_0, j_0> / <h_0, h_0>`, the prefactor relating the current's
    /// spectral function to the diffusion constant.
    pub norm_ratio: f64,
}

/// Solves `i[H, h_0] = j_0 - T(j_0)` for the current density `j_0` and
/// returns its word-class content. The positional derivative is grouped by
/// word class; continuity forces each class's amplitudes to sum to zero,
/// and the class content of `j_0` is then minus the first moment.
pub fn energy_current(h: &SpinHamiltonian) -> Result<EnergyCurrent> {
    // d = i [H, h_0] with anchor positions. The y = 0 cell is [h_0, h_0] = 0
    // identically; skipping it keeps the cancellation out of the floats.
    let mut derivative: HashMap<(PauliWord, i64), f64> = HashMap::new();
    for &(q, cq) in h.terms() {
        for &(p, cp) in h.terms() {
            for y in -(p.len() as i64 - 1)..=(q.len() as i64 - 1) {
                if y == 0 {
                    continue;
                }
                if let Some((quarters, word, anchor)) = commutator_part(&p, &q, -y)? {
                    // i [P(y), Q(0)] = 2 i^(quarters + 1) R for anticommuting
                    // Hermitian words; the odd phase makes the result real.
                    let amp = match quarters {
                        1 => -2.0 * cp * cq,
                        _ => 2.0 * cp * cq,
                    };
                    *derivative.entry((word, y + anchor)).or_insert(0.0) += amp;
                }
            }
        }
    }

    let mut entries: Vec<((PauliWord, i64), f64)> = derivative.into_iter().collect();
    entries.sort_by_key(|&(key, _)| key);
    let scale = entries
        .iter()
        .map(|&(_, d)| d.abs())
        .fold(1.0f64, f64::max);

    let mut terms: Vec<(PauliWord, Complex64)> = Vec::new();
    let mut residual = 0.0f64;
    let mut i = 0;
    while i < entries.len() {
        let word = entries[i].0 .0;
        let mut class_sum = 0.0;
        let mut moment = 0.0;
        while i < entries.len() && entries[i].0 .0 == word {
            let (pos, d) = (entries[i].0 .1, entries[i].1);
            class_sum += d;
            moment += pos as f64 * d;
            i += 1;
        }
        residual = residual.max(class_sum.abs() / scale);
        if moment != 0.0 {
            terms.push((word, Complex64::new(-moment, 0.0)));
        }
    }
    if residual > CONTINUITY_TOLERANCE {
        return Err(Error::Invalid(format!(
            "continuity equation has no local solution: telescoping residual {residual:.3e}"
        )));
    }

    let operator = TranslationInvariantOperator::from_terms(terms)?;
    let h_norm_sqr: f64 = h.terms().iter().map(|&(_, c)| c * c).sum();
    let norm_ratio = operator.norm().powi(2) / h_norm_sqr;
    Ok(EnergyCurrent {
        operator,
        continuity_residual: residual,
        norm_ratio,
    })
}
