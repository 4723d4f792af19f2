//! Liouvillian recursion on the infinite chain.
//!
//! For a Hermitian seed (or `i` times one), every iterate is `i^n` times a
//! real combination of Pauli word classes: writing `O_n = i^n T_n`, the
//! recurrence `b_{n+1} O_{n+1} = L O_n - b_n O_{n-1}` with `L = [H, .]`
//! becomes `b_{n+1} T_{n+1} = K(T_n) + b_n T_{n-1}` where `K(T) = -i [H, T]`
//! maps real amplitude vectors to real amplitude vectors. Working with the
//! real representation keeps the arithmetic exact where the algebra is and
//! halves the memory; the sign flip on the `b_n` term comes from the `i^n`
//! prefactors.

use std::collections::HashMap;

use crate::hamiltonian::SpinHamiltonian;
use crate::op::TranslationInvariantOperator;
use crate::pauli::{commutator_part, PauliWord};
use recmethod_core::{Error, Result};

const BREAKDOWN_THRESHOLD: f64 = 1e-13;
const UNIT_NORM_TOLERANCE: f64 = 1e-12;

/// How a recursion run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// All requested steps completed.
    Completed,
    /// The coefficient at this 1-based step fell below the breakdown
    /// threshold; the run delivered `step - 1` coefficients.
    Breakdown { step: usize },
    /// The term budget was exceeded while computing the step after this
    /// one; `step` is the last completed 1-based step.
    TermBudget { step: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Drop amplitudes below this fraction of the unit norm after each
    /// step; zero keeps every term. A nonzero threshold flags the run
    /// approximate.
    pub prune_threshold: f64,
    /// Stop before any iterate exceeds this many word classes.
    pub max_terms: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            prune_threshold: 0.0,
            max_terms: usize::MAX,
        }
    }
}

/// Coefficients and diagnostics of one recursion run.
#[derive(Clone, Debug)]
pub struct LanczosRun {
    /// `b_1 ... b_n` for the completed steps.
    pub b: Vec<f64>,
    /// Word classes in each iterate `O_1 ... O_n`.
    pub term_counts: Vec<usize>,
    /// Support extent in sites of each iterate.
    pub support: Vec<u32>,
    /// Largest `|<O_{n+1}, O_n>|` or `|<O_{n+1}, O_{n-1}>|` seen.
    pub orthogonality_defect: f64,
    /// Largest `|<O_n, L O_n>|` seen; zero in exact arithmetic.
    pub diagonal_defect: f64,
    /// Whether pruning dropped any amplitude.
    pub approximate: bool,
    pub status: RunStatus,
}

type RealTerms = Vec<(PauliWord, f64)>;

/// Extracts the real representation `O = i^phase T` of a seed whose
/// amplitudes are all real or all imaginary.
fn real_representation(op: &TranslationInvariantOperator) -> Result<RealTerms> {
    if op.is_real() {
        Ok(op.terms().iter().map(|&(w, a)| (w, a.re)).collect())
    } else if op.is_imaginary() {
        Ok(op.terms().iter().map(|&(w, a)| (w, a.im)).collect())
    } else {
        Err(Error::Invalid(
            "seed must be Hermitian or i times Hermitian: amplitudes mix real and imaginary parts"
                .into(),
        ))
    }
}

fn dot(a: &RealTerms, b: &RealTerms) -> f64 {
    let mut acc = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Runs the recursion from a unit-norm seed for up to `steps` coefficients.
///
/// Every arithmetic path is deterministic: accumulation follows the sorted
/// term order and reductions run over words in their canonical order, so
/// repeated runs produce bit-identical coefficients.
pub fn lanczos_run(
    h: &SpinHamiltonian,
    seed: &TranslationInvariantOperator,
    steps: usize,
    options: &LanczosOptions,
) -> Result<LanczosRun> {
    if steps == 0 {
        return Err(Error::Invalid("a run needs at least one step".into()));
    }
    if (seed.norm() - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::Invalid(format!(
            "seed norm {} is not 1 within {UNIT_NORM_TOLERANCE:.0e}",
            seed.norm()
        )));
    }
    let mut current = real_representation(seed)?;
    let mut previous: RealTerms = Vec::new();
    let mut last_b = 0.0f64;

    let mut run = LanczosRun {
        b: Vec::with_capacity(steps),
        term_counts: Vec::with_capacity(steps),
        support: Vec::with_capacity(steps),
        orthogonality_defect: 0.0,
        diagonal_defect: 0.0,
        approximate: false,
        status: RunStatus::Completed,
    };

    for n in 0..steps {
        // K(T_n) = -i [H, T_n]: each anticommuting pair contributes
        // -i * 2 i^quarters, which is +2 for quarters = 1 and -2 for 3.
        let mut acc: HashMap<PauliWord, f64> =
            HashMap::with_capacity(current.len() * 2 + 16);
        for &(q, t) in &current {
            for &(p, c) in h.terms() {
                for y in -(p.len() as i64 - 1)..=(q.len() as i64 - 1) {
                    if let Some((quarters, word, _)) = commutator_part(&p, &q, -y)? {
                        let factor = match quarters {
                            1 => 2.0 * c * t,
                            _ => -2.0 * c * t,
                        };
                        *acc.entry(word).or_insert(0.0) += factor;
                    }
                }
            }
            if acc.len() > options.max_terms {
                run.status = RunStatus::TermBudget { step: n };
                return Ok(run);
            }
        }

        let mut diag = 0.0;
        for &(w, t) in &current {
            if let Some(&k) = acc.get(&w) {
                diag += t * k;
            }
        }
        run.diagonal_defect = run.diagonal_defect.max(diag.abs());

        if n > 0 {
            for &(w, s) in &previous {
                *acc.entry(w).or_insert(0.0) += last_b * s;
            }
        }
        if acc.len() > options.max_terms {
            run.status = RunStatus::TermBudget { step: n };
            return Ok(run);
        }

        let mut next: RealTerms = acc.into_iter().filter(|&(_, v)| v != 0.0).collect();
        next.sort_by_key(|&(w, _)| w);

        let b_next = next.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if b_next < BREAKDOWN_THRESHOLD {
            run.status = RunStatus::Breakdown { step: n + 1 };
            return Ok(run);
        }

        for (_, v) in &mut next {
            *v /= b_next;
        }
        if options.prune_threshold > 0.0 {
            let before = next.len();
            next.retain(|&(_, v)| v.abs() >= options.prune_threshold);
            if next.len() < before {
                run.approximate = true;
                let kept = next.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
                for (_, v) in &mut next {
                    *v /= kept;
                }
            }
        }

        run.orthogonality_defect = run.orthogonality_defect.max(dot(&next, &current).abs());
        if n > 0 {
            run.orthogonality_defect =
                run.orthogonality_defect.max(dot(&next, &previous).abs());
        }

        run.b.push(b_next);
        run.term_counts.push(next.len());
        run.support
            .push(next.iter().map(|&(w, _)| w.len()).max().unwrap_or(0));
        previous = std::mem::replace(&mut current, next);
        last_b = b_next;
    }
    Ok(run)
}
