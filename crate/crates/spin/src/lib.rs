//! Spin-chain operator algebra for the recursion method: Pauli words,
//! translation-invariant operator densities, Liouvillian recursion on the
//! infinite chain, and a finite-ring exact-diagonalization cross-check.

pub mod current;
pub mod ed;
pub mod hamiltonian;
pub mod lanczos;
pub mod op;
pub mod pauli;

pub use current::{energy_current, EnergyCurrent};
pub use ed::{ed_oracle_coeffs, EdRun};
pub use lanczos::{lanczos_run, LanczosOptions, LanczosRun, RunStatus};
pub use hamiltonian::SpinHamiltonian;
pub use op::{commutator_with_hamiltonian, TranslationInvariantOperator};
pub use pauli::{anticommutes, multiply_words, Letter, PauliWord};
