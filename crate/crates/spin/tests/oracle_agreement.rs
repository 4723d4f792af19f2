use recmethod_spin::ed::ed_oracle_coeffs;
use recmethod_spin::energy_current;
use recmethod_spin::lanczos::{lanczos_run, LanczosOptions, RunStatus};
use recmethod_spin::SpinHamiltonian;

/// The recursion coefficients of a local seed cannot feel the ring size
/// while every operator in play is shorter than the ring, so rings of 10
/// and 12 sites and the infinite chain must agree wherever their windows
/// overlap.
#[test]
fn ring_sizes_and_the_infinite_chain_agree() {
    let h = SpinHamiltonian::ising(-1.05, 0.5).unwrap();
    let seed = energy_current(&h).unwrap().operator.normalized().unwrap();

    let big = ed_oracle_coeffs(&h, &seed, 12, 10).unwrap();
    let small = ed_oracle_coeffs(&h, &seed, 10, 8).unwrap();
    let chain = lanczos_run(&h, &seed, 10, &LanczosOptions::default()).unwrap();

    assert_eq!(chain.status, RunStatus::Completed);
    assert_eq!(big.b.len(), 10);
    assert_eq!(small.b.len(), 8);
    assert_eq!(big.valid_through, 9);
    assert_eq!(small.valid_through, 7);

    for n in 0..8 {
        assert!(
            (big.b[n] - small.b[n]).abs() < 1e-10,
            "rings disagree at step {}: {} vs {}",
            n + 1,
            big.b[n],
            small.b[n]
        );
    }

    // The measured support of the chain run stays well inside both rings
    // (the a-priori window assumes the worst-case one-site-per-step
    // growth), so every computed coefficient is comparable.
    for n in 0..10 {
        assert!(chain.support[n] + 1 <= 11);
        assert!(
            (chain.b[n] - big.b[n]).abs() < 1e-10,
            "chain and 12-ring disagree at step {}: {} vs {}",
            n + 1,
            chain.b[n],
            big.b[n]
        );
    }
}

/// An exact run to twenty coefficients stays within a modest term budget;
/// the counts document the growth rate of the word-class basis.
#[test]
fn exact_chain_run_reaches_twenty_coefficients() {
    let h = SpinHamiltonian::ising(-1.05, 0.5).unwrap();
    let seed = energy_current(&h).unwrap().operator.normalized().unwrap();
    let run = lanczos_run(&h, &seed, 20, &LanczosOptions::default()).unwrap();

    assert_eq!(run.status, RunStatus::Completed);
    assert_eq!(run.b.len(), 20);
    assert!(run.orthogonality_defect < 1e-9);
    assert!(run.diagonal_defect < 1e-10);
    assert!(!run.approximate);
    assert!(run.term_counts[19] < 4_000_000);
    // Coefficients grow on the scale of n with no breakdown in sight.
    assert!(run.b[19] > run.b[5]);
    println!("term counts: {:?}", run.term_counts);
    println!("supports:    {:?}", run.support);
    println!("b:           {:?}", run.b);
}
