//! Spin-chain coefficient jobs: a fully-described Lanczos run on the
//! mixed-field Ising chain, producing tabulated coefficients plus the
//! provenance metadata that travels with them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use recmethod_core::{Error, Result, Tabulated};
use recmethod_spin::{
    energy_current, lanczos_run, LanczosOptions, PauliWord, RunStatus, SpinHamiltonian,
    TranslationInvariantOperator,
};

/// Seed operator for a recursion run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SeedOp {
    /// Energy current of the chain (carries a diffusion norm ratio).
    EnergyCurrent,
    /// Energy density, the Hamiltonian cell itself.
    EnergyDensity,
    /// Single-site Z magnetization density.
    ZDensity,
}

impl SeedOp {
    pub fn name(&self) -> &'static str {
        match self {
            SeedOp::EnergyCurrent => "energy-current",
            SeedOp::EnergyDensity => "energy-density",
            SeedOp::ZDensity => "z-density",
        }
    }
}

/// One coefficient computation, pinned down far enough that equal jobs
/// produce bit-identical output.
#[derive(Clone, Debug)]
pub struct IsingJob {
    pub gz: f64,
    pub gx: f64,
    pub op: SeedOp,
    pub steps: usize,
    pub prune: f64,
    pub max_terms: Option<usize>,
}

impl IsingJob {
    /// Canonical one-line description; the cache key hashes exactly this.
    pub fn description(&self) -> String {
        let budget = match self.max_terms {
            Some(m) => m.to_string(),
            None => "none".into(),
        };
        format!(
            "ising gz={:?} gx={:?} op={} steps={} prune={:?} max-terms={budget}",
            self.gz,
            self.gx,
            self.op.name(),
            self.steps,
            self.prune
        )
    }
}

/// Tabulated coefficients plus their header metadata.
#[derive(Clone, Debug)]
pub struct JobResult {
    pub values: Tabulated,
    pub metadata: BTreeMap<String, String>,
}

fn join_counts<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Runs the recursion described by `job` and packages the result.
pub fn run_ising_job(job: &IsingJob) -> Result<JobResult> {
    let h = SpinHamiltonian::ising(job.gz, job.gx)?;
    let mut extra: Vec<(&str, String)> = Vec::new();
    let seed = match job.op {
        SeedOp::EnergyCurrent => {
            let current = energy_current(&h)?;
            extra.push(("norm_ratio", format!("{:?}", current.norm_ratio)));
            extra.push((
                "continuity_residual",
                format!("{:e}", current.continuity_residual),
            ));
            current.operator.normalized()?
        }
        SeedOp::EnergyDensity => h.density().normalized()?,
        SeedOp::ZDensity => TranslationInvariantOperator::from_terms(vec![(
            PauliWord::parse("Z")?,
            Complex64::new(1.0, 0.0),
        )])?,
    };
    let options = LanczosOptions {
        prune_threshold: job.prune,
        max_terms: job.max_terms.unwrap_or(usize::MAX),
    };
    let run = lanczos_run(&h, &seed, job.steps, &options)?;
    if run.b.is_empty() {
        return Err(Error::Invalid(format!(
            "the {} seed is conserved: the recursion broke down before the first coefficient",
            job.op.name()
        )));
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("kind".into(), "ising".into());
    metadata.insert("gz".into(), format!("{:?}", job.gz));
    metadata.insert("gx".into(), format!("{:?}", job.gx));
    metadata.insert("op".into(), job.op.name().into());
    metadata.insert("steps".into(), job.steps.to_string());
    metadata.insert("prune_threshold".into(), format!("{:?}", job.prune));
    metadata.insert(
        "max_terms".into(),
        match job.max_terms {
            Some(m) => m.to_string(),
            None => "none".into(),
        },
    );
    metadata.insert("request".into(), job.description());
    metadata.insert("coefficients".into(), run.b.len().to_string());
    metadata.insert(
        "status".into(),
        match run.status {
            RunStatus::Completed => "completed".into(),
            RunStatus::Breakdown { step } => format!("breakdown at step {step}"),
            RunStatus::TermBudget { step } => format!("term budget reached at step {step}"),
        },
    );
    metadata.insert("term_counts".into(), join_counts(&run.term_counts));
    metadata.insert("support_sites".into(), join_counts(&run.support));
    metadata.insert(
        "orthogonality_defect".into(),
        format!("{:e}", run.orthogonality_defect),
    );
    metadata.insert("diagonal_defect".into(), format!("{:e}", run.diagonal_defect));
    metadata.insert("approximate".into(), run.approximate.to_string());
    metadata.insert(
        "provenance".into(),
        "recursion on the infinite chain".into(),
    );
    for (k, v) in extra {
        metadata.insert(k.into(), v);
    }
    Ok(JobResult {
        values: Tabulated::new(run.b)?,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use recmethod_core::parse_coeffs;

    #[test]
    fn current_job_produces_a_parseable_file_with_norm_ratio() {
        let job = IsingJob {
            gz: -1.05,
            gx: 0.5,
            op: SeedOp::EnergyCurrent,
            steps: 6,
            prune: 0.0,
            max_terms: None,
        };
        let result = run_ising_job(&job).unwrap();
        assert_eq!(result.values.len(), 6);
        let text =
            recmethod_core::format_coeffs(&result.values, &result.metadata).unwrap();
        let reread = parse_coeffs(&text).unwrap();
        assert_eq!(reread.values.values(), result.values.values());
        let ratio: f64 = reread.metadata["norm_ratio"].parse().unwrap();
        let expected = 4.0 * 1.05 * 1.05 / (1.0 + 1.05 * 1.05 + 0.25);
        assert!((ratio - expected).abs() < 1e-12, "ratio {ratio}");
        assert_eq!(reread.metadata["status"], "completed");
    }

    #[test]
    fn descriptions_separate_distinct_jobs() {
        let base = IsingJob {
            gz: -1.05,
            gx: 0.5,
            op: SeedOp::EnergyCurrent,
            steps: 6,
            prune: 0.0,
            max_terms: None,
        };
        let mut pruned = base.clone();
        pruned.prune = 1e-8;
        assert_ne!(base.description(), pruned.description());
        let mut budgeted = base.clone();
        budgeted.max_terms = Some(1000);
        assert_ne!(base.description(), budgeted.description());
    }
}
