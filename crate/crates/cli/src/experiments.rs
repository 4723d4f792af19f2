//! Turnkey experiments: each builtin runs a declared computation over a
//! declared grid, writes CSV series plus a structured text summary, and
//! compares the fitted behavior against its expected scaling.
//!
//! Every series file is deterministic byte-for-byte across repeated runs
//! and worker counts; the run timestamp lives in the `run-info.txt`
//! sidecar, never in a series file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use recmethod_core::poly::polynomial_scan;
use recmethod_core::stagger::linear_least_squares;
use recmethod_core::{
    derivative_scaling, descent_green, diffusion_estimate, r_squared, rate_fit,
    smoothness_battery, zero_freq_stitched, BoundednessClass, CoeffSequence, DescentOptions,
    DerivativeScaling, DimensionClass, Error, ProductScan, RateFit, Result, ScalingModel,
    SmoothVerdict, StaggerSpec, StitchPlan, Terminator,
};

use crate::cache::{cache_coeffs, resolve_cache_dir};
use crate::jobs::{IsingJob, SeedOp};
use crate::parse::{parse_f64_list, parse_grid, parse_index, parse_sequence};
use crate::record::{fmt_complex, fmt_f64, Csv};

/// The builtin experiment set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentName {
    #[value(name = "fig1a")]
    Fig1a,
    #[value(name = "fig1b")]
    Fig1b,
    #[value(name = "fig2")]
    Fig2,
    #[value(name = "fig3")]
    Fig3,
    #[value(name = "fig4")]
    Fig4,
    #[value(name = "fig5")]
    Fig5,
    #[value(name = "custom")]
    Custom,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Fig1a => "fig1a",
            ExperimentName::Fig1b => "fig1b",
            ExperimentName::Fig2 => "fig2",
            ExperimentName::Fig3 => "fig3",
            ExperimentName::Fig4 => "fig4",
            ExperimentName::Fig5 => "fig5",
            ExperimentName::Custom => "custom",
        }
    }
}

/// A fully-described experiment run.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// Key-value overrides of the builtin defaults.
    pub parameters: BTreeMap<String, String>,
    pub output_dir: PathBuf,
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    /// Written files in declared order (series, summary, sidecar).
    pub files: Vec<PathBuf>,
    /// Contents of summary.txt.
    pub summary: String,
    /// Non-deterministic events (cache hits and rejections); not written
    /// to any series file.
    pub notes: Vec<String>,
}

struct Params<'a> {
    map: &'a BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, String>, allowed: &[&str]) -> Result<Self> {
        for k in map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Invalid(format!(
                    "unknown parameter {k:?}; this experiment accepts {allowed:?}"
                )));
            }
        }
        Ok(Params { map })
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Invalid(format!("parameter {key}={v:?} is not a number"))),
        }
    }

    fn index(&self, key: &str, default: u64) -> Result<u64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => parse_index(v),
        }
    }

    fn grid(&self, key: &str, default: &str) -> Result<Vec<u64>> {
        parse_grid(self.map.get(key).map(String::as_str).unwrap_or(default))
    }

    fn str(&self, key: &str, default: &str) -> String {
        self.map
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }
}

struct Workspace {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Workspace {
    fn put(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, content)?;
        self.files.push(path);
        Ok(())
    }
}

struct Summary {
    body: String,
    checks: Vec<(String, bool, String)>,
}

impl Summary {
    fn new(title: &str) -> Self {
        Summary {
            body: format!("experiment: {title}\n"),
            checks: Vec::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.body, "{key}: {value}").unwrap();
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push((name.to_string(), pass, detail));
    }

    fn render(&self) -> String {
        let mut out = self.body.clone();
        for (name, pass, detail) in &self.checks {
            let word = if *pass { "pass" } else { "fail" };
            writeln!(out, "check {name}: {word} ({detail})").unwrap();
        }
        out
    }
}

fn with_context(name: &str, e: Error) -> Error {
    match e {
        Error::Invalid(m) => Error::Invalid(format!("{name}: {m}")),
        Error::ResourceLimit(m) => Error::ResourceLimit(format!("{name}: {m}")),
        Error::NoConvergence(m) => Error::NoConvergence(format!("{name}: {m}")),
        Error::Io(m) => Error::Io(format!("{name}: {m}")),
        e @ Error::SingularLevel { .. } => e,
    }
}

/// Runs one experiment, writing its outputs under `spec.output_dir`.
/// `cache_flag` is the explicit cache directory, if the user gave one.
pub fn run_experiment(
    spec: &ExperimentSpec,
    cache_flag: Option<&Path>,
) -> Result<ExperimentReport> {
    std::fs::create_dir_all(&spec.output_dir)?;
    let mut ws = Workspace {
        dir: spec.output_dir.clone(),
        files: Vec::new(),
    };
    let mut notes = Vec::new();
    let name = spec.name.as_str();
    let summary = match spec.name {
        ExperimentName::Fig1a => fig1a(&spec.parameters, &mut ws),
        ExperimentName::Fig1b => fig1b(&spec.parameters, &mut ws),
        ExperimentName::Fig2 => fig2(&spec.parameters, &mut ws, cache_flag, &mut notes),
        ExperimentName::Fig3 => fig3(&spec.parameters, &mut ws),
        ExperimentName::Fig4 => fig4(&spec.parameters, &mut ws),
        ExperimentName::Fig5 => fig5(&spec.parameters, &mut ws),
        ExperimentName::Custom => custom(&spec.parameters, &mut ws),
    }
    .map_err(|e| with_context(name, e))?;

    let text = summary.render();
    ws.put("summary.txt", &text)?;
    ws.put("run-info.txt", &run_info(spec))?;
    Ok(ExperimentReport {
        files: ws.files,
        summary: text,
        notes,
    })
}

fn run_info(spec: &ExperimentSpec) -> String {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut out = String::new();
    writeln!(out, "experiment: {}", spec.name.as_str()).unwrap();
    writeln!(out, "created-unix-seconds: {stamp}").unwrap();
    if spec.parameters.is_empty() {
        writeln!(out, "parameters: defaults").unwrap();
    } else {
        for (k, v) in &spec.parameters {
            writeln!(out, "parameter: {k}={v}").unwrap();
        }
    }
    out
}

/// Constant-tail magnitudes at both parities of `n` in one scan.
fn const_pair(seq: &CoeffSequence, n: u64) -> Result<(f64, f64)> {
    let mut scan = ProductScan::<f64>::new();
    for k in 1..=n {
        scan.push(seq.eval(k)?);
    }
    let here = scan.pi();
    scan.push(seq.eval(n + 1)?);
    Ok((here, scan.pi()))
}

fn fit_errors(rows: &[(u64, f64)], fit_lo: u64) -> Result<RateFit> {
    let kept: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(n, e)| n >= fit_lo && e > 0.0)
        .map(|&(n, e)| (n as f64, e))
        .collect();
    let ns: Vec<f64> = kept.iter().map(|&(n, _)| n).collect();
    let ys: Vec<f64> = kept.iter().map(|&(_, e)| e).collect();
    rate_fit(&ns, &ys)
}

fn fig1a(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(params, &["n-lo", "n-hi", "points", "fit-lo"])?;
    let n_lo = p.index("n-lo", 10)?;
    let n_hi = p.index("n-hi", 10_000)?;
    let points = p.index("points", 25)? as usize;
    let fit_lo = p.index("fit-lo", 100)?;

    let seq = CoeffSequence::toy_irrelevant();
    let term = Terminator::MeixnerPollaczek {
        alpha: 1.0,
        eta: 1.0,
    };
    let reference = std::f64::consts::PI * std::f64::consts::PI / 8.0;
    let grid = recmethod_core::log_grid(n_lo, n_hi, points);
    let rows: Vec<(u64, f64, f64)> = grid
        .par_iter()
        .map(|&n| {
            let g = zero_freq_stitched(&seq, &StitchPlan::new(n, term))?;
            let mag = g.norm();
            Ok((n, mag, (mag - reference).abs()))
        })
        .collect::<Result<_>>()?;

    let mut csv = Csv::new("n,magnitude,abs_error");
    csv.comment("sequence", seq.describe());
    csv.comment("terminator", "mp alpha=1 eta=1");
    csv.comment("reference-magnitude", fmt_f64(reference));
    for &(n, mag, err) in &rows {
        csv.row(&[n.to_string(), fmt_f64(mag), fmt_f64(err)]);
    }
    ws.put("magnitude.csv", &csv.render())?;

    let errs: Vec<(u64, f64)> = rows.iter().map(|&(n, _, e)| (n, e)).collect();
    let fit = fit_errors(&errs, fit_lo)?;
    let final_err = rows.last().map(|&(_, _, e)| e).unwrap_or(f64::NAN);

    let mut s = Summary::new("fig1a (zero-frequency stitching of the irrelevant toy)");
    s.kv("sequence", seq.describe());
    s.kv("reference-magnitude", fmt_f64(reference));
    s.kv("final-abs-error", format!("{final_err:e}"));
    s.kv("fitted-exponent", format!("{:.4}", fit.exponent));
    s.kv("fit-r-squared", format!("{:.5}", fit.r_squared));
    s.kv("expected-exponent", "-2");
    s.check(
        "final-error",
        final_err < 1e-4,
        format!("|error| at n = {n_hi} is {final_err:.3e}, expected < 1e-4"),
    );
    s.check(
        "rate",
        (fit.exponent + 2.0).abs() <= 0.2,
        format!("exponent {:.4}, expected -2 +/- 0.2", fit.exponent),
    );
    Ok(s)
}

fn fig1b(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(params, &["n-hi", "points", "mp-grid", "fit-lo"])?;
    let n_hi = p.index("n-hi", 10_000_000)?;
    let points = p.index("points", 29)? as usize;
    let mp_grid = p.grid("mp-grid", "log:1e2:1e6:17")?;
    let fit_lo = p.index("fit-lo", 1_000)?;

    let seq = CoeffSequence::toy_relevant();
    let grid = recmethod_core::log_grid(10, n_hi, points);
    let const_rows: Vec<(u64, f64, f64)> = grid
        .par_iter()
        .map(|&n| {
            let (here, next) = const_pair(&seq, n)?;
            Ok((n, here, 0.5 * (here + next)))
        })
        .collect::<Result<_>>()?;
    let (_, last_mag, reference) = *const_rows.last().unwrap();
    let spread = (last_mag - reference).abs();

    let mut csv = Csv::new("n,magnitude,parity_mean");
    csv.comment("sequence", seq.describe());
    csv.comment("terminator", "constant");
    for &(n, mag, mean) in &const_rows {
        csv.row(&[n.to_string(), fmt_f64(mag), fmt_f64(mean)]);
    }
    ws.put("constant.csv", &csv.render())?;

    let term = Terminator::MeixnerPollaczek {
        alpha: 1.0,
        eta: 3.0,
    };
    let mp_rows: Vec<(u64, f64, f64)> = mp_grid
        .par_iter()
        .map(|&n| {
            let g = zero_freq_stitched(&seq, &StitchPlan::new(n, term))?;
            let mag = g.norm();
            Ok((n, mag, (mag - reference).abs()))
        })
        .collect::<Result<_>>()?;
    let mut csv = Csv::new("n,magnitude,abs_error");
    csv.comment("sequence", seq.describe());
    csv.comment("terminator", "mp alpha=1 eta=3");
    csv.comment("reference-magnitude", fmt_f64(reference));
    for &(n, mag, err) in &mp_rows {
        csv.row(&[n.to_string(), fmt_f64(mag), fmt_f64(err)]);
    }
    ws.put("mp-stitch.csv", &csv.render())?;

    let errs: Vec<(u64, f64)> = mp_rows.iter().map(|&(n, _, e)| (n, e)).collect();
    let fit = fit_errors(&errs, fit_lo)?;

    let mut s = Summary::new("fig1b (zero-frequency stitching of the relevant toy)");
    s.kv("sequence", seq.describe());
    s.kv("headline-magnitude", fmt_f64(reference));
    s.kv("parity-spread", format!("{spread:e}"));
    s.kv("reference-magnitude", "2.8071");
    s.kv("mp-error-exponent", format!("{:.4}", fit.exponent));
    s.kv("fit-r-squared", format!("{:.5}", fit.r_squared));
    s.kv("expected-exponent", "-2/3");
    s.check(
        "headline",
        (reference - 2.8071).abs() < 1e-3,
        format!("parity-averaged magnitude at n = {n_hi} is {reference:.5}, expected 2.8071 +/- 1e-3"),
    );
    s.check(
        "rate",
        (fit.exponent + 2.0 / 3.0).abs() <= 0.1,
        format!("exponent {:.4}, expected -2/3 +/- 0.1", fit.exponent),
    );
    Ok(s)
}

fn fig2(
    params: &BTreeMap<String, String>,
    ws: &mut Workspace,
    cache_flag: Option<&Path>,
    notes: &mut Vec<String>,
) -> Result<Summary> {
    let p = Params::new(
        params,
        &["steps", "gz", "gx", "prune", "max-terms", "window"],
    )?;
    let steps = p.index("steps", 24)? as usize;
    let gz = p.f64("gz", -1.05)?;
    let gx = p.f64("gx", 0.5)?;
    let prune = p.f64("prune", 0.0)?;
    let max_terms = match p.str("max-terms", "none").as_str() {
        "none" => None,
        v => Some(parse_index(v)? as usize),
    };
    let window = p.index("window", 6)? as usize;

    let job = IsingJob {
        gz,
        gx,
        op: SeedOp::EnergyCurrent,
        steps,
        prune,
        max_terms,
    };
    let dir = resolve_cache_dir(cache_flag)?;
    let outcome = cache_coeffs(&dir, &job)?;
    notes.extend(outcome.notes.iter().cloned());

    let ratio: f64 = outcome
        .entry
        .metadata
        .get("norm_ratio")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Invalid("cached run carries no norm ratio".into()))?;
    let b = outcome.values.values();

    let mut csv = Csv::new("n,b_n");
    csv.comment("request", job.description());
    csv.comment("status", &outcome.entry.metadata["status"]);
    for (i, &v) in b.iter().enumerate() {
        csv.row(&[(i + 1).to_string(), fmt_f64(v)]);
    }
    ws.put("coefficients.csv", &csv.render())?;

    let seq = CoeffSequence::from_tabulated(outcome.values.clone());
    let reference = 3.35;
    let mut csv = Csv::new("n,d_raw,d_averaged,two_d_averaged");
    csv.comment("norm-ratio", fmt_f64(ratio));
    csv.comment("reference-two-d", fmt_f64(reference));
    let mut two_d = Vec::new();
    for n in 1..b.len() as u64 {
        let est = diffusion_estimate(&seq, ratio, n)?;
        two_d.push(est.two_d);
        csv.row(&[
            n.to_string(),
            fmt_f64(est.d_raw),
            fmt_f64(est.d_averaged),
            fmt_f64(est.two_d),
        ]);
    }
    ws.put("diffusion.csv", &csv.render())?;

    let tail = &two_d[two_d.len().saturating_sub(window)..];
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inside = tail
        .iter()
        .all(|&v| (v / reference - 1.0).abs() <= 0.2);

    let mut s = Summary::new("fig2 (mixed-field Ising energy-current diffusion)");
    s.kv("request", job.description());
    s.kv("status", &outcome.entry.metadata["status"]);
    s.kv("coefficients", b.len());
    s.kv("norm-ratio", fmt_f64(ratio));
    s.kv("reference-two-d", fmt_f64(reference));
    s.kv(
        "two-d-window",
        format!("last {} values in [{lo:.4}, {hi:.4}]", tail.len()),
    );
    s.kv(
        "note",
        "the window is a consistency band under the positivity assumption, not a converged limit",
    );
    s.check(
        "coefficient-count",
        b.len() == steps,
        format!("{} of {steps} requested coefficients", b.len()),
    );
    s.check(
        "two-d-window",
        inside && tail.len() == window.min(two_d.len()),
        format!(
            "parity-averaged 2D over the last {} steps within 20% of {reference}: [{lo:.4}, {hi:.4}]",
            tail.len()
        ),
    );
    Ok(s)
}

fn fig3(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(
        params,
        &["alpha", "eta", "im-z", "grid", "floor", "ref-tol"],
    )?;
    let alpha = p.f64("alpha", 1.0)?;
    let eta = p.f64("eta", 2.0)?;
    let ys = parse_f64_list(&p.str("im-z", "1,2,3"))?;
    let grid = p.grid("grid", "log:1e2:1e4:13")?;
    let floor = p.f64("floor", 1e-12)?;
    let ref_tol = p.f64("ref-tol", 1e-12)?;
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Invalid("im-z entries must be positive damping rates".into()));
    }

    let seq = CoeffSequence::meixner_pollaczek(alpha, eta)?;
    let n_hi = *grid.last().unwrap() as usize;
    let opts = DescentOptions {
        tol: ref_tol,
        max_depth: 1 << 22,
        ..DescentOptions::default()
    };

    struct Panel {
        z: Complex64,
        reference: Complex64,
        rows: Vec<(u64, f64)>,
        fit: RateFit,
        kept: usize,
    }
    let panels: Vec<Panel> = ys
        .par_iter()
        .map(|&y| {
            let z = Complex64::new(0.0, -y);
            let reference = descent_green(&seq, z, 0, &opts)?.value;
            let mut rows = Vec::new();
            polynomial_scan(&seq, z, n_hi, |st| {
                if grid.binary_search(&(st.n as u64)).is_ok() {
                    rows.push((st.n as u64, (st.truncated_green() - reference).norm()));
                }
                Ok(())
            })?;
            let kept: Vec<(u64, f64)> =
                rows.iter().copied().filter(|&(_, e)| e > floor).collect();
            let fit = fit_errors(&kept, 0)?;
            Ok(Panel {
                z,
                reference,
                rows,
                fit,
                kept: kept.len(),
            })
        })
        .collect::<Result<_>>()?;

    let mut s = Summary::new("fig3 (truncation error of the Meixner-Pollaczek family)");
    s.kv("sequence", seq.describe());
    let mut betas = Vec::new();
    for (i, panel) in panels.iter().enumerate() {
        let mut csv = Csv::new("n,abs_error");
        csv.comment("sequence", seq.describe());
        csv.comment("z", fmt_complex(panel.z));
        csv.comment("reference", fmt_complex(panel.reference));
        csv.comment("beta", format!("{:.4}", panel.fit.exponent));
        csv.comment("error-floor", fmt_f64(floor));
        for &(n, e) in &panel.rows {
            csv.row(&[n.to_string(), fmt_f64(e)]);
        }
        ws.put(&format!("truncation-z{}.csv", i + 1), &csv.render())?;

        let y = ys[i];
        betas.push(panel.fit.exponent);
        s.kv(
            &format!("beta at z = {}", fmt_complex(panel.z)),
            format!(
                "{:.4} over {} points (r2 {:.5}), expected {:.1}",
                panel.fit.exponent, panel.kept, panel.fit.r_squared, -y
            ),
        );
        s.check(
            &format!("beta-z{}", i + 1),
            (panel.fit.exponent + y).abs() <= 0.1 * y,
            format!("beta {:.4}, expected -{y} within 10%", panel.fit.exponent),
        );
    }
    if ys.len() >= 2 {
        let (slope, intercept, _) = linear_least_squares(&ys, &betas)?;
        s.kv("cross-fit-slope", format!("{slope:.4}"));
        s.kv("cross-fit-intercept", format!("{intercept:.4}"));
        s.check(
            "cross-slope",
            (slope + 1.0).abs() <= 0.1,
            format!("slope {slope:.4}, expected -1 +/- 0.1"),
        );
        s.check(
            "cross-intercept",
            intercept.abs() <= 0.1,
            format!("intercept {intercept:.4}, expected 0 +/- 0.1"),
        );
    }
    Ok(s)
}

fn axis_label(model: &ScalingModel) -> (&'static str, f64) {
    match model {
        ScalingModel::LogPower(p) => ("log_n_pow", *p),
        ScalingModel::LogLog => ("log_log_n", f64::NAN),
        ScalingModel::Plateau => ("log_n", 1.0),
        ScalingModel::PowerLaw(p) => ("n_pow", *p),
    }
}

fn model_name(model: &ScalingModel) -> String {
    match model {
        ScalingModel::LogPower(p) => format!("log-power p={p:.4}"),
        ScalingModel::LogLog => "log-log (sub-logarithmic)".into(),
        ScalingModel::Plateau => "plateau".into(),
        ScalingModel::PowerLaw(p) => format!("power-law p={p:.4}"),
    }
}

fn scaling_csv(ds: &DerivativeScaling, seq_desc: &str) -> String {
    let (axis, p) = axis_label(&ds.fit.model);
    let mut csv = Csv::new(&format!("n,value,{axis}"));
    csv.comment("sequence", seq_desc);
    csv.comment("derivative-order", ds.order);
    csv.comment("model", model_name(&ds.fit.model));
    csv.comment("exponent", format!("{:.4}", ds.fit.exponent));
    csv.comment("r-squared", format!("{:.5}", ds.fit.r_squared));
    csv.comment("ambiguous", ds.fit.ambiguous);
    for (&n, &v) in ds.ns.iter().zip(&ds.values) {
        let x = match ds.fit.model {
            ScalingModel::LogPower(_) | ScalingModel::Plateau => (n as f64).ln().powf(
                if p.is_nan() { 1.0 } else { p },
            ),
            ScalingModel::LogLog => (n as f64).ln().ln(),
            ScalingModel::PowerLaw(q) => (n as f64).powf(q),
        };
        csv.row(&[n.to_string(), fmt_f64(v), fmt_f64(x)]);
    }
    csv.render()
}

/// Linear fit of `value` against `ln n`: (slope, intercept, r-squared).
fn pinned_log_fit(ns: &[u64], values: &[f64]) -> Result<(f64, f64, f64)> {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let (a, c, _) = linear_least_squares(&xs, values)?;
    Ok((a, c, r_squared(&xs, values, |x| a * x + c)))
}

fn fig4(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(params, &["case1-grid", "case2-g1-grid", "case2-g2-grid"])?;
    let battery = smoothness_battery();
    let series = [
        ("d1-case1-g1", 0usize, 1usize, p.grid("case1-grid", "log:1e3:1e6:14")?),
        ("d1-case2-g1", 1, 1, p.grid("case2-g1-grid", "log:1e3:1e6:14")?),
        ("d1-case2-g2", 1, 2, p.grid("case2-g2-grid", "log:1e5:1e7:12")?),
    ];
    let scalings: Vec<DerivativeScaling> = series
        .par_iter()
        .map(|(_, case, k, grid)| derivative_scaling(&battery[*case].seq, *k, grid))
        .collect::<Result<_>>()?;

    let mut s = Summary::new("fig4 (spectral derivatives at the origin, d = 1)");
    for ((label, case, k, _), ds) in series.iter().zip(&scalings) {
        let desc = battery[*case].seq.describe();
        ws.put(&format!("{label}.csv"), &scaling_csv(ds, &desc))?;
        let (slope, _, r2) = pinned_log_fit(&ds.ns, &ds.values)?;
        s.kv(
            &format!("{label} (order {k})"),
            format!(
                "{}; linear-in-log-n fit r2 {:.5}",
                model_name(&ds.fit.model),
                r2
            ),
        );
        match *label {
            "d1-case1-g1" => s.check(
                "case1-first-derivative",
                slope > 0.0 && r2 > 0.99,
                format!("expected growth proportional to log n; fit r2 {r2:.5}"),
            ),
            "d1-case2-g1" => s.check(
                "case2-first-derivative",
                matches!(ds.fit.model, ScalingModel::Plateau | ScalingModel::LogLog),
                format!("expected bounded; classified {}", model_name(&ds.fit.model)),
            ),
            "d1-case2-g2" => s.check(
                "case2-second-derivative",
                slope > 0.0 && r2 > 0.99,
                format!("expected growth proportional to log n; fit r2 {r2:.5}"),
            ),
            _ => unreachable!(),
        }
    }
    Ok(s)
}

fn fig5(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(
        params,
        &["case1-grid", "case2-g1-grid", "case2-g2-grid", "freud-nmax"],
    )?;
    let battery = smoothness_battery();
    let series = [
        ("d2-case1-g1", 2usize, 1usize, p.grid("case1-grid", "log:1e3:1e6:14")?),
        ("d2-case2-g1", 3, 1, p.grid("case2-g1-grid", "log:1e3:1e6:14")?),
        ("d2-case2-g2", 3, 2, p.grid("case2-g2-grid", "log:1e3:1e6:14")?),
    ];
    let freud_nmax = p.index("freud-nmax", 1 << 20)?;

    let scalings: Vec<DerivativeScaling> = series
        .par_iter()
        .map(|(_, case, k, grid)| derivative_scaling(&battery[*case].seq, *k, grid))
        .collect::<Result<_>>()?;

    let mut s = Summary::new("fig5 (spectral derivatives at the origin, d > 1)");
    for ((label, case, k, _), ds) in series.iter().zip(&scalings) {
        let desc = battery[*case].seq.describe();
        ws.put(&format!("{label}.csv"), &scaling_csv(ds, &desc))?;
        s.kv(
            &format!("{label} (order {k})"),
            format!(
                "{}; exponent {:.4}, r2 {:.5}",
                model_name(&ds.fit.model),
                ds.fit.exponent,
                ds.fit.r_squared
            ),
        );
        match *label {
            "d2-case1-g1" => s.check(
                "case1-first-derivative",
                matches!(ds.fit.model, ScalingModel::LogLog | ScalingModel::Plateau),
                format!(
                    "expected slow sub-logarithmic growth; classified {}",
                    model_name(&ds.fit.model)
                ),
            ),
            "d2-case2-g1" => s.check(
                "case2-first-derivative",
                matches!(ds.fit.model, ScalingModel::LogPower(q) if (q - 0.5).abs() <= 0.1),
                format!(
                    "expected (log n)^(1/2): exponent {:.4} within 0.5 +/- 0.1",
                    ds.fit.exponent
                ),
            ),
            "d2-case2-g2" => s.check(
                "case2-second-derivative",
                matches!(ds.fit.model, ScalingModel::LogPower(q) if (q - 1.5).abs() <= 0.15),
                format!(
                    "expected (log n)^(3/2): exponent {:.4} within 1.5 +/- 0.15",
                    ds.fit.exponent
                ),
            ),
            _ => unreachable!(),
        }
    }

    let spec = StaggerSpec::LogPower { amp: 0.25, a: 2.0 };
    let verdict = recmethod_core::smoothness_criterion(
        &spec,
        DimensionClass::HigherD,
        1,
        freud_nmax,
    )?;
    s.kv(
        "freud staggering s_n = (2 log n)^-2",
        format!(
            "criterion verdict at k = 1: {:?} (first integral {:?}, increments decay {:.3})",
            verdict.verdict, verdict.target.class, verdict.target.increment_exponent
        ),
    );
    s.check(
        "freud-first-order",
        verdict.verdict == SmoothVerdict::Holds
            && verdict.target.class == BoundednessClass::Divergent,
        format!("expected first divergent derivative k = 1, got {:?}", verdict.verdict),
    );
    Ok(s)
}

fn custom(params: &BTreeMap<String, String>, ws: &mut Workspace) -> Result<Summary> {
    let p = Params::new(
        params,
        &["seq", "method", "alpha", "eta", "grid", "reference", "fit-lo"],
    )?;
    let Some(seq_text) = p.map.get("seq") else {
        return Err(Error::Invalid(
            "a custom experiment needs seq=<sequence selector>".into(),
        ));
    };
    let seq = parse_sequence(seq_text)?;
    let method = p.str("method", "const");
    let grid = p.grid("grid", "log:1e1:1e5:17")?;
    let reference = match p.map.get("reference") {
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("reference={v:?} is not a number")))?,
        ),
        None => None,
    };
    let fit_lo = p.index("fit-lo", *grid.first().unwrap())?;

    let term = match method.as_str() {
        "const" => Terminator::Constant,
        "mp" => Terminator::MeixnerPollaczek {
            alpha: p.f64("alpha", 1.0)?,
            eta: p.f64("eta", 1.0)?,
        },
        other => {
            return Err(Error::Invalid(format!(
                "unknown method {other:?}; custom supports const and mp"
            )))
        }
    };
    let rows: Vec<(u64, f64)> = grid
        .par_iter()
        .map(|&n| Ok((n, zero_freq_stitched(&seq, &StitchPlan::new(n, term))?.norm())))
        .collect::<Result<_>>()?;

    let mut csv = Csv::new(if reference.is_some() {
        "n,magnitude,abs_error"
    } else {
        "n,magnitude"
    });
    csv.comment("sequence", seq.describe());
    csv.comment("method", &method);
    if let Some(r) = reference {
        csv.comment("reference-magnitude", fmt_f64(r));
    }
    for &(n, mag) in &rows {
        match reference {
            Some(r) => csv.row(&[n.to_string(), fmt_f64(mag), fmt_f64((mag - r).abs())]),
            None => csv.row(&[n.to_string(), fmt_f64(mag)]),
        }
    }
    ws.put("custom.csv", &csv.render())?;

    let mut s = Summary::new("custom (zero-frequency scan)");
    s.kv("sequence", seq.describe());
    s.kv("method", &method);
    s.kv(
        "final-magnitude",
        fmt_f64(rows.last().map(|&(_, m)| m).unwrap_or(f64::NAN)),
    );
    if let Some(r) = reference {
        let errs: Vec<(u64, f64)> = rows.iter().map(|&(n, m)| (n, (m - r).abs())).collect();
        match fit_errors(&errs, fit_lo) {
            Ok(fit) => {
                s.kv("error-exponent", format!("{:.4}", fit.exponent));
                s.kv("fit-r-squared", format!("{:.5}", fit.r_squared));
            }
            Err(e) => s.kv("error-exponent", format!("not fitted ({e})")),
        }
    } else {
        s.kv("note", "no reference given, so no error series or rate fit");
    }
    Ok(s)
}
