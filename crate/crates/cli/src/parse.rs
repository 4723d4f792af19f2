//! Parsers for the command-line value grammars: sequence selectors,
//! complex frequencies, and sampling grids.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use recmethod_core::seq::QuasilinearParams;
use recmethod_core::{load_coeffs, smoothness_battery, CoeffSequence, Error, Result};

/// Selects a coefficient sequence from a `--seq` string.
///
/// Accepted forms:
/// - `toy-irrelevant`, `toy-relevant`, `freud`
/// - `mp:alpha=1,eta=2`
/// - `ogh1d:alpha=1,gamma=1,amp=0.1,a=3`
/// - benchmark labels `d1-case1`, `d1-case2`, `d2-case1`, `d2-case2`
/// - `custom:<expression in n>`
/// - `file:<path to a coefficient file>`
pub fn parse_sequence(s: &str) -> Result<CoeffSequence> {
    let s = s.trim();
    match s {
        "toy-irrelevant" => return Ok(CoeffSequence::toy_irrelevant()),
        "toy-relevant" => return Ok(CoeffSequence::toy_relevant()),
        "freud" => return Ok(CoeffSequence::freud_like()),
        _ => {}
    }
    if let Some(case) = smoothness_battery().into_iter().find(|c| c.label == s) {
        return Ok(case.seq);
    }
    let Some((head, rest)) = s.split_once(':') else {
        return Err(Error::Invalid(format!(
            "unknown sequence {s:?}; expected a builtin name or a prefixed form like mp:..., \
             custom:..., file:..."
        )));
    };
    match head {
        "mp" => {
            let kv = parse_kv(rest)?;
            let alpha = require_f64(&kv, "alpha", s)?;
            let eta = require_f64(&kv, "eta", s)?;
            reject_extras(&kv, &["alpha", "eta"], s)?;
            CoeffSequence::meixner_pollaczek(alpha, eta)
        }
        "ogh1d" => {
            let kv = parse_kv(rest)?;
            let params = QuasilinearParams {
                alpha: require_f64(&kv, "alpha", s)?,
                gamma: require_f64(&kv, "gamma", s)?,
                amp: require_f64(&kv, "amp", s)?,
                stagger_exp: require_f64(&kv, "a", s)?,
            };
            reject_extras(&kv, &["alpha", "gamma", "amp", "a"], s)?;
            CoeffSequence::ogh_one_d(params)
        }
        "custom" => CoeffSequence::custom(rest),
        "file" => {
            let file = load_coeffs(Path::new(rest))?;
            Ok(CoeffSequence::from_tabulated(file.values))
        }
        other => Err(Error::Invalid(format!(
            "unknown sequence family {other:?} in {s:?}"
        ))),
    }
}

fn parse_kv(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in s.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::Invalid(format!(
                "expected key=value, got {part:?}"
            )));
        };
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Invalid(format!("duplicate parameter {:?}", k.trim())));
        }
    }
    Ok(out)
}

fn require_f64(kv: &BTreeMap<String, String>, key: &str, ctx: &str) -> Result<f64> {
    let Some(v) = kv.get(key) else {
        return Err(Error::Invalid(format!("{ctx:?} is missing parameter {key}")));
    };
    v.parse::<f64>()
        .map_err(|_| Error::Invalid(format!("parameter {key}={v:?} is not a number")))
}

fn reject_extras(kv: &BTreeMap<String, String>, allowed: &[&str], ctx: &str) -> Result<()> {
    for k in kv.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Invalid(format!("unknown parameter {k:?} in {ctx:?}")));
        }
    }
    Ok(())
}

/// Parses a complex frequency written as `a+bi`, `a-bi`, `bi`, or `a`.
/// Scientific notation is fine on either part; `i` alone means `1i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Invalid("empty complex number".into()));
    }
    let bad = |s: &str| Error::Invalid(format!("cannot parse complex number {s:?}"));
    if let Some(body) = s.strip_suffix('i') {
        // Find the sign separating real and imaginary parts: the last +/-
        // that is neither leading nor an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-')
                && bytes[k - 1] != b'e'
                && bytes[k - 1] != b'E'
            {
                split = Some(k);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            re_str.parse::<f64>().map_err(|_| bad(&s))?
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| bad(&s))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        let re = s.parse::<f64>().map_err(|_| bad(&s))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Parses a grid selector `log:LO:HI:POINTS` into sample indices.
/// Bounds accept scientific notation (`log:1e3:1e7:24`).
pub fn parse_grid(s: &str) -> Result<Vec<u64>> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["log", lo, hi, points] => {
            let lo = parse_index(lo)?;
            let hi = parse_index(hi)?;
            let points = parse_index(points)? as usize;
            if lo < 1 || hi <= lo || points < 2 {
                return Err(Error::Invalid(format!(
                    "grid {s:?} needs 1 <= lo < hi and at least two points"
                )));
            }
            Ok(recmethod_core::log_grid(lo, hi, points))
        }
        _ => Err(Error::Invalid(format!(
            "unknown grid {s:?}; expected log:LO:HI:POINTS"
        ))),
    }
}

/// An integer that may be written as a float (`1e4`, `10000.0`).
pub fn parse_index(s: &str) -> Result<u64> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Invalid(format!("{s:?} is not a number")))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(Error::Invalid(format!("{s:?} is not a whole nonnegative count")));
    }
    Ok(v as u64)
}

/// Parses a comma-separated list of floats (`1,2,3`).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("{p:?} is not a number")))
        })
        .collect()
}
