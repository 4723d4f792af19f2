//! Coefficient files: a `#`-header block followed by one coefficient per
//! line as a full-precision decimal.
//!
//! ```text
//! # coefficients v1
//! # kind: mp alpha=1e0 eta=2e0
//! # precision: double
//! # provenance: synthetic
//! 1.4142135623730951
//! 2.449489742783178
//! ```
//!
//! Double-precision values are written in shortest round-trip form;
//! extended files carry 33 significant digits and reload as double-double.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::seq::Tabulated;

const MAGIC: &str = "coefficients v1";

/// A loaded coefficient file: the values plus every header field.
#[derive(Clone, Debug)]
pub struct CoeffFile {
    pub values: Tabulated,
    /// Header fields in file order-independent form; `precision` included.
    pub metadata: BTreeMap<String, String>,
}

impl CoeffFile {
    pub fn extended(&self) -> bool {
        self.metadata.get("precision").map(String::as_str) == Some("extended")
    }
}

/// Render a coefficient file to a string. Metadata keys must not contain
/// `:` or newlines; `precision` is derived from the values and rejected as
/// an explicit key.
pub fn format_coeffs(values: &Tabulated, metadata: &BTreeMap<String, String>) -> Result<String> {
    for (k, v) in metadata {
        if k == "precision" {
            return Err(Error::Invalid("precision is derived, not a metadata key".into()));
        }
        if k.contains(':') || k.contains('\n') || v.contains('\n') || k.trim() != k {
            return Err(Error::Invalid(format!("malformed metadata key/value: {k:?}")));
        }
    }
    let mut out = String::new();
    writeln!(out, "# {MAGIC}").unwrap();
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    match values.values_extended() {
        Some(ext) => {
            writeln!(out, "# precision: extended").unwrap();
            for v in ext {
                writeln!(out, "{}", v.to_decimal_string()).unwrap();
            }
        }
        None => {
            writeln!(out, "# precision: double").unwrap();
            for v in values.values() {
                writeln!(out, "{v:?}").unwrap();
            }
        }
    }
    Ok(out)
}

pub fn save_coeffs(
    path: &Path,
    values: &Tabulated,
    metadata: &BTreeMap<String, String>,
) -> Result<()> {
    std::fs::write(path, format_coeffs(values, metadata)?)?;
    Ok(())
}

/// Parse a coefficient file from a string.
pub fn parse_coeffs(text: &str) -> Result<CoeffFile> {
    let mut lines = text.lines().enumerate();
    let Some((_, first)) = lines.next() else {
        return Err(Error::Invalid("empty coefficient file".into()));
    };
    if first.trim() != format!("# {MAGIC}") {
        return Err(Error::Invalid(format!(
            "not a coefficient file (expected '# {MAGIC}', got {:?})",
            first.trim()
        )));
    }
    let mut metadata = BTreeMap::new();
    let mut doubles = Vec::new();
    let mut extendeds = Vec::new();
    let mut in_header = true;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if !in_header {
                return Err(Error::Invalid(format!(
                    "line {}: header line after data began",
                    idx + 1
                )));
            }
            let rest = rest.trim();
            let Some((k, v)) = rest.split_once(':') else {
                return Err(Error::Invalid(format!(
                    "line {}: header line without 'key: value'",
                    idx + 1
                )));
            };
            metadata.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        if in_header {
            in_header = false;
            match metadata.get("precision").map(String::as_str) {
                Some("double") | Some("extended") => {}
                other => {
                    return Err(Error::Invalid(format!(
                        "precision header must be double or extended, got {other:?}"
                    )));
                }
            }
        }
        if metadata.get("precision").map(String::as_str) == Some("extended") {
            let v = DoubleDouble::parse(line).ok_or_else(|| {
                Error::Invalid(format!("line {}: unparseable coefficient {line:?}", idx + 1))
            })?;
            extendeds.push(v);
        } else {
            let v: f64 = line.parse().map_err(|_| {
                Error::Invalid(format!("line {}: unparseable coefficient {line:?}", idx + 1))
            })?;
            doubles.push(v);
        }
    }
    let values = if metadata.get("precision").map(String::as_str) == Some("extended") {
        Tabulated::with_extended(extendeds)?
    } else {
        Tabulated::new(doubles)?
    };
    Ok(CoeffFile { values, metadata })
}

pub fn load_coeffs(path: &Path) -> Result<CoeffFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_coeffs(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Real;
    use crate::seq::CoeffSequence;

    fn meta(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn double_values_round_trip_bit_exactly() {
        let seq = CoeffSequence::toy_relevant();
        let t = Tabulated::new(seq.take(40).unwrap()).unwrap();
        let m = meta(&[("kind", "toy-relevant"), ("provenance", "generator")]);
        let text = format_coeffs(&t, &m).unwrap();
        let file = parse_coeffs(&text).unwrap();
        assert_eq!(file.values.values(), t.values());
        assert_eq!(file.metadata.get("kind").unwrap(), "toy-relevant");
        assert_eq!(file.metadata.get("precision").unwrap(), "double");
        assert!(!file.extended());
    }

    #[test]
    fn extended_values_keep_their_low_parts() {
        let vals: Vec<DoubleDouble> = (1..=12)
            .map(|n| DoubleDouble::from_u64(n).sqrt())
            .collect();
        let t = Tabulated::with_extended(vals.clone()).unwrap();
        let text = format_coeffs(&t, &meta(&[("kind", "roots")])).unwrap();
        let file = parse_coeffs(&text).unwrap();
        assert!(file.extended());
        let back = file.values.values_extended().unwrap();
        for (a, b) in back.iter().zip(&vals) {
            let diff = (*a - *b).abs().to_f64();
            assert!(diff <= 1e-31 * b.to_f64(), "diff {diff:e}");
        }
    }

    #[test]
    fn file_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.coeffs");
        let t = Tabulated::new(vec![1.5, 2.25, std::f64::consts::PI]).unwrap();
        save_coeffs(&path, &t, &meta(&[("steps", "3")])).unwrap();
        let file = load_coeffs(&path).unwrap();
        assert_eq!(file.values.values(), t.values());
        assert_eq!(file.metadata.get("steps").unwrap(), "3");
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse_coeffs("").is_err());
        assert!(parse_coeffs("1.0\n2.0\n").is_err());
        assert!(parse_coeffs("# coefficients v1\n# precision: single\n1.0\n").is_err());
        assert!(parse_coeffs("# coefficients v1\n# precision: double\n1.0\n# late: header\n").is_err());
        assert!(parse_coeffs("# coefficients v1\n# precision: double\n-1.0\n").is_err());
        assert!(parse_coeffs("# coefficients v1\n# precision: double\nabc\n").is_err());
        let t = Tabulated::new(vec![1.0]).unwrap();
        assert!(format_coeffs(&t, &meta(&[("precision", "double")])).is_err());
        assert!(format_coeffs(&t, &meta(&[("bad:key", "v")])).is_err());
    }
}
