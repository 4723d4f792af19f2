//! Output assembly: ordered key-value records, CSV series with comment
//! headers, and the file-or-stdout sink.
//!
//! CSV files open with `# key: value` comment lines (provenance and fit
//! results), then a header row, then one data row per line. Floats are
//! written in shortest round-trip form so repeated runs emit identical
//! bytes.

use std::fmt::Display;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use recmethod_core::Result;

/// An ordered structured record rendered as `key: value` lines.
#[derive(Clone, Debug, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            writeln!(out, "{k}: {v}").unwrap();
        }
        out
    }
}

/// A CSV series: leading `#` comments, a header row, data rows.
#[derive(Clone, Debug)]
pub struct Csv {
    comments: Vec<(String, String)>,
    header: String,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            comments: Vec::new(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl Display) {
        self.comments.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.comments {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "{}", self.header).unwrap();
        for row in &self.rows {
            writeln!(out, "{row}").unwrap();
        }
        out
    }
}

/// Shortest round-trip decimal for a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Canonical `a+bi` form with round-trip parts.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Writes `text` to `out` when given, otherwise to stdout.
pub fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
