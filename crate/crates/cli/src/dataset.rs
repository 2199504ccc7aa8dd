//! Deterministic CSV output: fixed formatting, LF line endings, rows
//! written in the order they were generated, so identical runs produce
//! byte-identical files.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};

/// Scientific notation with 17 significant digits — enough to round-trip
/// any f64 — with `.` as the decimal separator regardless of locale.
/// Infinities (used for completed-decoherence rows) print as `inf`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_bool(b: bool) -> String {
    if b { "true".into() } else { "false".into() }
}

/// An in-memory table headed for disk.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Dataset {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Render as CSV text. Fails if any row's width disagrees with the
    /// header (a generator bug, not a user error).
    pub fn to_csv(&self) -> Result<String> {
        let mut text = String::new();
        text.push_str(&self.header.join(","));
        text.push('\n');
        for (index, row) in self.rows.iter().enumerate() {
            ensure!(
                row.len() == self.header.len(),
                "row {index} has {} fields, header has {}",
                row.len(),
                self.header.len()
            );
            text.push_str(&row.join(","));
            text.push('\n');
        }
        Ok(text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_csv()?;
        fs::write(path, text).with_context(|| format!("cannot write '{}'", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_format_with_seventeen_significant_digits() {
        assert_eq!(format_number(1e12), "1.0000000000000000e12");
        assert_eq!(format_number(-0.5), "-5.0000000000000000e-1");
        assert_eq!(format_number(f64::INFINITY), "inf");
        // round-trip exactness
        for x in [std::f64::consts::PI, 9.90099e5, 1.0 / 3.0, 6.02e23] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout_is_lf_terminated_and_checked() {
        let mut data = Dataset::new(vec!["a", "b"]);
        data.push_row(vec![format_number(1.0), format_bool(true)]);
        let text = data.to_csv().unwrap();
        assert_eq!(text, "a,b\n1.0000000000000000e0,true\n");
        assert!(!text.contains('\r'));

        data.push_row(vec!["lonely".into()]);
        assert!(data.to_csv().is_err());
    }
}
